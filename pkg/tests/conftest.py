import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from wpb.packets import GeneralizedGaussian

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# packet parameter ranges used by the integral checks
WIDTH_RE = (0.2, 5.0)
WIDTH_IM = 5.0
CENTER = 3.0
MOMENTUM = 3.0


@st.composite
def packets(draw, normalized=True):
    gr = draw(st.floats(*WIDTH_RE))
    gi = draw(st.floats(-WIDTH_IM, WIDTH_IM))
    c = draw(st.floats(-CENTER, CENTER))
    p = draw(st.floats(-MOMENTUM, MOMENTUM))
    phase = draw(st.floats(-np.pi, np.pi))
    if normalized:
        return GeneralizedGaussian.normalized(complex(gr, gi), c, p, phase)
    lm = draw(st.floats(-2.0, 2.0))
    return GeneralizedGaussian(c, p, complex(gr, gi), complex(lm, phase))


def random_packet(rng, normalized=True):
    gr = rng.uniform(*WIDTH_RE)
    gi = rng.uniform(-WIDTH_IM, WIDTH_IM)
    c = rng.uniform(-CENTER, CENTER)
    p = rng.uniform(-MOMENTUM, MOMENTUM)
    phase = rng.uniform(-np.pi, np.pi)
    if normalized:
        return GeneralizedGaussian.normalized(complex(gr, gi), c, p, phase)
    return GeneralizedGaussian(c, p, complex(gr, gi), complex(rng.uniform(-2, 2), phase))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
