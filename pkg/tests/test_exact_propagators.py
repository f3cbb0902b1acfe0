import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.polynomial import Polynomial
from scipy.integrate import solve_ivp

from conftest import packets, random_packet
from wpb.exact_propagators import (coherent_trajectory, driven_harmonic_step, free_evolve,
                                   harmonic_evolve, product_form_prefactor, quadratic_evolve)
from wpb.oracle_grid import GridSpec, GridState, _split_step, init_from_packet, l2_error, sample_packet
from wpb.packets import GeneralizedGaussian, evaluate, norm_squared, normalize
from wpb.potentials import EffectiveQuadraticParams, PotentialSpec, effective_quadratic


def _fields_close(a, b, tol):
    assert abs(a.center - b.center) < tol
    assert abs(a.momentum - b.momentum) < tol
    assert abs(a.width - b.width) < tol * max(1, abs(a.width))
    assert abs(a.log_prefactor - b.log_prefactor) < tol


def test_free_examples():
    g = GeneralizedGaussian.normalized(1.0)
    assert free_evolve(g, 1.0, 0.0) is g
    assert free_evolve(g, 1.0, 1.0).width == pytest.approx(0.5 - 0.5j, abs=1e-15)
    moving = GeneralizedGaussian.normalized(1.0, 0.0, 1.0)
    assert free_evolve(moving, 1.0, 2.0).center == pytest.approx(2.0, abs=1e-15)
    with pytest.raises(ValueError):
        free_evolve(g, 0.0, 1.0)


def test_free_prefactor_matches_closed_form():
    gamma, m, t = 1.3, 0.8, 0.7
    g = GeneralizedGaussian.normalized(gamma)
    out = free_evolve(g, m, t)
    expected = 0.25 * cmath.log(gamma / math.pi) - 0.5 * cmath.log(1 + 1j * gamma * t / m)
    assert out.log_prefactor == pytest.approx(expected, abs=1e-14)


def test_harmonic_examples():
    with pytest.raises(ValueError):
        harmonic_evolve(GeneralizedGaussian.normalized(1.0), 1.0, 0.0, 1.0)
    g = GeneralizedGaussian.normalized(2.0)
    out = harmonic_evolve(g, 1.0, 1.0, math.pi / 4)
    c = s = math.sqrt(0.5)
    assert out.width == pytest.approx(2.0 * (c + 0.5j * s) / (c + 2j * s), abs=1e-14)


@given(st.floats(0.2, 5), st.floats(0.3, 3), st.floats(0, 10))
def test_harmonic_fixed_point_only_rotates_phase(m, om, t):
    g = GeneralizedGaussian.normalized(m * om)
    out = harmonic_evolve(g, m, om, t)
    assert abs(out.width - m * om) < 1e-12 * m * om
    assert out.log_prefactor.real == pytest.approx(g.log_prefactor.real, abs=1e-12)
    assert cmath.exp(1j * (out.phase - g.phase)) == pytest.approx(cmath.exp(-0.5j * om * t), abs=1e-11)


@given(packets(), st.floats(0.3, 3), st.floats(0, 5))
def test_harmonic_width_is_periodic(g, om, t):
    a = harmonic_evolve(g, 1.0, om, t)
    b = harmonic_evolve(g, 1.0, om, t + 2 * math.pi / om)
    assert abs(a.width - b.width) < 1e-10 * max(1.0, abs(a.width))


@given(packets(), st.floats(0, 10))
def test_norm_preserved_and_width_stays_positive(g, t):
    for out in (free_evolve(g, 1.2, t), harmonic_evolve(g, 1.2, 0.9, t)):
        assert abs(norm_squared(out) - 1.0) < 1e-10
        assert out.width.real > 0


@given(packets(), st.floats(0, 4), st.floats(0, 4))
def test_composition(g, t1, t2):
    _fields_close(free_evolve(free_evolve(g, 1.0, t1), 1.0, t2), free_evolve(g, 1.0, t1 + t2), 1e-10)
    two = harmonic_evolve(harmonic_evolve(g, 1.0, 1.3, t1), 1.0, 1.3, t2)
    one = harmonic_evolve(g, 1.0, 1.3, t1 + t2)
    assert abs(two.center - one.center) < 1e-10 and abs(two.momentum - one.momentum) < 1e-10
    assert abs(two.width - one.width) < 1e-9 * max(1, abs(one.width))
    # the log-prefactor may differ by a branch of 2 pi i only
    d = two.log_prefactor - one.log_prefactor
    assert abs(d.real) < 1e-9
    assert abs(cmath.exp(1j * d.imag) - 1) < 1e-9


def test_coherent_examples():
    pt = coherent_trajectory(1.0, 0.0, 1.0, 1.0, math.pi / 2)
    assert (pt.x, pt.p) == pytest.approx((0.0, -1.0), abs=1e-15)
    pt = coherent_trajectory(0.3, 0.4, 1.0, 1.0, 0.0)
    assert (pt.x, pt.p, pt.action_phase) == (0.3, 0.4, 0.0)
    pt = coherent_trajectory(0.0, 1.0, 1.0, 0.0, 3.0)
    assert (pt.x, pt.p) == pytest.approx((3.0, 1.0))
    with pytest.raises(ValueError):
        coherent_trajectory(0, 0, 0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        coherent_trajectory(0, 0, 1.0, -1.0, 1.0)


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.2, 3), st.floats(0.2, 3), st.floats(0, 20))
def test_coherent_energy_conserved(x0, p0, m, om, t):
    pt = coherent_trajectory(x0, p0, m, om, t)
    e0 = (m * om * x0) ** 2 + p0 ** 2
    assert abs((m * om * pt.x) ** 2 + pt.p ** 2 - e0) < 1e-12 * max(1.0, e0)


def test_coherent_action_matches_lagrangian_quadrature():
    x0, p0, m, om, t = 0.7, -1.1, 1.4, 0.8, 3.3

    def rhs(_, y):
        x, p, _s = y
        return p / m, -m * om * om * x, p * p / (2 * m) - 0.5 * m * om * om * x * x

    sol = solve_ivp(rhs, (0, t), (x0, p0, 0.0), rtol=1e-12, atol=1e-12, method="DOP853")
    assert coherent_trajectory(x0, p0, m, om, t).action_phase == pytest.approx(sol.y[2, -1], abs=1e-9)


def test_harmonic_center_follows_classical_flow(rng):
    for _ in range(5):
        g = random_packet(rng)
        t = rng.uniform(0, 10)
        out = harmonic_evolve(g, 1.1, 1.7, t)
        pt = coherent_trajectory(g.center, g.momentum, 1.1, 1.7, t)
        assert (out.center, out.momentum) == pytest.approx((pt.x, pt.p), abs=1e-12)


def test_step_reduces_to_harmonic():
    g = GeneralizedGaussian.normalized(1.4 + 0.2j, 0.0, 0.0)
    params = EffectiveQuadraticParams(0.0, 0.0, 0.0, 0.0, 1.3, 1.0)
    _fields_close(driven_harmonic_step(g, params, 0.4), harmonic_evolve(g, 1.0, 1.3, 0.4), 1e-13)


def test_step_small_omega_limit_is_free():
    g = GeneralizedGaussian.normalized(1.4 + 0.2j, 0.3, 0.5)
    params = EffectiveQuadraticParams(0.3, 0.5, 0.0, 0.0, 1e-6, 1.0)
    _fields_close(driven_harmonic_step(g, params, 0.4), free_evolve(g, 1.0, 0.4), 1e-8)


def test_step_rejects_nonpositive_dt():
    g = GeneralizedGaussian.normalized(1.0)
    params = EffectiveQuadraticParams(0.0, 0.0, 0.0, 0.0, 1.0, 1.0)
    for dt in (0.0, -0.1):
        with pytest.raises(ValueError):
            driven_harmonic_step(g, params, dt)


class _Quadratic:
    """Duck-typed potential for the grid solver: ``E0 - F (x - x0) + k/2 (x - x0)**2``."""

    def __init__(self, params, m):
        self.m = m
        x0 = params.x_n
        k, F, E0 = params.stiffness, params.F_n, params.energy_offset
        self._poly = Polynomial([E0 + F * x0 + 0.5 * k * x0 * x0, -F - k * x0, 0.5 * k])

    def polynomial(self):
        return self._poly


@pytest.mark.parametrize("moving", [False, True])
def test_step_matches_grid_under_local_quadratic(moving):
    pot = PotentialSpec.quartic(lam=0.2)
    g = GeneralizedGaussian.normalized(1.0, 1.0, 0.6 if moving else 0.0)
    params = effective_quadratic(pot, g)
    spec = GridSpec(-12, 12, 1024, 1e-4)
    dt = 0.05
    ref = _split_step(init_from_packet(g, spec).amplitudes, spec, _Quadratic(params, 1.0), dt, False)
    out = driven_harmonic_step(g, params, dt)
    assert l2_error(GridState(spec, sample_packet(out, spec)), GridState(spec, ref)) < 1e-6


def test_step_over_barrier_uses_hyperbolic_continuation():
    dw = PotentialSpec.double_well(lam=1.0, f=1.0)
    g = GeneralizedGaussian.normalized(10.0, 0.1, 0.0)
    params = effective_quadratic(dw, g)
    assert params.stiffness < 0
    spec = GridSpec(-12, 12, 2048, 1e-5)
    ref = _split_step(init_from_packet(g, spec).amplitudes, spec, _Quadratic(params, 1.0), 0.05, False)
    out = driven_harmonic_step(g, params, 0.05)
    assert l2_error(GridState(spec, sample_packet(out, spec)), GridState(spec, ref)) < 1e-6


def test_renormalize_keeps_phase():
    g = GeneralizedGaussian(0.5, 0.0, 1.0 + 0.5j, 0.3 + 0.7j)
    params = effective_quadratic(PotentialSpec.quartic(), g)
    raw = driven_harmonic_step(g, params, 0.1)
    ren = driven_harmonic_step(g, params, 0.1, renormalize=True)
    assert ren.phase == raw.phase
    assert norm_squared(ren) == pytest.approx(1.0, abs=1e-14)


def test_product_form_prefactor_modulus_agrees_for_harmonic_reduction():
    g = GeneralizedGaussian.normalized(1.7 + 0.3j, 0.0, 0.0)
    params = EffectiveQuadraticParams(0.0, 0.0, 0.0, 0.0, 1.2, 1.0)
    product = product_form_prefactor(g, params, 0.3)
    exact = driven_harmonic_step(g, params, 0.3)
    assert product.real == pytest.approx(exact.log_prefactor.real, abs=1e-13)
    assert product.real == pytest.approx(normalize(exact).log_prefactor.real, abs=1e-13)


def test_quadratic_evolve_negative_time_inverts():
    g = GeneralizedGaussian.normalized(0.9 + 0.4j, 0.2, -0.3)
    fwd = quadratic_evolve(g, 1.0, 0.8, stiffness=2.0, force=0.5, origin=0.1, offset=0.3)
    back = quadratic_evolve(fwd, 1.0, -0.8, stiffness=2.0, force=0.5, origin=0.1, offset=0.3)
    xs = np.linspace(-3, 3, 13)
    np.testing.assert_allclose(evaluate(back, xs), evaluate(g, xs), atol=1e-12)
