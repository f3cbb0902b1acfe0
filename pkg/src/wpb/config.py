"""Strict-schema JSON scenario configuration.

A config is a JSON object with a required ``scenario`` and optional sections;
unknown keys are rejected with a nearest-match suggestion::

    {
      "scenario": "anharmonic",
      "potential": {"kind": "quartic", "m": 1.0, "lambda": 0.25},
      "packet": {"center": 1.5, "momentum": 0.0, "gamma_re": 1.0, "gamma_im": 0.0},
      "brigade": {"dt": 0.0675, "n_steps": 60, "significance_eps": 1e-6},
      "grid": {"x_min": -12, "x_max": 12, "n_points": 1024, "dt": 0.001},
      "time": {"t_end": 4.05, "n_times": 61, "frames_every": 10},
      "output_dir": "out/anharmonic"
    }
"""
from __future__ import annotations

import copy
import difflib
import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .brigade import BrigadeConfig
from .errors import ConfigError
from .oracle_grid import GridSpec
from .packets import GeneralizedGaussian
from .potentials import PotentialSpec

SCENARIOS = (
    "free",
    "harmonic",
    "coherent",
    "anharmonic",
    "double_well_stationary",
    "instanton",
    "tunneling_dynamics",
    "compare",
)

# potential kind implied by each scenario; None means "any, must be given"
SCENARIO_KIND = {
    "free": "free",
    "harmonic": "harmonic",
    "coherent": "harmonic",
    "anharmonic": "quartic",
    "double_well_stationary": "double_well",
    "instanton": "double_well",
    "tunneling_dynamics": "double_well",
    "compare": None,
}

DEFAULTS = {
    "potential": {"kind": None, "m": 1.0, "omega": 1.0, "lambda": 1.0, "f": 1.4},
    "packet": {"center": 0.0, "momentum": 0.0, "gamma_re": 1.0, "gamma_im": 0.0},
    "brigade": {"dt": 0.05, "n_steps": 40, "significance_eps": 1e-8,
                "renormalize_each_step": True, "thin": 1},
    "grid": {"x_min": -12.0, "x_max": 12.0, "n_points": 1024, "dt": 1e-3},
    "time": {"t_end": None, "n_times": 101, "frames_every": 10},
    "tunneling": {"n_path": 8, "p_mode": "frozen", "tau": 10.0},
}
TOP_LEVEL = ("scenario", "output_dir") + tuple(DEFAULTS)
DEFAULT_OUTPUT_DIR = "wpb_out"

_INT_KEYS = {"n_steps", "thin", "n_points", "n_times", "frames_every", "n_path"}
_BOOL_KEYS = {"renormalize_each_step"}
_STR_KEYS = {"kind", "p_mode"}
_OPTIONAL = {("potential", "kind"), ("time", "t_end")}


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    potential: PotentialSpec
    packet: GeneralizedGaussian
    brigade: BrigadeConfig
    grid: GridSpec
    t_end: float | None
    n_times: int
    frames_every: int
    n_path: int
    p_mode: str
    tau: float
    output_dir: str
    raw: dict

    @property
    def digest(self) -> str:
        return config_digest(self.raw)


def config_digest(raw: dict) -> str:
    blob = json.dumps(raw, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def _unknown(key, known, where):
    match = difflib.get_close_matches(key, list(known), n=1, cutoff=0.5)
    hint = f"; did you mean {match[0]!r}?" if match else ""
    loc = f" in section {where!r}" if where else ""
    return ConfigError(f"unknown key {key!r}{loc}{hint}", key=key)


def _typed(section, key, value):
    name = f"{section}.{key}"
    if (section, key) in _OPTIONAL and value is None:
        return None
    if key in _BOOL_KEYS:
        if not isinstance(value, bool):
            raise ConfigError(f"{name} must be true or false", key=key)
        return value
    if key in _STR_KEYS:
        if not isinstance(value, str):
            raise ConfigError(f"{name} must be a string", key=key)
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name} must be a number", key=key)
    if key in _INT_KEYS:
        if int(value) != value:
            raise ConfigError(f"{name} must be an integer", key=key)
        return int(value)
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{name} must be finite", key=key)
    return value


def _merge(data: dict) -> dict:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    for key in data:
        if key not in TOP_LEVEL:
            raise _unknown(key, TOP_LEVEL, None)
    if "scenario" not in data:
        raise ConfigError("missing required key 'scenario'", key="scenario")
    scenario = data["scenario"]
    if scenario not in SCENARIOS:
        match = difflib.get_close_matches(str(scenario), SCENARIOS, n=1)
        hint = f"; did you mean {match[0]!r}?" if match else ""
        raise ConfigError(f"unknown scenario {scenario!r}{hint}", key="scenario")
    merged = {"scenario": scenario,
              "output_dir": data.get("output_dir", DEFAULT_OUTPUT_DIR)}
    if not isinstance(merged["output_dir"], str):
        raise ConfigError("output_dir must be a string", key="output_dir")
    for section, defaults in DEFAULTS.items():
        given = data.get(section, {})
        if not isinstance(given, dict):
            raise ConfigError(f"section {section!r} must be an object", key=section)
        out = copy.deepcopy(defaults)
        for key, value in given.items():
            if key not in defaults:
                raise _unknown(key, defaults, section)
            out[key] = _typed(section, key, value)
        merged[section] = out
    return merged


def _positive(merged, section, key, strict=True):
    v = merged[section][key]
    if v is None:
        return
    if (strict and not v > 0) or (not strict and v < 0):
        rel = ">" if strict else ">="
        raise ConfigError(f"{section}.{key} must be {rel} 0, got {v!r}", key=key)


def validate(data: dict) -> ScenarioConfig:
    """Validate a parsed JSON object and build the typed config."""
    merged = _merge(data)
    scenario = merged["scenario"]
    pot = merged["potential"]
    kind = pot["kind"] or SCENARIO_KIND[scenario]
    if kind is None:
        raise ConfigError("scenario 'compare' needs potential.kind", key="kind")
    expected = SCENARIO_KIND[scenario]
    if expected is not None and kind != expected:
        raise ConfigError(f"scenario {scenario!r} requires potential.kind {expected!r}, got {kind!r}",
                          key="kind")
    if kind not in ("free", "harmonic", "quartic", "double_well"):
        raise ConfigError(f"unsupported potential.kind {kind!r}", key="kind")
    pot["kind"] = kind

    for key in ("m", "omega", "lambda", "f"):
        _positive(merged, "potential", key)
    _positive(merged, "packet", "gamma_re")
    for key in ("dt", "n_steps", "thin"):
        _positive(merged, "brigade", key)
    eps = merged["brigade"]["significance_eps"]
    if not 0 < eps < 1:
        raise ConfigError(f"brigade.significance_eps must lie in (0, 1), got {eps!r}",
                          key="significance_eps")
    for key in ("n_points", "dt"):
        _positive(merged, "grid", key)
    g = merged["grid"]
    if not g["x_max"] > g["x_min"]:
        raise ConfigError("grid.x_max must exceed grid.x_min", key="x_max")
    if g["n_points"] < 16:
        raise ConfigError("grid.n_points must be at least 16", key="n_points")
    _positive(merged, "time", "t_end")
    _positive(merged, "time", "frames_every")
    if merged["time"]["n_times"] < 2:
        raise ConfigError("time.n_times must be at least 2", key="n_times")
    if merged["tunneling"]["n_path"] < 3:
        raise ConfigError("tunneling.n_path must be at least 3", key="n_path")
    if merged["tunneling"]["p_mode"] not in ("frozen", "with_momentum"):
        raise ConfigError("tunneling.p_mode must be 'frozen' or 'with_momentum'", key="p_mode")
    _positive(merged, "tunneling", "tau", strict=False)

    kw = {"m": pot["m"]}
    if kind == "harmonic":
        kw["omega"] = pot["omega"]
    if kind in ("quartic", "double_well"):
        kw["lam"] = pot["lambda"]
    if kind == "double_well":
        kw["f"] = pot["f"]
    potential = PotentialSpec(kind, **kw)
    pk = merged["packet"]
    packet = GeneralizedGaussian.normalized(complex(pk["gamma_re"], pk["gamma_im"]),
                                            pk["center"], pk["momentum"])
    b = merged["brigade"]
    brigade = BrigadeConfig(b["dt"], b["n_steps"], b["significance_eps"],
                            b["renormalize_each_step"], b["thin"])
    grid = GridSpec(g["x_min"], g["x_max"], g["n_points"], g["dt"])
    tm = merged["time"]
    tn = merged["tunneling"]
    return ScenarioConfig(scenario, potential, packet, brigade, grid, tm["t_end"], tm["n_times"],
                          tm["frames_every"], tn["n_path"], tn["p_mode"], tn["tau"],
                          merged["output_dir"], merged)


def parse_config(path) -> ScenarioConfig:
    """Read and validate a JSON config file.

    Raises
    ------
    FileNotFoundError
        The file does not exist.
    ConfigError
        Malformed JSON or an invalid parameter (the message names the key).
    """
    path = Path(path)
    text = path.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from exc
    return validate(data)
