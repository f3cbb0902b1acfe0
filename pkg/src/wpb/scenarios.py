"""Named experiments driven by a :class:`~wpb.config.ScenarioConfig`.

Every run writes into one output directory:

* ``metadata.json``: scenario, grid, config digest and the resolved config;
* ``metrics.json``: scalar results of the scenario;
* ``frames/frame_NNNNNN.csv``: wavefunction snapshots (``t,x,re_psi,im_psi``);
* scenario tables (``*.csv``) and SVG plots;
* ``manifest.json``: every file above with its sha256 digest, written last.

Outputs carry no timestamps, so identical configs give identical files.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.integrate import solve_ivp

from . import __version__
from .brigade import (SubspacePropagator, assemble_matrices, generate_trajectory_basis,
                      reconstruct, significant_subspace)
from .config import ScenarioConfig
from .errors import WpbError
from .exact_propagators import coherent_trajectory, free_evolve, harmonic_evolve
from .oracle_grid import init_from_packet, lowest_eigenpairs, propagate
from .packets import evaluate
from .svgplot import line_plot
from .tunneling import (find_stationary_gaussians, instanton_basis, instanton_trajectory,
                        ode_residuals, smoothed_hamiltonian, splitting_and_transfer)

__all__ = ["RunReport", "run_scenario", "spectrum"]


@dataclass(frozen=True)
class RunReport:
    out_dir: Path
    metrics: dict
    manifest: dict

    @property
    def partial(self) -> bool:
        return self.manifest["status"] != "complete"


def _fmt(v) -> str:
    return format(float(v), ".12e")


class _Writer:
    def __init__(self, out_dir: Path):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.files = {}
        self.n_frames = 0

    def text(self, rel: str, content: str):
        path = self.out_dir / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        data = content.encode()
        path.write_bytes(data)
        self.files[rel] = {"path": rel, "sha256": hashlib.sha256(data).hexdigest(),
                           "bytes": len(data)}

    def json(self, rel: str, obj):
        self.text(rel, json.dumps(obj, indent=2, sort_keys=True) + "\n")

    def table(self, rel: str, header, columns):
        cols = [np.asarray(c) for c in columns]
        lines = [",".join(header)]
        for row in zip(*cols):
            lines.append(",".join(v if isinstance(v, str) else _fmt(v) for v in row))
        self.text(rel, "\n".join(lines) + "\n")

    def frame(self, t, xs, psi):
        psi = np.asarray(psi, dtype=np.complex128)
        self.table(f"frames/frame_{self.n_frames:06d}.csv", ("t", "x", "re_psi", "im_psi"),
                   (np.full(len(xs), float(t)), xs, psi.real, psi.imag))
        self.n_frames += 1

    def plot(self, rel, series, **kw):
        self.text(rel, line_plot(series, **kw))

    def finalize(self, cfg: ScenarioConfig, error: str | None = None) -> dict:
        manifest = {
            "scenario": cfg.scenario,
            "config_digest": cfg.digest,
            "status": "complete" if error is None else "partial",
            "error": error,
            "files": [self.files[k] for k in sorted(self.files)],
        }
        tmp = self.out_dir / "manifest.json.tmp"
        tmp.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        os.replace(tmp, self.out_dir / "manifest.json")
        return manifest


def _grid_l2(a, b, dx):
    return math.sqrt(float(np.sum(np.abs(a - b) ** 2) * dx))


def _wave_plot(w, rel, xs, psi, title, reference=None):
    series = [{"x": xs, "y": psi.real, "label": "re psi"},
              {"x": xs, "y": psi.imag, "label": "im psi"},
              {"x": xs, "y": np.abs(psi) ** 2, "label": "|psi|^2"}]
    if reference is not None:
        series.append({"x": xs, "y": np.abs(reference) ** 2, "label": "|psi|^2 oracle",
                       "dashed": True})
    w.plot(rel, series, title=title, xlabel="x", ylabel="amplitude")


def _times(cfg, default_end):
    t_end = cfg.t_end if cfg.t_end is not None else default_end
    return np.linspace(0.0, t_end, cfg.n_times)


def _is_frame(i, n, every):
    return i % every == 0 or i == n - 1


# -- closed-form scenarios ----------------------------------------------------

def _closed_form(cfg, w, every, evolve, default_end):
    pot, spec, g0 = cfg.potential, cfg.grid, cfg.packet
    xs = spec.x
    times = _times(cfg, default_end)
    oracle = propagate(init_from_packet(g0, spec), pot, times)
    l2, gammas, last = [], [], None
    for i, (t, st) in enumerate(zip(times, oracle)):
        g = evolve(g0, t)
        psi = evaluate(g, xs)
        l2.append(_grid_l2(psi, st.amplitudes, spec.dx))
        gammas.append(g.width)
        if _is_frame(i, len(times), every):
            w.frame(t, xs, psi)
        last = (psi, st.amplitudes)
    gammas = np.array(gammas)
    w.table("width.csv", ("t", "gamma_re", "gamma_im", "l2_vs_grid"),
            (times, gammas.real, gammas.imag, l2))
    _wave_plot(w, "final.svg", xs, last[0], f"{cfg.scenario} at t = {times[-1]:.4g}", last[1])
    w.plot("l2_error.svg", [{"x": times, "y": l2, "label": "closed form vs grid"}],
           title="L2 deviation from grid oracle", xlabel="t", ylabel="L2")
    return times, gammas, {"max_l2_vs_grid": max(l2), "t_end": float(times[-1])}


def _free(cfg, w, every):
    m = cfg.potential.m
    _, _, metrics = _closed_form(cfg, w, every, lambda g, t: free_evolve(g, m, t), 1.0)
    return metrics


def _harmonic(cfg, w, every):
    m, om = cfg.potential.m, cfg.potential.omega
    period = 2.0 * math.pi / om
    times, gammas, metrics = _closed_form(
        cfg, w, every, lambda g, t: harmonic_evolve(g, m, om, t), period)
    g0 = cfg.packet
    xs, dx = cfg.grid.x, cfg.grid.dx
    psi0 = evaluate(g0, xs)
    rot = [_grid_l2(evaluate(harmonic_evolve(g0, m, om, t), xs), np.exp(-0.5j * om * t) * psi0, dx)
           for t in times]
    metrics["max_l2_from_rotated_initial"] = max(rot)
    metrics["max_gamma_deviation_from_m_omega"] = float(np.max(np.abs(gammas - m * om)))
    metrics["gamma_period_deviation"] = abs(harmonic_evolve(g0, m, om, period).width - g0.width)
    return metrics


def _coherent(cfg, w, every):
    m, om = cfg.potential.m, cfg.potential.omega
    g0 = cfg.packet
    times = _times(cfg, 4.0 * math.pi / om)
    x0, p0 = g0.center, g0.momentum
    sol = solve_ivp(lambda t, y: (y[1] / m, -m * om * om * y[0]), (0.0, times[-1]), (x0, p0),
                    method="DOP853", t_eval=times, rtol=1e-13, atol=1e-13)
    pts = [coherent_trajectory(x0, p0, m, om, t) for t in times]
    packets = [harmonic_evolve(g0, m, om, t) for t in times]
    xc = np.array([p.x for p in pts])
    pc = np.array([p.p for p in pts])
    xg = np.array([g.center for g in packets])
    xs = cfg.grid.x
    for i, (t, g) in enumerate(zip(times, packets)):
        if _is_frame(i, len(times), every):
            w.frame(t, xs, evaluate(g, xs))
    w.table("trajectory.csv", ("t", "x_closed", "p_closed", "x_packet", "x_ode", "p_ode", "action"),
            (times, xc, pc, xg, sol.y[0], sol.y[1], [p.action_phase for p in pts]))
    w.plot("trajectory.svg", [{"x": times, "y": xc, "label": "closed form"},
                              {"x": times, "y": sol.y[0], "label": "ODE", "dashed": True}],
           title="coherent-state center", xlabel="t", ylabel="x")
    return {"max_center_error_vs_ode": float(np.max(np.abs(xc - sol.y[0]))),
            "max_momentum_error_vs_ode": float(np.max(np.abs(pc - sol.y[1]))),
            "max_packet_center_error": float(np.max(np.abs(xg - sol.y[0]))),
            "t_end": float(times[-1])}


# -- brigade scenarios ----------------------------------------------------------

def _brigade_run(cfg, w, every, with_oracle):
    pot, spec, g0 = cfg.potential, cfg.grid, cfg.packet
    b = cfg.brigade
    packets = generate_trajectory_basis(g0, pot, b)
    basis = assemble_matrices(packets, pot)
    tr = significant_subspace(basis, b.significance_eps)
    prop = SubspacePropagator(basis, tr)
    c0 = np.zeros(len(packets), dtype=np.complex128)
    c0[0] = 1.0
    d0 = prop.to_modes(c0)
    e0, n0 = prop.energy(d0), float(np.linalg.norm(d0))
    times = _times(cfg, b.dt * b.n_steps)
    xs, dx = spec.x, spec.dx
    oracle = propagate(init_from_packet(g0, spec), pot, times) if with_oracle else None
    norms, energies, mean_x, l2 = [], [], [], []
    last = None
    for i, t in enumerate(times):
        d = prop.evolve_modes(d0, t)
        norms.append(float(np.linalg.norm(d)))
        energies.append(prop.energy(d))
        psi = reconstruct(basis.packets, tr.matrix @ d, xs)
        rho = np.abs(psi) ** 2
        mean_x.append(float(np.sum(rho * xs) / np.sum(rho)))
        ref = next(oracle).amplitudes if with_oracle else None
        if with_oracle:
            l2.append(_grid_l2(psi, ref, dx))
        if _is_frame(i, len(times), every):
            w.frame(t, xs, psi)
        last = (psi, ref)
    steps = np.arange(len(packets))
    w.table("trajectory.csv", ("index", "center", "momentum", "gamma_re", "gamma_im"),
            (steps, [g.center for g in packets], [g.momentum for g in packets],
             [g.width.real for g in packets], [g.width.imag for g in packets]))
    cols = [times, norms, energies, mean_x] + ([l2] if with_oracle else [])
    header = ("t", "mode_norm", "energy", "mean_x") + (("l2_vs_grid",) if with_oracle else ())
    w.table("observables.csv", header, cols)
    _wave_plot(w, "final.svg", xs, last[0], f"brigade at t = {times[-1]:.4g}", last[1])
    metrics = {
        "basis_size": len(packets),
        "retained_modes": tr.retained_modes,
        "coefficient_norm_drift": float(np.max(np.abs(np.array(norms) - n0))),
        "energy_drift": float(np.max(np.abs(np.array(energies) - e0))),
        "initial_energy": e0,
        "t_end": float(times[-1]),
    }
    if with_oracle:
        metrics["max_l2_vs_grid"] = max(l2)
        w.plot("l2_error.svg", [{"x": times, "y": l2, "label": "brigade vs grid"}],
               title="L2 error against grid oracle", xlabel="t", ylabel="L2")
    return metrics


def _anharmonic(cfg, w, every):
    return _brigade_run(cfg, w, every, with_oracle=False)


def _compare(cfg, w, every):
    return _brigade_run(cfg, w, every, with_oracle=True)


# -- double-well scenarios ------------------------------------------------------

def _wells(cfg, w):
    left, right = find_stationary_gaussians(cfg.potential)
    res = [well.residuals(cfg.potential) for well in (left, right)]
    w.table("wells.csv", ("side", "center", "gamma", "force_residual", "width_residual"),
            (["left", "right"], [left.center, right.center], [left.width, right.width],
             [r[0] for r in res], [r[1] for r in res]))
    return left, right, max(abs(v) for r in res for v in r)


def _oracle_levels(cfg, k=2):
    return [e for e, _ in lowest_eigenpairs(cfg.potential, cfg.grid, k)]


def _double_well_stationary(cfg, w, every):
    pot, xs = cfg.potential, cfg.grid.x
    left, right, resid = _wells(cfg, w)
    basis = assemble_matrices([left.packet(), right.packet()], pot)
    tr = significant_subspace(basis, cfg.brigade.significance_eps)
    prop = SubspacePropagator(basis, tr)
    oracle = _oracle_levels(cfg)
    split = splitting_and_transfer(prop.h)
    oracle_split = oracle[1] - oracle[0]
    for well in (left, right):
        w.frame(0.0, xs, evaluate(well.packet(), xs))
    w.plot("wells.svg", [{"x": xs, "y": pot(xs) / max(pot.barrier_height(), 1e-300) * 0.5,
                          "label": "V / (2 barrier)", "dashed": True},
                         {"x": xs, "y": np.abs(evaluate(left.packet(), xs)) ** 2, "label": "left"},
                         {"x": xs, "y": np.abs(evaluate(right.packet(), xs)) ** 2, "label": "right"}],
           title="stationary Gaussians", xlabel="x", ylabel="density")
    return {"left_center": left.center, "right_center": right.center, "gamma": left.width,
            "max_residual": resid, "basis_energies": [float(e) for e in prop.energies],
            "oracle_energies": oracle, "delta_e_two_gaussian": split.delta_e,
            "delta_e_oracle": oracle_split, "splitting_ratio": split.delta_e / oracle_split}


def _instanton(cfg, w, every):
    pot = cfg.potential
    left, _, _ = _wells(cfg, w)
    path = instanton_trajectory(pot, left, cfg.n_path)
    e_res = path.euclidean_energy() + path.turning_energy
    ode = ode_residuals(path)
    w.table("path.csv", ("index", "tau", "x", "p", "energy_residual", "ode_residual"),
            (np.arange(len(path)), path.tau, path.x, path.p, e_res, ode))
    w.plot("path.svg", [{"x": path.tau, "y": path.x, "label": "x(tau)"}],
           title="Euclidean path", xlabel="tau", ylabel="x")
    mid = math.sqrt(2.0 / pot.m * (pot(0.0) - pot(path.c_min)))
    kink = pot.f ** 2 * math.sqrt(2.0 * pot.lam / pot.m)
    return {"turning_point": path.c_min, "delta": path.delta, "n_samples": len(path),
            "max_energy_residual": float(np.max(np.abs(e_res))),
            "max_ode_residual": float(np.max(ode)),
            "mid_slope": mid, "kink_slope": kink, "half_period": path.half_period()}


def _p_left(psi, xs):
    rho = np.abs(psi) ** 2
    return float(np.sum(rho[xs < 0]) / np.sum(rho))


def _half_period(times, vals, level=0.5, margin=0.25):
    """Time between the first downward and the next upward crossing of ``level``.

    The upward crossing only counts once the signal has dipped below
    ``level - margin``, which ignores fast small wiggles around the level.
    """
    def cross(i):
        y0, y1 = vals[i - 1] - level, vals[i] - level
        return float(times[i - 1] + (times[i] - times[i - 1]) * y0 / (y0 - y1))

    down = dipped = None
    for i in range(1, len(vals)):
        if down is None:
            if vals[i - 1] >= level > vals[i]:
                down = cross(i)
        elif not dipped:
            dipped = vals[i] < level - margin
        elif vals[i - 1] < level <= vals[i]:
            return cross(i) - down
    return float("nan")


def _tunneling_dynamics(cfg, w, every):
    pot, spec = cfg.potential, cfg.grid
    eps = cfg.brigade.significance_eps
    left, right, _ = _wells(cfg, w)
    path = instanton_trajectory(pot, left, cfg.n_path)
    packets = [left.packet()] + instanton_basis(path, left.width, cfg.p_mode) + [right.packet()]
    basis = assemble_matrices(packets, pot)
    tr = significant_subspace(basis, eps)
    prop = SubspacePropagator(basis, tr)
    split = splitting_and_transfer(prop.h)
    two = SubspacePropagator(*(lambda b: (b, significant_subspace(b, eps)))(
        assemble_matrices([left.packet(), right.packet()], pot)))
    split_two = splitting_and_transfer(two.h)
    oracle = _oracle_levels(cfg)
    oracle_split = oracle[1] - oracle[0]
    smooth = np.linalg.eigvalsh(smoothed_hamiltonian(packets, pot, cfg.tau, spec, eps))

    times = _times(cfg, 2.0 * split.transfer_time)
    c0 = np.zeros(len(packets), dtype=np.complex128)
    c0[0] = 1.0
    d0 = prop.to_modes(c0)
    n0 = float(np.linalg.norm(d0))
    xs = spec.x
    p_left, norms = [], []
    for i, t in enumerate(times):
        d = prop.evolve_modes(d0, t)
        norms.append(float(np.linalg.norm(d)))
        psi = reconstruct(basis.packets, tr.matrix @ d, xs)
        p_left.append(_p_left(psi, xs))
        if _is_frame(i, len(times), every):
            w.frame(t, xs, psi)
    half = _half_period(times, p_left)
    w.table("p_left.csv", ("t", "p_left", "mode_norm"), (times, p_left, norms))
    w.table("spectrum.csv", ("level", "basis_energy", "smoothed_energy", "oracle_energy"),
            (np.arange(2), prop.energies[:2], smooth[:2], oracle))
    w.plot("p_left.svg", [{"x": times, "y": p_left, "label": "P(x < 0)"}],
           title="left-well probability", xlabel="t", ylabel="probability")
    return {
        "basis_size": len(packets),
        "retained_modes": tr.retained_modes,
        "delta_e_two_gaussian": split_two.delta_e,
        "delta_e_instanton": split.delta_e,
        "delta_e_oracle": oracle_split,
        "ratio_two_gaussian": split_two.delta_e / oracle_split,
        "ratio_instanton": split.delta_e / oracle_split,
        "transfer_time": split.transfer_time,
        "measured_half_period": half,
        "half_period_ratio": half / split.transfer_time,
        "smoothed_tau": cfg.tau,
        "smoothed_energies": [float(e) for e in smooth[:2]],
        "oracle_energies": oracle,
        "coefficient_norm_drift": float(np.max(np.abs(np.array(norms) - n0))),
    }


_RUNNERS = {
    "free": _free,
    "harmonic": _harmonic,
    "coherent": _coherent,
    "anharmonic": _anharmonic,
    "compare": _compare,
    "double_well_stationary": _double_well_stationary,
    "instanton": _instanton,
    "tunneling_dynamics": _tunneling_dynamics,
}


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.integer, int)) and not isinstance(obj, bool):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def run_scenario(cfg: ScenarioConfig, out_dir=None, frames_every: int | None = None) -> RunReport:
    """Execute ``cfg`` and write its outputs to ``out_dir``.

    On a library error the manifest is still written, flagged ``"partial"``,
    and the error is re-raised.
    """
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    every = frames_every if frames_every is not None else cfg.frames_every
    if every < 1:
        raise ValueError("frames_every must be at least 1")
    w = _Writer(out)
    s = cfg.grid
    w.json("metadata.json", {
        "scenario": cfg.scenario,
        "grid": {"x_min": s.x_min, "x_max": s.x_max, "n_points": s.n_points, "dt": s.dt},
        "config_digest": cfg.digest,
        "config": cfg.raw,
        "frames_every": every,
        "version": __version__,
    })
    try:
        metrics = _clean(_RUNNERS[cfg.scenario](cfg, w, every))
        metrics["n_frames"] = w.n_frames
        w.json("metrics.json", metrics)
    except (WpbError, ArithmeticError, ValueError) as exc:
        w.finalize(cfg, error=f"{type(exc).__name__}: {exc}")
        raise
    return RunReport(out, metrics, w.finalize(cfg))


def spectrum(cfg: ScenarioConfig, levels: int):
    """Lowest ``levels`` grid-oracle energies of the configured potential."""
    return [e for e, _ in lowest_eigenpairs(cfg.potential, cfg.grid, levels)]
