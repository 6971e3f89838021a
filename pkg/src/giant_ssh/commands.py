"""Figure-data producers behind the CLI subcommands."""

from __future__ import annotations

import math

import numpy as np

from giant_ssh.analytic import amplitudes_AA, amplitudes_AB, zero_mode_AA, zero_mode_AB
from giant_ssh.effective import band_modes, effective_coupling_matrix, pair_coupling_vs_theta
from giant_ssh.errors import InputError, NumericError
from giant_ssh.io import OutputTable, RunConfig
from giant_ssh.lattice import NO_PROBE, AtomCoupling, CouplingKind, ProbeConfig, build_hamiltonian
from giant_ssh.spectral import LevelClass, basis_state, classify_levels, eigensolve, photon_distribution, sweep_theta, time_evolve
from giant_ssh.validation import run_validation


def theta_grid(cfg: RunConfig) -> np.ndarray:
    return np.linspace(cfg.theta_min, cfg.theta_max, cfg.theta_points)


def cmd_spectrum(cfg: RunConfig) -> list[OutputTable]:
    """One spectrum-versus-θ table per (coupling kind, atom size d)."""
    ds = cfg.d_list if cfg.d_list is not None else [cfg.m - cfg.n]
    unit = cfg.energy_unit()
    tables = []
    for d in ds:
        atom = cfg.atom(m=cfg.n + d)
        rows = []
        for row in sweep_theta(theta_grid(cfg), cfg.params(), atom, eps=cfg.eps * cfg.q, workers=cfg.workers):
            rows += [(row.theta, i, float(e) / unit, c.value) for i, (e, c) in enumerate(zip(row.energies, row.classes))]
        tables.append(OutputTable(f"spectrum_{cfg.kind}_d{d}", "spectrum", rows))
    return tables


def select_level(spec, target: str, t1: float, t2: float, eps: float, zero_tol: float = 1e-8) -> int:
    """Index of the requested level.

    ``target`` is ``zero``, ``bound_upper``, ``bound_lower``, ``gap``, an
    integer level index (negative counts from the top) or ``upper_band:N`` /
    ``lower_band:N`` for the N-th bulk level from the outer band edge.
    """
    E = spec.energies
    classes = classify_levels(E, t1, t2, eps)
    if target == "zero":
        i = spec.nearest(0.0)
        if abs(E[i]) > zero_tol:
            raise NumericError(f"no zero mode: smallest |E| is {abs(E[i]):.3g}")
        return i
    if target in ("bound_upper", "bound_lower"):
        i = len(E) - 1 if target == "bound_upper" else 0
        if classes[i] is not LevelClass.BOUND:
            raise NumericError(f"no {target.replace('_', ' ')} state: extreme level is {classes[i].value}")
        return i
    if target == "gap":
        cands = [i for i, c in enumerate(classes) if c is LevelClass.GAP and abs(E[i]) > zero_tol]
        if not cands:
            raise NumericError("no nonzero in-gap level")
        return max(cands, key=lambda i: abs(E[i]))
    if target.startswith(("upper_band:", "lower_band:")):
        band, _, num = target.partition(":")
        bulk = [i for i, c in enumerate(classes) if c is LevelClass.BULK and (E[i] > 0) == (band == "upper_band")]
        order = bulk[::-1] if band == "upper_band" else bulk
        return order[int(num) - 1]
    try:
        return range(len(E))[int(target)]
    except (ValueError, IndexError):
        raise InputError(f"config field 'target': unknown level target {target!r}") from None


def cmd_distribution(cfg: RunConfig) -> list[OutputTable]:
    """Numeric photon distribution of one level, overlaid with the closed form when available."""
    params, atom = cfg.params(), cfg.atom()
    spec = eigensolve(build_hamiltonian(params, atom))
    i = select_level(spec, cfg.target, params.t1, params.t2, cfg.eps * cfg.q)
    E = float(spec.energies[i])
    numeric = photon_distribution(spec.state(i), spec.labels).normalized()
    sources = [("numeric", numeric)]
    footer = {"energy": E / cfg.energy_unit(), "level_index": i}
    classes = classify_levels([E], params.t1, params.t2, cfg.eps * cfg.q)
    analytic = None
    is_aa = atom.kind is CouplingKind.AA
    if cfg.target == "zero":
        analytic = (zero_mode_AA if is_aa else zero_mode_AB)(params, atom)
    elif classes[0] in (LevelClass.BOUND, LevelClass.GAP):
        analytic = (amplitudes_AA if is_aa else amplitudes_AB)(E, params, atom)
    if analytic is None:
        footer["analytic"] = "unavailable"
    else:
        sources.append(("analytic", analytic))
    rows = []
    for name, st in sources:
        for l in range(st.L):
            a, b = float(np.real(st.A[l])), float(np.real(st.B[l]))
            rows.append((l + 1, a, b, a * a, b * b, name))
    return [OutputTable(f"distribution_{cfg.kind}_{cfg.target.replace(':', '')}", "distribution", rows, footer)]


def cmd_effective(cfg: RunConfig) -> list[OutputTable]:
    params, atom = cfg.params(), cfg.atom()
    unit = cfg.energy_unit()
    modes = band_modes(params, atom)
    g_rows = [(float(k), int(s), float(v.real) / unit, float(v.imag) / unit, float(abs(v)) / unit)
              for k, s, v in zip(modes.k, modes.sigma, modes.g)]
    cm = effective_coupling_matrix(params, atom)
    G = cm.G
    rows = []
    for i in range(modes.size):
        for j in range(modes.size):
            v = G[i, j]
            if np.isnan(v):
                continue
            rows.append((float(modes.k[i]), float(modes.k[j]), int(modes.sigma[i]), int(modes.sigma[j]),
                         float(abs(v)) / unit, float(v.real) / unit, float(v.imag) / unit))
    footer = {"hermiticity_max_asymmetry": cm.hermiticity_defect() / unit, "theta": params.theta}
    thetas = theta_grid(cfg)
    vt_rows = []
    for kpi in cfg.k_list:
        vals = pair_coupling_vs_theta(params, atom, kpi * math.pi, thetas)
        vt_rows += [(float(t), float(kpi * math.pi), float(v) / unit) for t, v in zip(thetas, vals)]
    return [
        OutputTable("g_couplings", "g_couplings", g_rows),
        OutputTable("G_matrix", "G_matrix", rows, footer),
        OutputTable("G_vs_theta", "G_vs_theta", vt_rows),
    ]


def zero_mode_weight(cfg: RunConfig) -> tuple[np.ndarray, float]:
    """Zero-mode vector of the probe-free system and its amplitude at the probe site."""
    params, atom, probe = cfg.params(), cfg.atom(), cfg.probe()
    spec = eigensolve(build_hamiltonian(params, atom))
    i = spec.nearest(0.0)
    vec = spec.state(i)
    w = abs(vec[spec.labels.index(probe.site)])
    return vec, float(w)


def cmd_probe(cfg: RunConfig) -> list[OutputTable]:
    """Probe-atom Rabi dynamics starting from an excited probe."""
    params, atom = cfg.params(), cfg.atom()
    probe = cfg.probe()
    probe = ProbeConfig(True, probe.sublattice, probe.cell, probe.gp, probe.frequency)
    zvec, w = zero_mode_weight(cfg)
    period = math.pi / (probe.gp * w) if probe.gp * w > 0 else float("inf")
    t_max = cfg.t_max if cfg.t_max is not None else (4.0 * period if math.isfinite(period) else 100.0 / params.q)
    hm = build_hamiltonian(params, atom, probe)
    times = np.linspace(0.0, t_max, cfg.t_points)
    ev = time_evolve(hm, basis_state(hm, "probe"), times)
    zfull = np.concatenate([zvec, [0.0]])
    overlap = np.abs(ev.amplitudes @ zfull.conj()) ** 2
    rows = [(float(t), float(p), float(a), float(o))
            for t, p, a, o in zip(times, ev.population("probe"), ev.population("atom"), overlap)]
    footer = {"zero_mode_weight": w, "predicted_period": period}
    return [OutputTable("rabi", "rabi", rows, footer)]


def cmd_validate(cfg: RunConfig) -> tuple[list[OutputTable], bool]:
    params = cfg.params()
    aa = AtomCoupling("AA", cfg.n, cfg.m, cfg.g)
    ab = AtomCoupling("AB", cfg.n, cfg.m, cfg.g)
    checks = run_validation(params, aa, ab, t2_scale=cfg.t2_scale)
    rows = [(c.name, c.passed, c.residual, c.tolerance) for c in checks]
    ok = all(c.passed for c in checks)
    return [OutputTable("validation", "validation", rows, {"all_passed": "true" if ok else "false"})], ok
