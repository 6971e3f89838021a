"""Acceptance criteria, each at its stated tolerance.

Every test records one pass/fail line, shown in the terminal summary.
"""

import math
import os
import time

import numpy as np
import pytest
from scipy.signal import argrelextrema

from giant_ssh.analytic import (
    amplitudes_AA,
    amplitudes_AB,
    eigenvalue_roots,
    symmetry_check,
    zero_mode_AA,
    zero_mode_AB,
)
from giant_ssh.effective import effective_coupling_matrix, exact_pair_splittings, pair_coupling_vs_theta
from giant_ssh.lattice import AtomCoupling, ProbeConfig, SshParams, build_hamiltonian
from giant_ssh.spectral import LevelClass, basis_state, classify_levels, eigensolve, photon_distribution, sweep_theta, time_evolve
from giant_ssh.validation import overlay_deviation

PI = math.pi
Q = 1.0
THETAS = np.linspace(0.0, 2 * PI, 201)
FIG1 = SshParams(100, Q, 0.5, 0.0)
FIG1_AA = AtomCoupling("AA", 50, 51, 1.0)
FIG1_AB = AtomCoupling("AB", 50, 51, 1.0)
FIG3 = SshParams(100, Q, 0.5, 0.8 * PI)
FIG3_AA = AtomCoupling("AA", 50, 55, 1.0)
FIG3_AB = AtomCoupling("AB", 50, 55, 1.0)
FIG4 = SshParams(100, Q, 0.5, 0.4 * PI)
FIG4_AB = AtomCoupling("AB", 50, 51, 1.0)


@pytest.fixture(scope="module")
def aa_sweep():
    return sweep_theta(THETAS, FIG1, FIG1_AA)


@pytest.fixture(scope="module")
def ab_sweep():
    return sweep_theta(THETAS, FIG1, FIG1_AB)


def ph_defect(E):
    return float(np.max(np.abs(E + E[::-1])))


def test_01_zero_mode_always_present_aa(aa_sweep, criterion):
    worst = max(float(np.min(np.abs(r.energies))) for r in aa_sweep)
    ok = worst < 1e-10 * Q
    criterion("1", ok, f"max over theta of min|E| = {worst:.2e} (< 1e-10)")
    assert ok


def test_02_particle_hole_aa_and_breaking_ab(aa_sweep, ab_sweep, criterion):
    aa = max(ph_defect(r.energies) for r in aa_sweep)
    ab = min(ph_defect(r.energies) for r in ab_sweep)
    ok = aa < 1e-10 * Q and ab > 1e-3 * Q
    criterion("2", ok, f"AA max defect {aa:.2e} (< 1e-10); AB min defect {ab:.3g} (> 1e-3)")
    assert ok


def test_03_ab_zero_mode_phase_condition(ab_sweep, criterion):
    bad = []
    for r in ab_sweep:
        if min(abs(r.theta - PI / 2), abs(r.theta - 3 * PI / 2)) <= 0.02 * PI:
            continue
        has_zero = bool(np.min(np.abs(r.energies)) < 1e-8 * Q)
        if has_zero != (PI / 2 < r.theta < 3 * PI / 2):
            bad.append((r.theta / PI, float(np.min(np.abs(r.energies)))))
    ok = not bad
    detail = "all grid points agree" if ok else (
        f"{len(bad)} mismatches, e.g. theta={bad[0][0]:.3f}pi min|E|={bad[0][1]:.2e}"
    )
    criterion("3", ok, detail)
    assert ok, bad


def gap_level(params, atom):
    spec = eigensolve(build_hamiltonian(params, atom))
    classes = classify_levels(spec, params.t1, params.t2)
    gaps = [float(e) for e, c in zip(spec.energies, classes) if c is LevelClass.GAP and abs(e) > 1e-8 * Q]
    return gaps[0] if len(gaps) == 1 else None


def test_04_gap_state_parity_and_size(criterion):
    p = SshParams(100, Q, 0.5, 0.25 * PI)
    Eg = {d: gap_level(p, AtomCoupling("AB", 50, 50 + d, Q)) for d in (0, 2, 3, 5)}
    have = {d: e for d, e in Eg.items() if e is not None}
    parity = all((have[d] < 0) == (d % 2 == 0) for d in have)
    size_53 = 3 in have and 5 in have and abs(have[5]) < abs(have[3])
    size_20 = 2 in have and 0 in have and abs(have[2]) < abs(have[0])
    ok = len(have) == 4 and parity and size_53 and size_20
    shown = ", ".join(f"d={d}: {'none' if e is None else f'{e:+.4g}'}" for d, e in Eg.items())
    criterion("4", ok, f"E_g {shown}")
    assert ok, Eg


def test_05_ab_d0_no_lower_bound_state(criterion):
    trivial = THETAS[np.cos(THETAS) > 1e-9]
    rows = sweep_theta(trivial, FIG1, AtomCoupling("AB", 50, 50, 1.0))
    worst = min(float(r.energies[0] + (r.t1 + r.t2)) for r in rows)
    ok = worst >= -1e-6 * Q
    criterion("5", ok, f"min over theta of E_min + (t1+t2) = {worst:.2e} (>= -1e-6)")
    assert ok


def test_06_roots_match_eigensolve(criterion):
    worst, count = 0.0, 0
    for theta in THETAS[::10]:
        p = FIG1.with_theta(theta)
        for atom in (FIG1_AA, FIG1_AB):
            E = eigensolve(build_hamiltonian(p, atom)).energies
            roots = eigenvalue_roots(p, atom).roots
            for r, c in zip(roots, classify_levels(roots, p.t1, p.t2)):
                if c is not LevelClass.BULK:
                    count += 1
                    worst = max(worst, float(np.min(np.abs(E - r))))
    ok = count > 0 and worst < 1e-8 * Q
    criterion("6", ok, f"{count} non-bulk roots on 21 theta points, worst |root - E| = {worst:.2e} (< 1e-8)")
    assert ok


def test_07_analytic_profile_overlays(criterion):
    devs = {}
    for tag, atom, amp, zero in (("AA", FIG3_AA, amplitudes_AA, zero_mode_AA), ("AB", FIG3_AB, amplitudes_AB, zero_mode_AB)):
        spec = eigensolve(build_hamiltonian(FIG3, atom))
        for name, i in (("lower", 0), ("upper", spec.dim - 1)):
            num = photon_distribution(spec.state(i), spec.labels)
            devs[f"{tag}_{name}"] = overlay_deviation(num, amp(spec.energies[i], FIG3, atom))
        iz = spec.nearest(0.0)
        znum = photon_distribution(spec.state(iz), spec.labels)
        devs[f"{tag}_zero"] = overlay_deviation(znum, zero(FIG3, atom))
        if tag == "AA":
            a_weight = float(np.sum(np.abs(znum.A) ** 2))
            right_b = float(np.sum(np.abs(znum.B[atom.m - 1 :]) ** 2))
        else:
            ab_sym = symmetry_check(znum, "AB", atom.n, atom.m)
    worst = max(devs.values())
    ok = worst < 1e-6 and a_weight < 1e-12 and right_b < 1e-6 and ab_sym < 1e-8
    criterion(
        "7", ok,
        f"max overlay dev {worst:.1e} (< 1e-6); AA zero sum|A|^2 {a_weight:.1e} (< 1e-12), "
        f"sum_(l>=m)|B|^2 {right_b:.1e} (< 1e-6); AB zero mirror {ab_sym:.1e} (< 1e-8)",
    )
    assert ok, devs


def test_08_bound_state_mirror_symmetry(criterion):
    res = {}
    for atom in (FIG3_AA, FIG3_AB):
        spec = eigensolve(build_hamiltonian(FIG3, atom))
        for i in (0, spec.dim - 1):
            st = photon_distribution(spec.state(i), spec.labels)
            res[(atom.kind.value, i)] = symmetry_check(st, atom.kind, atom.n, atom.m)
    worst = max(res.values())
    ok = worst < 1e-8
    criterion("8", ok, f"max symmetry_check residual {worst:.1e} (< 1e-8)")
    assert ok


@pytest.fixture(scope="module")
def fig4_matrix():
    return effective_coupling_matrix(FIG4, FIG4_AB)


def test_09a_intra_dominates_inter(fig4_matrix, criterion):
    cm = fig4_matrix
    intra = max(np.nanmax(np.abs(cm.block(1, 1))), np.nanmax(np.abs(cm.block(-1, -1))))
    inter = max(np.nanmax(np.abs(cm.block(1, -1))), np.nanmax(np.abs(cm.block(-1, 1))))
    ratio = float(intra / inter)
    ok = ratio > 10
    criterion("9a", ok, f"max intra |G| / max inter |G| = {ratio:.3g} (> 10)")
    assert ok


def test_09b_ridge_on_antidiagonal(fig4_matrix, criterion):
    B = np.abs(fig4_matrix.block(1, 1))
    L = B.shape[0]
    off = []
    for j in range(L):
        # distance in grid steps from k' = 2π - k to the row maximum
        jp = int(np.argmax(B[j]))
        s = (j + jp) % L
        off.append(min(s, L - s))
    on_ridge = sum(o <= 1 for o in off)
    ok = on_ridge == L
    criterion("9b", ok, f"{on_ridge}/{L} rows of |G_(k+,k'+)| peak within one step of k+k'=2pi")
    assert ok


def test_09c_pair_coupling_peaks(criterion):
    thetas = np.linspace(0.0, 2 * PI, 801)
    curves = {k: pair_coupling_vs_theta(FIG4, FIG4_AB, k * PI, thetas) for k in (1.1, 1.3, 1.5)}
    c11 = curves[1.1]
    peaks = [int(i) for i in argrelextrema(c11, np.greater)[0]]
    peak_th = [float(thetas[i] / PI) for i in peaks]
    found = []
    for target in (0.4, 1.6):
        near = [i for i in peaks if abs(thetas[i] / PI - target) <= 0.05]
        found.append(bool(near) and all(c11[i] > max(curves[1.3][i], curves[1.5][i]) for i in near))
    ok = all(found)
    criterion("9c", ok, f"k=1.1pi peaks at theta/pi = {[round(t, 3) for t in peak_th]} (want 0.4 and 1.6 +/- 0.05)")
    assert ok


def test_10_effective_vs_exact_splitting(criterion):
    pairs = exact_pair_splittings(FIG4, AtomCoupling("AB", 50, 51, 0.2 * Q), sigma=1)
    top = sorted(pairs, key=lambda pc: pc.exact_splitting, reverse=True)[:10]
    errs = [pc.relative_error for pc in top]
    ok = max(errs) < 0.2
    criterion("10", ok, f"max relative error over ten most-split pairs {max(errs):.3f} (< 0.2)")
    assert ok


def test_11_probe_rabi(criterion):
    spec = eigensolve(build_hamiltonian(FIG3, FIG3_AA))
    zero = spec.state(spec.nearest(0.0))
    photon = [i for i, lab in enumerate(spec.labels) if lab != "atom"]
    site = max(photon, key=lambda i: abs(zero[i]))
    sub, cell = spec.labels[site]
    w = abs(zero[site])
    gp = 0.1 * Q
    period = PI / (gp * w)
    hm = build_hamiltonian(FIG3, FIG3_AA, ProbeConfig(True, sub, cell, gp))
    times = np.linspace(0.0, 4 * period, 4001)
    pop = time_evolve(hm, basis_state(hm, "probe"), times).population("probe")
    contrast = float(np.ptp(pop))
    minima = argrelextrema(pop, np.less, order=50)[0]
    measured = float(np.mean(np.diff(times[minima]))) if len(minima) > 1 else float("inf")
    rel = abs(measured - period) / period
    ok = contrast > 0.5 and rel < 0.15
    criterion(
        "11", ok,
        f"probe at {sub}{cell}, w={w:.4f}: contrast {contrast:.3f} (> 0.5), period {measured:.2f} vs {period:.2f} "
        f"(rel {rel:.3f} < 0.15)",
    )
    assert ok


def test_12_open_boundary(criterion):
    p = SshParams(100, Q, 0.5, 0.8 * PI, "open")
    bare = eigensolve(build_hamiltonian(p, AtomCoupling("none", 1, 1, 0.0)))
    near = np.flatnonzero(np.abs(bare.energies) < 1e-6 * Q)
    edge_weights = []
    for i in near:
        st = photon_distribution(bare.state(i), bare.labels)
        prob = np.abs(st.A) ** 2 + np.abs(st.B) ** 2
        edge_weights.append(float(prob[:10].sum() + prob[-10:].sum()))
    bare_ok = len(near) == 2 and min(edge_weights) >= 0.9

    spec = eigensolve(build_hamiltonian(p, FIG3_AA))
    cells = np.arange(1, p.L + 1)
    close = (np.abs(cells - FIG3_AA.n) <= 5) | (np.abs(cells - FIG3_AA.m) <= 5)
    atom_local = 0.0
    for i in np.flatnonzero(np.abs(spec.energies) < 1e-6 * Q):
        st = photon_distribution(spec.state(i), spec.labels)
        prob = np.abs(st.A) ** 2 + np.abs(st.B) ** 2
        atom_local = max(atom_local, float(prob[close].sum() / prob.sum()))
    ok = bare_ok and atom_local >= 0.9
    criterion(
        "12", ok,
        f"bare chain: {len(near)} near-zero levels, min edge weight {min(edge_weights, default=0):.6f} (>= 0.9); "
        f"with atom: best photon weight within 5 cells of n, m = {atom_local:.4f} (>= 0.9)",
    )
    assert ok


def test_13a_sweep_runtime(criterion):
    start = time.perf_counter()
    sweep_theta(THETAS, FIG1, FIG1_AB, workers=1)
    elapsed = time.perf_counter() - start
    ok = elapsed < 60.0
    criterion("13a", ok, f"201-point sweep single-threaded in {elapsed:.2f} s (< 60 s)")
    assert ok


def test_13b_parallel_speedup(criterion):
    cores = os.cpu_count() or 1
    if cores < 4:
        criterion("13b", None, f"only {cores} core(s) available; speedup on 4 cores not measurable")
        pytest.skip(f"needs 4 cores, found {cores}")
    thetas = np.linspace(0.0, 2 * PI, 801)
    t0 = time.perf_counter()
    serial = sweep_theta(thetas, FIG1, FIG1_AB, workers=1)
    t1 = time.perf_counter()
    parallel = sweep_theta(thetas, FIG1, FIG1_AB, workers=4)
    t2 = time.perf_counter()
    speedup = (t1 - t0) / (t2 - t1)
    same = all(np.array_equal(a.energies, b.energies) for a, b in zip(serial, parallel))
    ok = same and speedup >= 2.0
    criterion("13b", ok, f"4-worker speedup {speedup:.2f}x (>= 2)")
    assert ok
