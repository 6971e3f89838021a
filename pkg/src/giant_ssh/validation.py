"""Cross-validation of the closed forms against exact diagonalization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from giant_ssh.analytic import (
    amplitudes_AA,
    amplitudes_AB,
    eigenvalue_roots,
    symmetry_check,
    zero_mode_AA,
    zero_mode_AB,
)
from giant_ssh.lattice import AtomCoupling, CouplingKind, SshParams, build_hamiltonian
from giant_ssh.spectral import LevelClass, SingleExcitationState, classify_levels, eigensolve, photon_distribution


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    residual: float
    tolerance: float


def _check(name: str, residual: float, tol: float) -> CheckResult:
    return CheckResult(name, bool(residual < tol), float(residual), float(tol))


def overlay_deviation(numeric: SingleExcitationState, analytic: SingleExcitationState, floor: float = 1e-16) -> float:
    """Largest per-site amplitude mismatch over sites carrying probability above ``floor``."""
    a = numeric.normalized().as_vector()
    b = analytic.normalized().as_vector()
    mask = (np.abs(a) ** 2 > floor) | (np.abs(b) ** 2 > floor)
    return float(np.max(np.abs(a - b)[mask]))


def numeric_state(spec, i: int) -> SingleExcitationState:
    return photon_distribution(spec.state(i), spec.labels)


def run_validation(
    params: SshParams,
    atom_aa: AtomCoupling,
    atom_ab: AtomCoupling,
    t2_scale: float = 1.0,
    overlay_tol: float = 1e-6,
    symmetry_tol: float = 1e-8,
    ph_tol: float = 1e-10,
    root_tol: float = 1e-8,
) -> list[CheckResult]:
    """Analytic-vs-numeric overlays, mirror symmetries, particle-hole symmetry
    and root-vs-eigensolve agreement.

    ``t2_scale != 1`` builds the numerical model with a corrupted inter-cell
    hopping while the closed forms keep the nominal one (negative control).
    """
    hop = (params.t1, params.t2 * t2_scale)
    q = params.q
    out = []
    for atom, amp, zero in ((atom_aa, amplitudes_AA, zero_mode_AA), (atom_ab, amplitudes_AB, zero_mode_AB)):
        tag = atom.kind.value
        spec = eigensolve(build_hamiltonian(params, atom, hoppings=hop))
        E = spec.energies
        for label, i in (("bound_lower", 0), ("bound_upper", spec.dim - 1)):
            num = numeric_state(spec, i)
            try:
                ana = amp(E[i], params, atom)
                dev = overlay_deviation(num, ana)
            except Exception:
                dev = float("inf")
            out.append(_check(f"overlay_{tag}_{label}", dev, overlay_tol))
            out.append(_check(f"symmetry_{tag}_{label}", symmetry_check(num, atom.kind, atom.n, atom.m, params.periodic), symmetry_tol))
        if params.t2 > params.t1:
            i0 = spec.nearest(0.0)
            try:
                dev = overlay_deviation(numeric_state(spec, i0), zero(params, atom))
            except Exception:
                dev = float("inf")
            out.append(_check(f"overlay_{tag}_zero_mode", dev, overlay_tol))
        if atom.kind is CouplingKind.AA:
            out.append(_check("particle_hole_AA", float(np.max(np.abs(E + E[::-1]))) / q, ph_tol))
        roots = eigenvalue_roots(params, atom).roots
        classes = classify_levels(roots, params.t1, params.t2)
        worst = 0.0
        for r, c in zip(roots, classes):
            if c is not LevelClass.BULK:
                worst = max(worst, float(np.min(np.abs(E - r))))
        out.append(_check(f"roots_vs_eigensolve_{tag}", worst / q, root_tol))
    return out
