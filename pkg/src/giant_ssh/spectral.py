"""Exact diagonalization, θ-sweeps, level classification and dynamics."""

from __future__ import annotations

import hashlib
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Hashable, Sequence

import numpy as np

from giant_ssh.errors import InputError, NumericError
from giant_ssh.lattice import (
    NO_PROBE,
    AtomCoupling,
    HamiltonianMatrix,
    ProbeConfig,
    SshParams,
    build_hamiltonian,
)

logger = logging.getLogger(__name__)


class LevelClass(str, Enum):
    BULK = "bulk"
    GAP = "gap"
    BOUND = "bound"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class SpectrumResult:
    energies: np.ndarray
    states: np.ndarray  # columns are eigenvectors
    labels: tuple[Hashable, ...]
    params: SshParams
    atom: AtomCoupling
    probe: ProbeConfig = NO_PROBE

    @property
    def dim(self) -> int:
        return len(self.energies)

    def state(self, i: int) -> np.ndarray:
        return self.states[:, i]

    def nearest(self, energy: float) -> int:
        return int(np.argmin(np.abs(self.energies - energy)))


@dataclass(frozen=True)
class SingleExcitationState:
    """Amplitudes of one single-excitation state, ``A[l-1]`` is cell ``l``."""

    U_e: complex
    A: np.ndarray
    B: np.ndarray
    probe: complex | None = None

    @property
    def L(self) -> int:
        return len(self.A)

    def norm_squared(self) -> float:
        total = abs(self.U_e) ** 2 + np.sum(np.abs(self.A) ** 2) + np.sum(np.abs(self.B) ** 2)
        if self.probe is not None:
            total += abs(self.probe) ** 2
        return float(total)

    def normalized(self) -> "SingleExcitationState":
        """Unit-norm copy with the global phase fixed so that ``U_e > 0``.

        When ``U_e`` vanishes the largest photon amplitude is made positive.
        """
        nrm = np.sqrt(self.norm_squared())
        if nrm == 0:
            raise NumericError("cannot normalize a zero state")
        vec = self.as_vector()
        ref = self.U_e if abs(self.U_e) > 1e-14 * nrm else vec[np.argmax(np.abs(vec))]
        phase = ref / abs(ref)
        scale = 1.0 / (nrm * phase)
        return SingleExcitationState(
            self.U_e * scale,
            self.A * scale,
            self.B * scale,
            None if self.probe is None else self.probe * scale,
        )

    def as_vector(self) -> np.ndarray:
        """Amplitudes in the fixed lattice layout (A/B interleaved, atom, probe)."""
        photons = np.empty(2 * self.L, dtype=np.result_type(self.A, self.B))
        photons[0::2] = self.A
        photons[1::2] = self.B
        tail = [self.U_e] if self.probe is None else [self.U_e, self.probe]
        return np.concatenate([photons, np.asarray(tail, dtype=photons.dtype)])

    def sublattice_weight(self, which: str) -> float:
        amps = self.A if which == "A" else self.B
        return float(np.sum(np.abs(amps) ** 2))


def _fingerprint(matrix: np.ndarray) -> str:
    return hashlib.sha1(np.ascontiguousarray(matrix).tobytes()).hexdigest()[:12]


def fix_signs(states: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude component of each column real positive."""
    idx = np.argmax(np.abs(states), axis=0)
    pivots = states[idx, np.arange(states.shape[1])]
    return states * (np.abs(pivots) / pivots)[None, :]


def eigensolve(hm: HamiltonianMatrix) -> SpectrumResult:
    """Full spectrum in ascending order with sign-fixed orthonormal eigenvectors."""
    h = hm.matrix
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise InputError(f"Hamiltonian must be square, got shape {h.shape}")
    if not np.array_equal(h, h.conj().T):
        raise InputError("Hamiltonian is not symmetric")
    try:
        energies, states = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigensolve failed for matrix {_fingerprint(h)}: {exc}") from exc
    states = fix_signs(states)
    return SpectrumResult(energies, states, hm.labels, hm.params, hm.atom, hm.probe)


def band_edges(t1: float, t2: float) -> tuple[float, float]:
    return abs(t1 - t2), t1 + t2


def classify_levels(
    energies: Sequence[float] | SpectrumResult,
    t1: float,
    t2: float,
    eps: float = 1e-6,
    gap_floor: float = 1e-3,
) -> list[LevelClass]:
    """Bulk / gap / bound classification against the bare band edges.

    Levels at or below the inner edge are flagged indeterminate when the gap
    itself is narrower than ``gap_floor`` (near t1 = t2).
    """
    if not eps > 0:
        raise InputError(f"eps must be positive, got {eps}")
    if isinstance(energies, SpectrumResult):
        energies = energies.energies
    inner, outer = band_edges(t1, t2)
    out = []
    for e in np.abs(np.asarray(energies, dtype=float)):
        if e > outer + eps:
            out.append(LevelClass.BOUND)
        elif inner < gap_floor and e <= inner + eps:
            out.append(LevelClass.INDETERMINATE)
        elif e < inner - eps:
            out.append(LevelClass.GAP)
        else:
            out.append(LevelClass.BULK)
    return out


@dataclass(frozen=True)
class SweepRow:
    theta: float
    energies: np.ndarray
    classes: tuple[LevelClass, ...]
    t1: float
    t2: float


def _sweep_point(args) -> SweepRow:
    theta, params, atom, probe, eps = args
    p = params.with_theta(theta)
    try:
        spec = eigensolve(build_hamiltonian(p, atom, probe))
    except NumericError as exc:
        raise NumericError(f"theta={theta!r}: {exc}") from exc
    return SweepRow(theta, spec.energies, tuple(classify_levels(spec.energies, p.t1, p.t2, eps)), p.t1, p.t2)


def sweep_theta(
    thetas: Sequence[float],
    params: SshParams,
    atom: AtomCoupling,
    probe: ProbeConfig = NO_PROBE,
    eps: float = 1e-6,
    workers: int | None = 1,
) -> list[SweepRow]:
    """Spectrum at every θ of an ascending grid, rows returned in grid order.

    ``workers > 1`` distributes points over a process pool; ``None`` uses every
    available core.
    """
    thetas = [float(t) for t in thetas]
    if not thetas:
        raise InputError("theta grid is empty")
    if any(b <= a for a, b in zip(thetas, thetas[1:])):
        raise InputError("theta grid must be strictly ascending")
    jobs = [(t, params, atom, probe, eps) for t in thetas]
    if workers is None:
        workers = os.cpu_count() or 1
    if workers <= 1:
        return [_sweep_point(j) for j in jobs]
    chunk = max(1, len(jobs) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sweep_point, jobs, chunksize=chunk))


@dataclass(frozen=True)
class PairSplitting:
    band: str
    lower: float
    upper: float

    @property
    def splitting(self) -> float:
        return self.upper - self.lower


@dataclass(frozen=True)
class DegeneracyReport:
    pairs: tuple[PairSplitting, ...]
    singles: tuple[float, ...]

    def band(self, name: str) -> list[PairSplitting]:
        return [p for p in self.pairs if p.band == name]

    def stats(self, name: str) -> dict[str, float]:
        s = np.array([p.splitting for p in self.band(name)])
        if s.size == 0:
            return {"count": 0, "min": float("nan"), "max": float("nan"), "mean": float("nan")}
        return {"count": int(s.size), "min": float(s.min()), "max": float(s.max()), "mean": float(s.mean())}


def _pair_levels(levels: np.ndarray, tolerance: float) -> tuple[list[tuple[int, int]], list[int]]:
    # Minimum-cost pairing of neighbours in a sorted list; leaving a level
    # unpaired costs `tolerance`.
    n = len(levels)
    cost = np.zeros(n + 1)
    choice = [0] * (n + 1)
    for i in range(1, n + 1):
        cost[i] = cost[i - 1] + tolerance
        choice[i] = 1
        if i >= 2:
            c = cost[i - 2] + (levels[i - 1] - levels[i - 2])
            if c < cost[i]:
                cost[i] = c
                choice[i] = 2
    pairs, singles = [], []
    i = n
    while i > 0:
        if choice[i] == 2:
            pairs.append((i - 2, i - 1))
            i -= 2
        else:
            singles.append(i - 1)
            i -= 1
    return pairs[::-1], singles[::-1]


def degeneracy_report(
    spectrum: SpectrumResult | Sequence[float],
    t1: float,
    t2: float,
    tolerance: float,
    eps: float = 1e-6,
) -> DegeneracyReport:
    """Pair up neighbouring bulk levels of each band and report their splittings.

    ``tolerance`` is the largest splitting still worth calling a pair; levels
    whose nearest neighbour is further away are reported as singles (the
    ``k = 0`` and ``k = π`` states of the bare chain).
    """
    if not tolerance > 0:
        raise InputError(f"tolerance must be positive, got {tolerance}")
    energies = np.asarray(spectrum.energies if isinstance(spectrum, SpectrumResult) else spectrum, dtype=float)
    classes = classify_levels(energies, t1, t2, eps)
    bulk = np.array([e for e, c in zip(energies, classes) if c is LevelClass.BULK])
    pairs, singles = [], []
    for name, levels in (("lower", np.sort(bulk[bulk < 0])), ("upper", np.sort(bulk[bulk > 0]))):
        pr, sg = _pair_levels(levels, tolerance)
        pairs += [PairSplitting(name, levels[i], levels[j]) for i, j in pr]
        singles += [levels[i] for i in sg]
    return DegeneracyReport(tuple(pairs), tuple(singles))


def photon_distribution(vector: np.ndarray, labels: Sequence[Hashable]) -> SingleExcitationState:
    """Reindex a state vector by (sublattice, cell)."""
    vector = np.asarray(vector)
    if len(vector) != len(labels):
        raise InputError(f"vector length {len(vector)} does not match layout size {len(labels)}")
    L = sum(1 for lab in labels if isinstance(lab, tuple) and lab[0] == "A")
    A = np.zeros(L, dtype=vector.dtype)
    B = np.zeros(L, dtype=vector.dtype)
    U_e = 0.0
    probe = None
    for amp, lab in zip(vector, labels):
        if lab == "atom":
            U_e = amp
        elif lab == "probe":
            probe = amp
        elif lab[0] == "A":
            A[lab[1] - 1] = amp
        else:
            B[lab[1] - 1] = amp
    return SingleExcitationState(U_e, A, B, probe)


@dataclass(frozen=True)
class Evolution:
    times: np.ndarray
    amplitudes: np.ndarray  # (n_times, dim)
    labels: tuple[Hashable, ...]
    energies: np.ndarray  # ⟨H⟩ at each time

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def population(self, label: Hashable) -> np.ndarray:
        return self.populations[:, self.labels.index(label)]


def time_evolve(
    hm: HamiltonianMatrix,
    psi0: np.ndarray,
    times: Sequence[float],
    spectrum: SpectrumResult | None = None,
) -> Evolution:
    """Propagate ``psi0`` with ``exp(-iHt)`` through the eigendecomposition."""
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or np.any(np.diff(times) < 0):
        raise InputError("times must be a 1-D ascending grid")
    psi0 = np.asarray(psi0, dtype=complex)
    if abs(np.vdot(psi0, psi0).real - 1.0) > 1e-10:
        raise InputError("initial state is not normalized")
    spec = spectrum if spectrum is not None else eigensolve(hm)
    v, e = spec.states, spec.energies
    coeff = v.conj().T @ psi0
    phases = np.exp(-1j * np.outer(times, e))
    amps = (phases * coeff[None, :]) @ v.T
    energy = np.einsum("ti,ti->t", amps.conj(), amps @ hm.matrix).real
    return Evolution(times, amps, hm.labels, energy)


def basis_state(hm: HamiltonianMatrix, label: Hashable) -> np.ndarray:
    psi = np.zeros(hm.dim, dtype=complex)
    psi[hm.index[label]] = 1.0
    return psi
