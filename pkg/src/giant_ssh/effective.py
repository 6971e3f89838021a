"""Momentum-space picture and second-order elimination of the giant atom.

Band modes are labelled ``(j, σ)`` with ``k = 2πj/L`` and ``σ = ±1``. The
atom-mode couplings use the band eigenvectors in the gauge where the B
component is real.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from giant_ssh.analytic import dispersion, k_grid
from giant_ssh.errors import InputError, NumericError
from giant_ssh.lattice import AtomCoupling, CouplingKind, SshParams, build_hamiltonian
from giant_ssh.spectral import eigensolve

logger = logging.getLogger(__name__)


def band_basis(k: float, t1: float, t2: float, tol: float = 1e-14):
    """Energies ``(+ω_k, −ω_k)`` and cell-basis eigenvectors (columns, A first).

    Eigenvectors of ``[[0, t1 + t2 e^{-ik}], [t1 + t2 e^{ik}, 0]]`` with the A
    component real positive.
    """
    h = t1 + t2 * np.exp(-1j * k)
    w = abs(h)
    if w < tol:
        raise NumericError(f"bands touch at k={k!r}: no unique band basis")
    phase = np.conj(h) / w
    vecs = np.array([[1.0, 1.0], [phase, -phase]]) / np.sqrt(2.0)
    return (w, -w), vecs


def bloch_matrix(k: float, t1: float, t2: float) -> np.ndarray:
    h = t1 + t2 * np.exp(-1j * k)
    return np.array([[0.0, h], [np.conj(h), 0.0]])


@dataclass(frozen=True)
class ModeCoupling:
    k: float
    sigma: int
    value: complex


def _coupling(k, sigma, params: SshParams, atom: AtomCoupling, strict: bool = True):
    t1, t2, L = params.t1, params.t2, params.L
    w = dispersion(k, t1, t2)
    touch = w == 0
    if strict and np.any(touch):
        raise NumericError("atom-mode coupling undefined where the bands touch")
    with np.errstate(invalid="ignore", divide="ignore"):
        lead = np.where(touch, np.nan, w / (t1 + t2 * np.exp(1j * k)))
    pre = atom.g / np.sqrt(2 * L)
    if atom.kind is CouplingKind.AB:
        return pre * (lead * np.exp(1j * k * atom.n) + sigma * np.exp(1j * k * atom.m))
    if atom.kind is CouplingKind.AA:
        return pre * lead * (np.exp(1j * k * atom.n) + np.exp(1j * k * atom.m)) * np.ones_like(sigma)
    raise InputError("no atom attached")


def atom_mode_coupling_AB(k: float, sigma: int, params: SshParams, atom: AtomCoupling) -> ModeCoupling:
    if atom.kind is not CouplingKind.AB:
        raise InputError("atom_mode_coupling_AB needs an A-B coupling")
    return ModeCoupling(k, sigma, complex(_coupling(k, sigma, params, atom)))


def atom_mode_coupling_AA(k: float, sigma: int, params: SshParams, atom: AtomCoupling) -> ModeCoupling:
    if atom.kind is not CouplingKind.AA:
        raise InputError("atom_mode_coupling_AA needs an A-A coupling")
    return ModeCoupling(k, sigma, complex(_coupling(k, sigma, params, atom)))


@dataclass(frozen=True)
class BandModes:
    """All ``2L`` band modes, upper band first: index ``j`` is ``(k_j, +)``,
    index ``L + j`` is ``(k_j, −)``."""

    k: np.ndarray
    sigma: np.ndarray
    energy: np.ndarray
    g: np.ndarray

    @property
    def size(self) -> int:
        return len(self.k)

    def index(self, j: int, sigma: int) -> int:
        L = self.size // 2
        return j % L if sigma > 0 else L + j % L


def band_modes(params: SshParams, atom: AtomCoupling) -> BandModes:
    k = k_grid(params.L)
    w = dispersion(k, params.t1, params.t2)
    kk = np.concatenate([k, k])
    sig = np.concatenate([np.ones(params.L, int), -np.ones(params.L, int)])
    energy = np.concatenate([w, -w])
    # touching modes get NaN couplings; callers exclude them by energy
    g = _coupling(kk, sig, params, atom, strict=False)
    return BandModes(kk, sig, energy, g)


def momentum_hamiltonian(params: SshParams, atom: AtomCoupling) -> np.ndarray:
    """Band-diagonal photon block bordered by the atom row ``⟨e|H|kσ⟩ = g_{kσ}``."""
    modes = band_modes(params, atom)
    n = modes.size
    h = np.zeros((n + 1, n + 1), dtype=complex)
    h[np.arange(n), np.arange(n)] = modes.energy
    h[n, :n] = modes.g
    h[:n, n] = modes.g.conj()
    return h


def _g_matrix(energy: np.ndarray, g: np.ndarray) -> np.ndarray:
    # ⟨kσ|V|e⟩⟨e|V|k'σ'⟩ (1/E + 1/E') / 2
    with np.errstate(divide="ignore"):
        inv = 1.0 / energy
    return 0.5 * np.outer(g.conj(), g) * (inv[:, None] + inv[None, :])


@dataclass(frozen=True)
class EffectiveCoupling:
    mode: tuple[float, int]
    mode_prime: tuple[float, int]
    G: complex


def effective_coupling(k: float, sigma: int, kp: float, sigma_p: int, params: SshParams, atom: AtomCoupling) -> EffectiveCoupling:
    """Second-order photon-photon coupling through the eliminated atom."""
    e1 = sigma * dispersion(k, params.t1, params.t2)
    e2 = sigma_p * dispersion(kp, params.t1, params.t2)
    if e1 == 0 or e2 == 0:
        raise NumericError("elimination undefined for a zero-energy band mode")
    g1 = _coupling(k, sigma, params, atom)
    g2 = _coupling(kp, sigma_p, params, atom)
    G = 0.5 * np.conj(g1) * g2 * (1.0 / e1 + 1.0 / e2)
    return EffectiveCoupling((k, sigma), (kp, sigma_p), complex(G))


@dataclass(frozen=True)
class CouplingMatrix:
    modes: BandModes
    G: np.ndarray
    excluded: tuple[int, ...]

    def block(self, sigma: int, sigma_p: int) -> np.ndarray:
        L = self.modes.size // 2
        r = slice(0, L) if sigma > 0 else slice(L, 2 * L)
        c = slice(0, L) if sigma_p > 0 else slice(L, 2 * L)
        return self.G[r, c]

    def hermiticity_defect(self) -> float:
        G = np.nan_to_num(self.G)
        return float(np.max(np.abs(G - G.conj().T)))


def effective_coupling_matrix(params: SshParams, atom: AtomCoupling, zero_tol: float = 1e-12) -> CouplingMatrix:
    """``G`` over all ``2L`` band modes; zero-energy modes get NaN rows."""
    modes = band_modes(params, atom)
    excluded = tuple(int(i) for i in np.flatnonzero(np.abs(modes.energy) < zero_tol))
    if excluded:
        warnings.warn(f"{len(excluded)} zero-energy band mode(s) excluded from elimination", RuntimeWarning)
    G = _g_matrix(np.where(np.abs(modes.energy) < zero_tol, np.nan, modes.energy), modes.g)
    return CouplingMatrix(modes, G, excluded)


def pair_coupling(params: SshParams, atom: AtomCoupling, k: float, sigma: int = 1) -> complex:
    """``G_{kσ,(2π−k)σ}``, the coupling between the two degenerate partners."""
    return effective_coupling(k, sigma, 2 * np.pi - k, sigma, params, atom).G


def pair_coupling_vs_theta(params: SshParams, atom: AtomCoupling, k: float, thetas, sigma: int = 1) -> np.ndarray:
    return np.array([abs(pair_coupling(params.with_theta(t), atom, k, sigma)) for t in thetas])


@dataclass(frozen=True)
class EffectiveReport:
    h_eff: np.ndarray
    modes: BandModes
    kept: np.ndarray
    eff_energies: np.ndarray
    matched_exact: np.ndarray
    max_ratio: float
    excluded: tuple[int, ...]

    @property
    def deviations(self) -> np.ndarray:
        return np.abs(self.eff_energies - self.matched_exact)

    @property
    def max_deviation(self) -> float:
        return float(self.deviations.max())


def build_effective_hamiltonian(
    params: SshParams,
    atom: AtomCoupling,
    max_ratio: float = 0.3,
    warn_ratio: float = 0.1,
    zero_tol: float = 1e-12,
) -> EffectiveReport:
    """``H_eff = diag(E_kσ) + G`` plus a comparison with the exact photon-like levels.

    Refuses to build when some retained mode has ``|g_kσ| / |E_kσ| >= max_ratio``.
    """
    modes = band_modes(params, atom)
    kept = np.flatnonzero(np.abs(modes.energy) >= zero_tol)
    excluded = tuple(int(i) for i in np.flatnonzero(np.abs(modes.energy) < zero_tol))
    energy, g = modes.energy[kept], modes.g[kept]
    ratio = float(np.max(np.abs(g) / np.abs(energy)))
    if ratio >= max_ratio:
        raise NumericError(f"elimination not justified: max |g|/|E| = {ratio:.3g} >= {max_ratio}")
    if ratio > warn_ratio:
        logger.warning("max |g|/|E| = %.3g exceeds %.3g; second-order elimination is marginal", ratio, warn_ratio)
    h = np.diag(energy).astype(complex) + _g_matrix(energy, g)
    eff = np.linalg.eigvalsh(h)

    hm = build_hamiltonian(params, atom)
    spec = eigensolve(hm)
    # drop the level that carries the eliminated atom, then pair the rest in order
    atom_weight = np.abs(spec.states[hm.index["atom"]]) ** 2
    rest = np.delete(spec.energies, int(np.argmax(atom_weight)))
    if len(kept) == len(rest):
        matched = rest
    else:
        matched = rest[np.argmin(np.abs(eff[:, None] - rest[None, :]), axis=1)]
    return EffectiveReport(h, modes, kept, eff, matched, ratio, excluded)


@dataclass(frozen=True)
class PairComparison:
    j: int
    sigma: int
    omega: float
    exact_splitting: float
    predicted_splitting: float

    @property
    def relative_error(self) -> float:
        return abs(self.predicted_splitting - self.exact_splitting) / self.exact_splitting


def exact_pair_splittings(params: SshParams, atom: AtomCoupling, sigma: int = 1) -> list[PairComparison]:
    """Exact splitting of every degenerate pair ``(k, 2π−k)`` of one band.

    The partner combination orthogonal to the atom coupling stays at ``σω_k``;
    the bright level is the other eigenvector with the largest weight in the
    pair's subspace. Prediction: ``2|G_{kσ,(2π−k)σ}|``.
    """
    spec = eigensolve(build_hamiltonian(params, atom))
    L, t1, t2 = params.L, params.t1, params.t2
    cells = np.arange(1, L + 1)
    out = []
    for j in range(1, (L + 1) // 2):
        if 2 * j == L:
            continue
        k = 2 * np.pi * j / L
        vecs = []
        for kk in (k, -k):
            (_, _), basis = band_basis(kk, t1, t2)
            col = basis[:, 0 if sigma > 0 else 1]
            u = np.zeros(spec.dim, dtype=complex)
            u[0 : 2 * L : 2] = col[0] * np.exp(1j * kk * cells) / np.sqrt(L)
            u[1 : 2 * L : 2] = col[1] * np.exp(1j * kk * cells) / np.sqrt(L)
            vecs.append(u)
        P = np.array(vecs)
        weight = np.sum(np.abs(P.conj() @ spec.states) ** 2, axis=0)
        omega = sigma * dispersion(k, t1, t2)
        top = np.argsort(weight)[::-1][:2]
        dark = top[np.argmin(np.abs(spec.energies[top] - omega))]
        bright = next(i for i in np.argsort(weight)[::-1] if i != dark)
        exact = abs(spec.energies[bright] - spec.energies[dark])
        pred = 2 * abs(pair_coupling(params, atom, k, sigma))
        out.append(PairComparison(j, sigma, float(omega), float(exact), float(pred)))
    return out
