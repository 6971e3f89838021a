"""Closed-form results: dispersion, winding, eigenvalue conditions, profiles.

The eigenvalue conditions are evaluated as finite-L sums over the ring momenta
``k = 2πj/L`` (what exact diagonalization must reproduce), with the continuum
integral available as the large-L limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize

from giant_ssh.errors import InputError, NumericError, PoleError
from giant_ssh.lattice import AtomCoupling, CouplingKind, SshParams
from giant_ssh.spectral import SingleExcitationState


def k_grid(L: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(L) / L


def dispersion(k, t1: float, t2: float):
    """Upper-band energy ``ω_k``; the bands are ``±ω_k``."""
    w2 = t1 * t1 + t2 * t2 + 2.0 * t1 * t2 * np.cos(k)
    return np.sqrt(np.maximum(w2, 0.0))


@dataclass(frozen=True)
class WindingResult:
    winding: int | None
    gap: float

    @property
    def defined(self) -> bool:
        return self.winding is not None


def winding_number(t1: float, t2: float, resolution: int = 1000, tol: float = 1e-9) -> WindingResult:
    """Winding of ``h(k) = t1 + t2 e^{ik}`` around the origin over the Brillouin zone."""
    if resolution < 100:
        raise InputError(f"resolution must be >= 100, got {resolution}")
    k = np.linspace(0.0, 2.0 * np.pi, resolution + 1)
    h = t1 + t2 * np.exp(1j * k)
    gap = float(np.min(np.abs(h)))
    if gap < tol or abs(t1 - t2) < tol:
        return WindingResult(None, gap)
    phase = np.unwrap(np.angle(h))
    w = int(round((phase[-1] - phase[0]) / (2.0 * np.pi)))
    expected = 1 if abs(t2) > abs(t1) else 0
    if w != expected:
        raise NumericError(f"winding integral gave {w}, expected {expected} for t1={t1}, t2={t2}")
    return WindingResult(w, gap)


# --- eigenvalue conditions -------------------------------------------------


def _pole_check(E: float, w: np.ndarray, k: np.ndarray, tol: float) -> None:
    dist = np.abs(E * E - w * w)
    j = int(np.argmin(dist))
    if dist[j] < tol:
        raise PoleError(f"E={E!r} sits on the band pole at k={k[j]!r}", float(k[j]))


def _numerator(E: float, k, params: SshParams, atom: AtomCoupling):
    d = atom.m - atom.n
    if atom.kind is CouplingKind.AA:
        return E * (1.0 + np.cos(k * d))
    t1, t2 = params.t1, params.t2
    return E + t1 * np.cos(k * d) + t2 * np.cos(k * (-d - 1))


def _self_consistency(E, params, atom, continuum, pole_tol):
    t1, t2, g = params.t1, params.t2, atom.g
    if continuum:
        f = lambda k: _numerator(E, k, params, atom) / (E * E - dispersion(k, t1, t2) ** 2)
        lo, hi = abs(t1 - t2), t1 + t2
        if lo - pole_tol <= abs(E) <= hi + pole_tol:
            raise PoleError(f"E={E!r} lies inside the continuum band", float("nan"))
        val, _ = integrate.quad(f, -np.pi, np.pi, limit=400, epsabs=1e-13, epsrel=1e-13)
        return E - g * g / np.pi * val
    k = k_grid(params.L)
    w = dispersion(k, t1, t2)
    _pole_check(E, w, k, pole_tol)
    s = np.sum(_numerator(E, k, params, atom) / (E * E - w * w))
    return E - 2.0 * g * g / params.L * s


def self_consistency_AA(E: float, params: SshParams, atom: AtomCoupling, continuum: bool = False, pole_tol: float = 1e-12) -> float:
    """``E − Σ(E)`` for legs on two A sites; zero exactly at eigenvalues.

    ``Σ(E) = (2g²/L) Σ_k E(1 + cos kd) / (E² − ω_k²)``.
    """
    if atom.kind is not CouplingKind.AA:
        raise InputError("self_consistency_AA needs an A-A coupling")
    return float(_self_consistency(E, params, atom, continuum, pole_tol))


def self_consistency_AB(E: float, params: SshParams, atom: AtomCoupling, continuum: bool = False, pole_tol: float = 1e-12) -> float:
    """``E − (2g²/L) Σ_k (E + Q_k) / (E² − ω_k²)`` with ``Q_k = t1 cos kd + t2 cos k(d+1)``."""
    if atom.kind is not CouplingKind.AB:
        raise InputError("self_consistency_AB needs an A-B coupling")
    return float(_self_consistency(E, params, atom, continuum, pole_tol))


def self_consistency(params: SshParams, atom: AtomCoupling, continuum: bool = False) -> Callable[[float], float]:
    fn = self_consistency_AA if atom.kind is CouplingKind.AA else self_consistency_AB
    return lambda E: fn(E, params, atom, continuum)


@dataclass(frozen=True)
class RootReport:
    roots: tuple[float, ...]
    brackets: tuple[tuple[float, float], ...]
    residuals: tuple[float, ...]


def default_intervals(params: SshParams, atom: AtomCoupling, margin: float = 1e-9) -> list[tuple[float, float]]:
    """Gap interval plus the two regions outside the bands.

    Bound states cannot lie beyond ``t1 + t2 + 2g`` (Gershgorin), so the outer
    brackets stop a little past that.
    """
    inner, outer = abs(params.t1 - params.t2), params.t1 + params.t2
    m = margin * params.q
    reach = outer + 2.0 * atom.g + params.q
    out = [(-reach, -outer - m)]
    if inner > 2 * m:
        out.append((-inner + m, inner - m))
    out.append((outer + m, reach))
    return out


def find_roots(
    fn: Callable[[float], float],
    intervals: Sequence[tuple[float, float]],
    samples: int = 400,
    xtol: float = 1e-15,
) -> RootReport:
    """All sign-change roots of ``fn`` on each pole-free interval.

    Each interval is scanned on a uniform grid; every sign change is refined
    with Brent's method. Exact zeros on grid points count as roots.
    """
    roots, brackets = [], []
    for lo, hi in intervals:
        if not hi > lo:
            continue
        xs = np.linspace(lo, hi, samples + 1)
        fs = np.array([fn(x) for x in xs])
        for i in range(samples + 1):
            if fs[i] == 0.0:
                roots.append(float(xs[i]))
                brackets.append((float(xs[i]), float(xs[i])))
            if i < samples and fs[i] * fs[i + 1] < 0:
                r = optimize.brentq(fn, xs[i], xs[i + 1], xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)
                roots.append(float(r))
                brackets.append((float(xs[i]), float(xs[i + 1])))
    order = np.argsort(roots)
    roots = [roots[i] for i in order]
    brackets = [brackets[i] for i in order]
    return RootReport(tuple(roots), tuple(brackets), tuple(float(fn(r)) for r in roots))


def eigenvalue_roots(params: SshParams, atom: AtomCoupling, **kw) -> RootReport:
    return find_roots(self_consistency(params, atom), default_intervals(params, atom), **kw)


# --- amplitude profiles ----------------------------------------------------


@dataclass(frozen=True)
class AmplitudeContext:
    """Auxiliary quantities of the closed-form profiles at energy E.

    ``T``, ``Y1``, ``Y2`` carry a 1/L normalization; the profile
    functions multiply by ``L`` to express amplitudes relative to ``U_e`` in
    the lattice basis.
    """

    E: float
    L: int
    t1: float
    t2: float
    g: float
    T: float = field(init=False)
    Y1: float = field(init=False)
    Y2: float = field(init=False)
    x: float = field(init=False)
    a: float = field(init=False)
    tau: float = field(init=False)
    root: float = field(init=False)

    def __post_init__(self):
        E, L, t1, t2, g = self.E, self.L, self.t1, self.t2, self.g
        x = (E * E - t1 * t1 - t2 * t2) / (t1 * t2)
        if not abs(x) > 2.0:
            raise NumericError(f"|x| = {abs(x):.6g} <= 2: bulk energies have no decaying closed form")
        s = math.sqrt(x * x - 4.0)
        a = (x - s) / 2.0 if x > 2.0 else (x + s) / 2.0
        vals = dict(
            T=g * E / (L * t1 * t2),
            Y1=g / (L * t2),
            Y2=g / (L * t1),
            x=x,
            a=a,
            tau=t1 / t2,
            # signed square root: x - 2a has the sign of x
            root=x - 2.0 * a,
        )
        for k, v in vals.items():
            object.__setattr__(self, k, v)

    @classmethod
    def at(cls, E: float, params: SshParams, atom: AtomCoupling) -> "AmplitudeContext":
        return cls(E, params.L, params.t1, params.t2, atom.g)


def displacement(l, ref: int, L: int, periodic: bool = True):
    """``l − ref``, folded to the minimum image in (−L/2, L/2] on a ring."""
    r = np.asarray(l) - ref
    if periodic:
        c = L // 2 - 1 if L % 2 == 0 else L // 2
        r = np.mod(r + c, L) - c
    return r


def _cells(L: int) -> np.ndarray:
    return np.arange(1, L + 1)


def _finish(U_e, A, B) -> SingleExcitationState:
    return SingleExcitationState(U_e, np.asarray(A, float), np.asarray(B, float)).normalized()


def amplitudes_AA(E: float, params: SshParams, atom: AtomCoupling) -> SingleExcitationState:
    """Normalized profile of an A-A state outside the bands (or the zero mode)."""
    if atom.kind is not CouplingKind.AA:
        raise InputError("amplitudes_AA needs an A-A coupling")
    if E == 0.0:
        return zero_mode_AA(params, atom)
    c = AmplitudeContext.at(E, params, atom)
    L, n, m = params.L, atom.n, atom.m
    l = _cells(L)
    pw = lambda ref, off=0: c.a ** np.abs(displacement(l + off, ref, L, params.periodic))
    A = L * c.T / c.root * (pw(n) + pw(m))
    # A_l Y1 / T written without dividing by T
    B = L * c.Y1 / c.root * (pw(n) + pw(m)) + L * c.Y2 / c.root * (pw(n, 1) + pw(m, 1))
    return _finish(1.0, A, B)


def amplitudes_AB(E: float, params: SshParams, atom: AtomCoupling) -> SingleExcitationState:
    """Normalized profile of an A-B state outside the bands or inside the gap."""
    if atom.kind is not CouplingKind.AB:
        raise InputError("amplitudes_AB needs an A-B coupling")
    c = AmplitudeContext.at(E, params, atom)
    L, n, m = params.L, atom.n, atom.m
    l = _cells(L)
    pw = lambda ref, off=0: c.a ** np.abs(displacement(l + off, ref, L, params.periodic))
    A = L / c.root * (c.T * pw(n) + c.Y1 * pw(m) + c.Y2 * pw(m, -1))
    B = L / c.root * (c.T * pw(m) + c.Y1 * pw(n) + c.Y2 * pw(n, 1))
    return _finish(1.0, A, B)


def _require_nontrivial(params: SshParams) -> float:
    if not params.t2 > params.t1:
        raise NumericError(f"no zero mode: needs t2 > t1, got t1={params.t1:.6g}, t2={params.t2:.6g}")
    return params.t1 / params.t2


def zero_mode_AA(params: SshParams, atom: AtomCoupling) -> SingleExcitationState:
    """Zero mode of the A-A setup: B-sublattice only, left of the second leg."""
    tau = _require_nontrivial(params)
    L, n, m = params.L, atom.n, atom.m
    y2 = atom.g / params.t1
    l = _cells(L)
    rn = displacement(l, n, L, params.periodic)
    rm = displacement(l, m, L, params.periodic)
    B = y2 * (np.where(rn < 0, (-tau) ** (-rn.astype(float)), 0.0) + np.where(rm < 0, (-tau) ** (-rm.astype(float)), 0.0))
    return _finish(1.0, np.zeros(L), B)


def zero_mode_AB(params: SshParams, atom: AtomCoupling) -> SingleExcitationState:
    """Zero mode of the A-B setup: B left of ``n``, A right of ``m``, empty between."""
    tau = _require_nontrivial(params)
    L, n, m = params.L, atom.n, atom.m
    y2 = atom.g / params.t1
    l = _cells(L)
    rn = displacement(l, n, L, params.periodic).astype(float)
    rm = displacement(l, m, L, params.periodic).astype(float)
    A = y2 * np.where(rm > 0, (-tau) ** rm, 0.0)
    B = y2 * np.where(rn < 0, (-tau) ** (-rn), 0.0)
    return _finish(1.0, A, B)


def symmetry_check(
    state: SingleExcitationState,
    kind: CouplingKind | str,
    n: int,
    m: int,
    periodic: bool = True,
) -> float:
    """Largest mismatch of the mirror symmetry about the atom centre.

    A-A: ``| |A_r| − |A_{m+n−r}| |``; A-B: ``| |A_r| − |B_{m+n−r}| |``.
    Mirror indices are wrapped onto the ring; on an open chain sites whose
    mirror falls off the chain are skipped.
    """
    kind = CouplingKind(kind)
    L = state.L
    r = _cells(L)
    mirror = n + m - r
    if periodic:
        mirror = (mirror - 1) % L + 1
        keep = np.ones(L, bool)
    else:
        keep = (mirror >= 1) & (mirror <= L)
    other = state.A if kind is CouplingKind.AA else state.B
    diff = np.abs(np.abs(state.A[r[keep] - 1]) - np.abs(other[mirror[keep] - 1]))
    return float(diff.max()) if diff.size else 0.0
