"""Real-space single-excitation Hamiltonian of the SSH chain plus giant atom.

Basis layout is fixed: ``(A,1), (B,1), ..., (A,L), (B,L)``, then the giant
atom, then the optional probe atom. All bare frequencies are zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Hashable

import numpy as np

from giant_ssh.errors import InputError


class Boundary(str, Enum):
    PERIODIC = "periodic"
    OPEN = "open"


class CouplingKind(str, Enum):
    AA = "AA"
    AB = "AB"
    NONE = "none"


def hopping_strengths(q: float, delta: float, theta: float) -> tuple[float, float]:
    """Intra-cell and inter-cell hoppings ``(t1, t2) = q(1 ± delta cos theta)``."""
    c = math.cos(theta)
    return q * (1.0 + delta * c), q * (1.0 - delta * c)


@dataclass(frozen=True)
class SshParams:
    L: int = 100
    q: float = 1.0
    delta: float = 0.5
    theta: float = 0.0
    boundary: Boundary = Boundary.PERIODIC

    def __post_init__(self):
        object.__setattr__(self, "boundary", Boundary(self.boundary))
        if int(self.L) != self.L or self.L < 2:
            raise InputError(f"L must be an integer >= 2, got {self.L!r}")
        if not self.q > 0:
            raise InputError(f"q must be positive, got {self.q!r}")
        if not 0.0 <= self.delta < 1.0:
            raise InputError(f"delta must lie in [0, 1), got {self.delta!r}")

    @property
    def t1(self) -> float:
        return hopping_strengths(self.q, self.delta, self.theta)[0]

    @property
    def t2(self) -> float:
        return hopping_strengths(self.q, self.delta, self.theta)[1]

    @property
    def periodic(self) -> bool:
        return self.boundary is Boundary.PERIODIC

    def with_theta(self, theta: float) -> "SshParams":
        return SshParams(self.L, self.q, self.delta, theta, self.boundary)


@dataclass(frozen=True)
class AtomCoupling:
    kind: CouplingKind = CouplingKind.AA
    n: int = 50
    m: int = 51
    g: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", CouplingKind(self.kind))
        if self.g < 0:
            raise InputError(f"g must be non-negative, got {self.g!r}")
        if self.kind is CouplingKind.AA and not self.n < self.m:
            raise InputError(f"A-A coupling needs n < m, got n={self.n}, m={self.m}")
        if self.kind is CouplingKind.AB and not self.n <= self.m:
            raise InputError(f"A-B coupling needs n <= m, got n={self.n}, m={self.m}")

    @property
    def d(self) -> int:
        return abs(self.m - self.n)

    @property
    def enabled(self) -> bool:
        return self.kind is not CouplingKind.NONE

    def legs(self) -> tuple[tuple[str, int], tuple[str, int]]:
        """Lattice sites the two legs attach to."""
        second = "A" if self.kind is CouplingKind.AA else "B"
        return ("A", self.n), (second, self.m)


@dataclass(frozen=True)
class ProbeConfig:
    enabled: bool = False
    sublattice: str = "B"
    cell: int = 45
    gp: float = 0.1
    frequency: float = 0.0

    def __post_init__(self):
        if self.sublattice not in ("A", "B"):
            raise InputError(f"probe sublattice must be 'A' or 'B', got {self.sublattice!r}")
        if self.gp < 0:
            raise InputError(f"probe coupling gp must be non-negative, got {self.gp!r}")

    @property
    def site(self) -> tuple[str, int]:
        return (self.sublattice, self.cell)


NO_PROBE = ProbeConfig(enabled=False)


def basis_labels(L: int, atom: bool = True, probe: bool = False) -> tuple[Hashable, ...]:
    labels: list[Hashable] = []
    for l in range(1, L + 1):
        labels.append(("A", l))
        labels.append(("B", l))
    if atom:
        labels.append("atom")
    if probe:
        labels.append("probe")
    return tuple(labels)


@dataclass(frozen=True)
class HamiltonianMatrix:
    matrix: np.ndarray
    labels: tuple[Hashable, ...]
    params: SshParams
    atom: AtomCoupling
    probe: ProbeConfig = NO_PROBE
    index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "index", {lab: i for i, lab in enumerate(self.labels)})
        self.matrix.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __getitem__(self, pair):
        a, b = pair
        return self.matrix[site_index(a, self.index), site_index(b, self.index)]


def site_index(label: Hashable, layout: dict) -> int:
    """Row index of a basis label such as ``("A", 1)``, ``"atom"`` or ``"probe"``."""
    try:
        return layout[label]
    except (KeyError, TypeError):
        raise InputError(f"unknown basis label {label!r}") from None


def _check_cell(name: str, cell: int, L: int) -> None:
    if not 1 <= cell <= L:
        raise InputError(f"{name} must be a cell index in [1, {L}], got {cell}")


def build_hamiltonian(
    params: SshParams,
    atom: AtomCoupling,
    probe: ProbeConfig = NO_PROBE,
    hoppings: tuple[float, float] | None = None,
) -> HamiltonianMatrix:
    """Assemble the dense single-excitation Hamiltonian.

    Off-diagonals are ``t1`` on ``(A,l)-(B,l)`` and ``t2`` on ``(B,l)-(A,l+1)``,
    the latter wrapping ``(B,L)-(A,1)`` under periodic boundary. The atom row
    carries ``g`` at both legs; the probe row carries ``gp`` at its site and the
    probe frequency on its diagonal. ``hoppings`` overrides ``(t1, t2)``
    (used to build deliberately inconsistent models for negative controls).
    """
    L = params.L
    if atom.enabled:
        _check_cell("n", atom.n, L)
        _check_cell("m", atom.m, L)
    if probe.enabled:
        _check_cell("probe cell", probe.cell, L)

    labels = basis_labels(L, atom=atom.enabled, probe=probe.enabled)
    index = {lab: i for i, lab in enumerate(labels)}
    t1, t2 = hoppings if hoppings is not None else (params.t1, params.t2)
    bonds = []
    for l in range(1, L + 1):
        bonds.append((("A", l), ("B", l), t1))
        if l < L:
            bonds.append((("B", l), ("A", l + 1), t2))
    if params.periodic:
        bonds.append((("B", L), ("A", 1), t2))
    if atom.enabled:
        bonds += [("atom", leg, atom.g) for leg in atom.legs()]
    if probe.enabled:
        bonds.append(("probe", probe.site, probe.gp))

    h = np.zeros((len(labels), len(labels)))
    for a, b, val in bonds:
        i, j = index[a], index[b]
        h[i, j] += val
        h[j, i] += val
    if probe.enabled:
        h[index["probe"], index["probe"]] = probe.frequency
    return HamiltonianMatrix(h, labels, params, atom, probe)


def bipartition(hm: HamiltonianMatrix) -> tuple[list[int], list[int]] | None:
    """Two-colour the graph of nonzero off-diagonal couplings.

    Returns ``(X, Y)`` with X the colour class containing ``(A,1)``, or None
    when the coupling graph has an odd cycle.
    """
    h = hm.matrix
    n = h.shape[0]
    colour = [-1] * n
    for start in range(n):
        if colour[start] >= 0:
            continue
        colour[start] = 0
        stack = [start]
        while stack:
            i = stack.pop()
            for j in np.flatnonzero(h[i]):
                if j == i:
                    continue
                if colour[j] < 0:
                    colour[j] = 1 - colour[i]
                    stack.append(j)
                elif colour[j] == colour[i]:
                    return None
    x = [i for i in range(n) if colour[i] == colour[0]]
    y = [i for i in range(n) if colour[i] != colour[0]]
    return x, y
