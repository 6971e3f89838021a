"""Giant atom coupled at two sites to an SSH photonic waveguide.

Exact diagonalization in the single-excitation sector, closed-form bound
and zero-mode profiles, and the second-order effective photon model.
"""

from giant_ssh.lattice import (
    AtomCoupling,
    HamiltonianMatrix,
    ProbeConfig,
    SshParams,
    build_hamiltonian,
    hopping_strengths,
    site_index,
)
from giant_ssh.spectral import (
    LevelClass,
    SingleExcitationState,
    SpectrumResult,
    classify_levels,
    degeneracy_report,
    eigensolve,
    photon_distribution,
    sweep_theta,
    time_evolve,
)

__all__ = [
    "AtomCoupling",
    "HamiltonianMatrix",
    "LevelClass",
    "ProbeConfig",
    "SingleExcitationState",
    "SpectrumResult",
    "SshParams",
    "build_hamiltonian",
    "classify_levels",
    "degeneracy_report",
    "eigensolve",
    "hopping_strengths",
    "photon_distribution",
    "site_index",
    "sweep_theta",
    "time_evolve",
]

__version__ = "0.1.0"
