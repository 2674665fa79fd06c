"""Exact-diagonalization reference for small clusters (dense, <= 12 qubits).

This module is the independent oracle for the circuit pipeline: the cluster
Hamiltonian can be built directly in the occupation-number basis (no Pauli
algebra), ladder operators are dense occupation-basis matrices, time
evolution is spectral rather than Trotterized, and spectral functions come
from the Lehmann representation.

Basis convention matches the Jordan-Wigner map: basis index b has bit p set
iff spin-orbital p is occupied, with |b> = (c_0^+)^{b_0} (c_1^+)^{b_1} ...
|vac>, so c_p picks up the parity of the occupied modes below p.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from .fermion import DOWN, UP, HubbardSpec, mode_index
from .pauli import PauliHamiltonian

DEGENERACY_TOL = 1e-9


def ladder_matrix(mode: int, n_modes: int, dagger: bool = False) -> np.ndarray:
    """Dense annihilator (or creator) of one spin-orbital."""
    dim = 1 << n_modes
    mat = np.zeros((dim, dim), dtype=complex)
    bit = 1 << mode
    below = bit - 1
    for b in range(dim):
        if b & bit:
            sign = -1.0 if bin(b & below).count("1") % 2 else 1.0
            mat[b ^ bit, b] = sign
    return mat.conj().T if dagger else mat


def number_matrix(mode: int, n_modes: int) -> np.ndarray:
    dim = 1 << n_modes
    bit = 1 << mode
    return np.diag(np.array([(b >> mode) & 1 for b in range(dim)],
                            dtype=complex))


def occupation_hamiltonian(spec: HubbardSpec,
                           ordering: str = "blocked") -> np.ndarray:
    """Cluster Hamiltonian assembled in the occupation basis, no Pauli step."""
    n = spec.n_sites
    n_modes = spec.n_modes
    dim = 1 << n_modes
    mu = spec.chemical_potential
    ham = np.zeros((dim, dim), dtype=complex)
    for a, b in spec.bonds:
        for spin in (UP, DOWN):
            p = mode_index(a, spin, n, ordering)
            q = mode_index(b, spin, n, ordering)
            hop = ladder_matrix(p, n_modes, dagger=True) @ ladder_matrix(
                q, n_modes)
            ham += -spec.gamma * (hop + hop.conj().T)
    for site in range(n):
        n_up = number_matrix(mode_index(site, UP, n, ordering), n_modes)
        n_dn = number_matrix(mode_index(site, DOWN, n, ordering), n_modes)
        ham += spec.u * (n_up @ n_dn) - mu * (n_up + n_dn)
    return ham


@dataclass
class EDSolution:
    """Full dense spectrum with a phase-fixed ground state."""

    energies: np.ndarray
    vectors: np.ndarray  # columns are eigenvectors
    n_qubits: int
    degenerate: bool = field(init=False)
    gap: float = field(init=False)

    def __post_init__(self):
        self.gap = float(self.energies[1] - self.energies[0])
        self.degenerate = self.gap < DEGENERACY_TOL

    @property
    def ground_energy(self) -> float:
        return float(self.energies[0])

    @property
    def ground_state(self) -> np.ndarray:
        return self.vectors[:, 0]

    def _require_unique_ground(self):
        if self.degenerate:
            raise ValueError(
                f"ground state is degenerate (gap {self.gap:.2e}); Green's "
                "functions from a single ground vector would be ambiguous")


def ed_solve(hamiltonian: PauliHamiltonian | np.ndarray) -> EDSolution:
    """Dense eigensolve; the ground-state phase is fixed by rotating the
    lowest-index nonzero amplitude to the positive real axis."""
    if isinstance(hamiltonian, PauliHamiltonian):
        if hamiltonian.n_qubits > 12:
            raise ValueError("dense diagonalization capped at 12 qubits")
        mat = hamiltonian.matrix()
    else:
        mat = np.asarray(hamiltonian, dtype=complex)
    energies, vectors = np.linalg.eigh(mat)
    vectors = vectors.copy()
    for col in range(vectors.shape[1]):
        v = vectors[:, col]
        nz = np.flatnonzero(np.abs(v) > 1e-12)
        if nz.size:
            ph = v[nz[0]] / abs(v[nz[0]])
            vectors[:, col] = v / ph
    n_qubits = int(np.log2(mat.shape[0]))
    return EDSolution(energies, vectors, n_qubits)


def _mode_pair(solution: EDSolution, i: int, j: int, spin: str,
               ordering: str) -> Tuple[int, int]:
    n_sites = solution.n_qubits // 2
    return (mode_index(i, spin, n_sites, ordering),
            mode_index(j, spin, n_sites, ordering))


def _lehmann_weights(solution: EDSolution, i: int, j: int, spin: str,
                     ordering: str):
    """Pole positions and weights of the retarded G_ij.

    Returns (delta, w_add, w_rem): G(t) = -i sum_n [w_add e^{-i delta t}
    + w_rem e^{+i delta t}] for t >= 0, poles at +delta and -delta.
    """
    solution._require_unique_ground()
    p, q = _mode_pair(solution, i, j, spin, ordering)
    n_modes = solution.n_qubits
    ci = ladder_matrix(p, n_modes)
    cj_dag = ladder_matrix(q, n_modes, dagger=True)
    g = solution.ground_state
    vecs = solution.vectors
    delta = solution.energies - solution.ground_energy
    # <g|c_i|n><n|c_j^+|g> and <g|c_j^+|n><n|c_i|g>
    w_add = (g.conj() @ ci @ vecs) * (vecs.conj().T @ (cj_dag @ g))
    w_rem = (g.conj() @ cj_dag @ vecs) * (vecs.conj().T @ (ci @ g))
    return delta, w_add, w_rem


def exact_g_t(solution: EDSolution, i: int, j: int, spin: str,
              times: np.ndarray, ordering: str = "blocked") -> np.ndarray:
    """Retarded G_ij(t) = -i theta(t) <{c_i(t), c_j^+}> on the exact ground
    state, with theta(0) = 1.  Times must be nonnegative."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times < 0):
        raise ValueError("retarded G is defined for t >= 0")
    delta, w_add, w_rem = _lehmann_weights(solution, i, j, spin, ordering)
    phase_add = np.exp(-1.0j * np.outer(delta, times))
    phase_rem = np.exp(1.0j * np.outer(delta, times))
    return -1.0j * (w_add @ phase_add + w_rem @ phase_rem)


def lehmann_spectral(solution: EDSolution, i: int, j: int, spin: str,
                     omega: np.ndarray, eta: float,
                     ordering: str = "blocked"):
    """Broadened G_ij(omega + i eta) and rho = -Im G / pi from the Lehmann
    sums (addition and removal parts)."""
    if eta <= 0:
        raise ValueError("eta must be positive")
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    delta, w_add, w_rem = _lehmann_weights(solution, i, j, spin, ordering)
    z = omega + 1.0j * eta
    gw = (w_add[:, None] / (z[None, :] - delta[:, None])).sum(axis=0)
    gw += (w_rem[:, None] / (z[None, :] + delta[:, None])).sum(axis=0)
    rho = -gw.imag / np.pi
    return gw, rho


def lehmann_poles(solution: EDSolution, i: int, j: int, spin: str,
                  ordering: str = "blocked", tol: float = 1e-12):
    """Discrete pole list (positions, weights) of G_ij, small weights pruned."""
    delta, w_add, w_rem = _lehmann_weights(solution, i, j, spin, ordering)
    poles = np.concatenate([delta, -delta])
    weights = np.concatenate([w_add, w_rem])
    keep = np.abs(weights) > tol
    return poles[keep], weights[keep]


def exact_g_matrix(solution: EDSolution, omega: np.ndarray, eta: float,
                   spin: str = "up",
                   ordering: str = "blocked") -> np.ndarray:
    """Full cluster matrix G[omega, i, j] from the Lehmann sums, one spin."""
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    n_sites = solution.n_qubits // 2
    out = np.empty((omega.size, n_sites, n_sites), dtype=complex)
    for i in range(n_sites):
        for j in range(n_sites):
            out[:, i, j], _ = lehmann_spectral(solution, i, j, spin, omega,
                                               eta, ordering)
    return out
