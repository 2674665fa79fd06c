"""Cluster perturbation theory on the 2D square lattice.

A finite cluster tiles the infinite lattice under two integer superlattice
vectors.  Nearest-neighbor hopping (amplitude -gamma) then splits exactly
into an intra-cluster matrix T0 (which also carries -mu on the diagonal)
and a finite family of inter-cluster matrices T^r keyed by the superlattice
displacement r.  Their partial Fourier sum tau_q = sum_r e^{-i q.r} T^r
couples the clusters, and the lattice Green's function in the reduced zone
is built from the cluster one by

    G_lat(q, omega) = [G(omega)^{-1} - tau_q]^{-1}.

Momenta k of the original lattice are folded into the reduced zone before
evaluation, and the matrix result is periodized back to a scalar
g(k, omega) = (1/L) sum_ij e^{-i k.(r_i - r_j)} G_lat_ij, whose negative
imaginary part over pi is the excitation intensity rho(k, omega).

Spins never mix here (paramagnetic reference), so everything works on one
L x L block at a time; run the same table twice for up and down.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

HERMITICITY_TOL = 1e-12
CONDITION_LIMIT = 1e12

GAMMA_POINT = (0.0, 0.0)
X_POINT = (np.pi, 0.0)
M_POINT = (np.pi, np.pi)
DEFAULT_PATH = (("Gamma", GAMMA_POINT), ("X", X_POINT), ("M", M_POINT),
                ("Gamma", GAMMA_POINT))


@dataclass(frozen=True)
class TilingSpec:
    """Cluster coordinates plus the superlattice that tiles the plane.

    Every lattice site must decompose uniquely as (superlattice point R,
    cluster site alpha); this holds iff |det(e1, e2)| equals the cluster
    size and no two cluster sites differ by a superlattice vector.
    """

    sites: Tuple[Tuple[int, int], ...]
    e1: Tuple[int, int]
    e2: Tuple[int, int]
    gamma: float = 1.0
    mu: float = 0.0

    def __post_init__(self):
        sites = tuple(tuple(int(x) for x in s) for s in self.sites)
        e1 = tuple(int(x) for x in self.e1)
        e2 = tuple(int(x) for x in self.e2)
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "e1", e1)
        object.__setattr__(self, "e2", e2)
        a = np.array([e1, e2], dtype=float).T
        det = abs(np.linalg.det(a))
        if round(det) != len(sites):
            raise ValueError(
                f"superlattice cell holds {det:.0f} sites but the cluster "
                f"has {len(sites)}; this does not tile")
        inv = np.linalg.inv(a)
        for i, si in enumerate(sites):
            for j, sj in enumerate(sites):
                if i == j:
                    continue
                c = inv @ (np.array(si, float) - np.array(sj, float))
                if np.allclose(c, np.round(c), atol=1e-9):
                    raise ValueError(
                        f"cluster sites {i} and {j} coincide modulo the "
                        "superlattice; decomposition is not unique")

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    def decompose(self, x: Tuple[int, int]):
        """Unique (r, alpha) with x = r + sites[alpha], r a superlattice
        point given in lattice coordinates."""
        a = np.array([self.e1, self.e2], dtype=float).T
        inv = np.linalg.inv(a)
        for alpha, s in enumerate(self.sites):
            c = inv @ (np.array(x, float) - np.array(s, float))
            if np.allclose(c, np.round(c), atol=1e-9):
                n = np.round(c).astype(int)
                r = n[0] * np.array(self.e1) + n[1] * np.array(self.e2)
                return (int(r[0]), int(r[1])), alpha
        raise ValueError(f"site {x} not reachable; tiling is broken")


def dimer_tiling(gamma: float = 1.0, mu: float = 0.0) -> TilingSpec:
    """The 2x1 horizontal dimer with e1=(2,0), e2=(0,1)."""
    return TilingSpec(sites=((0, 0), (1, 0)), e1=(2, 0), e2=(0, 1),
                      gamma=gamma, mu=mu)


@dataclass
class HoppingPartition:
    """T0 (intra-cluster, with -mu diagonal) and T^r per displacement r."""

    t0: np.ndarray
    inter: Dict[Tuple[int, int], np.ndarray]

    def __post_init__(self):
        if np.max(np.abs(self.t0 - self.t0.conj().T)) > HERMITICITY_TOL:
            raise ValueError("T0 must be Hermitian")
        for r, m in self.inter.items():
            partner = (-r[0], -r[1])
            if partner not in self.inter or \
                    np.max(np.abs(self.inter[partner] - m.conj().T)) \
                    > HERMITICITY_TOL:
                raise ValueError(
                    f"T^{r} lacks a matching Hermitian T^{partner} partner")


NEIGHBOR_STEPS = ((1, 0), (-1, 0), (0, 1), (0, -1))


def partition_hoppings(tiling: TilingSpec) -> HoppingPartition:
    """Assign every nearest-neighbor bond to T0 or to exactly one T^r."""
    n = tiling.n_sites
    t0 = np.zeros((n, n))
    np.fill_diagonal(t0, -tiling.mu)
    inter: Dict[Tuple[int, int], np.ndarray] = {}
    for alpha, s in enumerate(tiling.sites):
        for d in NEIGHBOR_STEPS:
            r, beta = tiling.decompose((s[0] + d[0], s[1] + d[1]))
            if r == (0, 0):
                t0[alpha, beta] += -tiling.gamma
            else:
                # T^r rows live on the displaced cluster: entry [beta, alpha]
                # is the bond from home site alpha into cluster r site beta.
                # This orientation is what makes tau_q's e^{-iq.r} sum agree
                # with the e^{-ik.(r_i-r_j)} periodization phases.
                block = inter.setdefault(r, np.zeros((n, n)))
                block[beta, alpha] += -tiling.gamma
    return HoppingPartition(t0, inter)


def tau_q(partition: HoppingPartition, q) -> np.ndarray:
    """Inter-cluster coupling sum_r e^{-i q.r} T^r; Hermitian for every q."""
    q = np.asarray(q, dtype=float)
    out = np.zeros_like(partition.t0, dtype=complex)
    for r, block in partition.inter.items():
        out += np.exp(-1j * (q[0] * r[0] + q[1] * r[1])) * block
    if np.max(np.abs(out - out.conj().T)) > HERMITICITY_TOL:
        raise AssertionError("tau_q lost Hermiticity; partition is corrupt")
    return out


def cpt_green(g_cluster: np.ndarray, partition: HoppingPartition,
              q) -> np.ndarray:
    """[G^{-1} - tau_q]^{-1}, vectorized over any leading axes of G."""
    g_cluster = np.asarray(g_cluster, dtype=complex)
    return np.linalg.inv(np.linalg.inv(g_cluster) - tau_q(partition, q))


def self_energy(g_cluster: np.ndarray, partition: HoppingPartition,
                omega, eta: float) -> np.ndarray:
    """Sigma(omega) = (omega + i eta) - T0 - G^{-1}(omega), per omega.

    Sigma belongs to the cluster alone; it never depends on q.
    """
    g_cluster = np.asarray(g_cluster, dtype=complex)
    omega = np.asarray(omega, dtype=float)
    n = partition.t0.shape[0]
    z = (omega + 1j * eta).reshape(omega.shape + (1, 1)) * np.eye(n)
    return z - partition.t0 - np.linalg.inv(g_cluster)


def fold_k(tiling: TilingSpec, k) -> np.ndarray:
    """Fold an original-lattice momentum into the reduced Brillouin zone.

    With b_i the reciprocal superlattice basis (b_i . e_j = 2 pi delta_ij),
    k = B c and the folded q = B (c - round(c)).  tau_q is periodic under
    reciprocal superlattice shifts, so folding only standardizes q.
    """
    a = np.array([tiling.e1, tiling.e2], dtype=float).T
    b = 2.0 * np.pi * np.linalg.inv(a).T
    c = np.linalg.solve(b, np.asarray(k, dtype=float))
    return b @ (c - np.round(c))


def periodize(g_matrix: np.ndarray, tiling: TilingSpec, k) -> complex:
    """Scalar lattice Green's function
    g(k) = (1/L) sum_ij e^{-i k.(r_i - r_j)} G_ij, vectorized over leading
    axes of ``g_matrix``."""
    k = np.asarray(k, dtype=float)
    r = np.array(tiling.sites, dtype=float)
    u = np.exp(-1j * (r @ k))
    return np.einsum("...ij,i,j->...", np.asarray(g_matrix, complex),
                     u, u.conj()) / tiling.n_sites


@dataclass
class KPath:
    """Piecewise-linear path through named high-symmetry points."""

    points: np.ndarray
    vertex_indices: Tuple[int, ...]
    vertex_labels: Tuple[str, ...]

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    def label_of(self, index: int) -> str:
        for i, lab in zip(self.vertex_indices, self.vertex_labels):
            if i == index:
                return lab
        return ""


def kpath(vertices=DEFAULT_PATH, per_segment: int = 64) -> KPath:
    """Sample ``per_segment`` points on each leg, keeping the final vertex."""
    if per_segment < 1:
        raise ValueError("need at least one point per segment")
    labels = [v[0] for v in vertices]
    coords = [np.asarray(v[1], dtype=float) for v in vertices]
    if len(coords) < 2:
        raise ValueError("a path needs at least two vertices")
    pts: List[np.ndarray] = []
    vidx = [0]
    for a, b in zip(coords[:-1], coords[1:]):
        frac = np.arange(per_segment) / per_segment
        pts.extend(a + (b - a) * f for f in frac)
        vidx.append(vidx[-1] + per_segment)
    pts.append(coords[-1])
    return KPath(np.array(pts), tuple(vidx), tuple(labels))


@dataclass
class SpectralGrid:
    """rho(k, omega) on a k-path, with per-k sum-rule diagnostics."""

    kpath: KPath
    omega: np.ndarray
    eta: float
    intensity: np.ndarray
    k_integrals: np.ndarray
    singular_omega: np.ndarray
    metadata: Dict = field(default_factory=dict)


def excitation_spectra(g_table: np.ndarray, tiling: TilingSpec, path: KPath,
                       omega, eta: float) -> SpectralGrid:
    """Dense intensity grid from a cluster Green's table G[omega, i, j].

    Frequencies where the cluster G is ill conditioned (> 1e12) are flagged
    and carried in the result rather than regularized away.
    """
    omega = np.asarray(omega, dtype=float)
    g_table = np.asarray(g_table, dtype=complex)
    n = tiling.n_sites
    if g_table.shape != (omega.size, n, n):
        raise ValueError("G table must have shape (n_omega, L, L)")
    singular = np.linalg.cond(g_table) > CONDITION_LIMIT
    g_inv = np.linalg.inv(g_table)
    intensity = np.empty((path.n_points, omega.size))
    partition = partition_hoppings(tiling)
    for ik, k in enumerate(path.points):
        tq = tau_q(partition, fold_k(tiling, k))
        g_lat = np.linalg.inv(g_inv - tq)
        g_k = periodize(g_lat, tiling, k)
        intensity[ik] = -g_k.imag / np.pi
    k_integrals = np.trapezoid(intensity, omega, axis=1)
    return SpectralGrid(path, omega, float(eta), intensity, k_integrals,
                        singular, {"n_sites": n})
