"""Cluster perturbation theory building blocks.

The 2x1 dimer tiling at gamma = 1 has frozen hopping blocks

    T0        = [[-mu, -1], [-1, -mu]]
    T^(2,0)   = [[0, -1], [0, 0]]      T^(-2,0) = [[0, 0], [-1, 0]]
    T^(0,+-1) = -identity
    tau(q)    = [[-2 cos qy, -e^{-2 i qx}], [-e^{+2 i qx}, -2 cos qy]]

and CPT is exact at U = 0: the periodized lattice function must reproduce
1 / (omega + i eta - eps_k) with eps_k = -2 (cos kx + cos ky) - mu.
"""

import numpy as np
import pytest

from qcpt.cpt import (
    DEFAULT_PATH,
    HoppingPartition,
    TilingSpec,
    cpt_green,
    dimer_tiling,
    excitation_spectra,
    fold_k,
    kpath,
    partition_hoppings,
    periodize,
    self_energy,
    tau_q,
)
from qcpt.ed import ed_solve, exact_g_matrix
from qcpt.fermion import build_hubbard_cluster, dimer_spec

ETA = 0.2


def tau_closed_form(q):
    qx, qy = q
    return np.array([[-2.0 * np.cos(qy), -np.exp(-2j * qx)],
                     [-np.exp(2j * qx), -2.0 * np.cos(qy)]])


@pytest.fixture(scope="module")
def tiling():
    return dimer_tiling()


@pytest.fixture(scope="module")
def partition(tiling):
    return partition_hoppings(tiling)


def test_dimer_tiling_decomposes_uniquely(tiling):
    assert tiling.decompose((0, 0)) == ((0, 0), 0)
    assert tiling.decompose((1, 0)) == ((0, 0), 1)
    assert tiling.decompose((2, 0)) == ((2, 0), 0)
    assert tiling.decompose((-1, 3)) == ((-2, 3), 1)
    assert tiling.decompose((5, -2)) == ((4, -2), 1)


def test_tiling_rejects_wrong_cell_volume():
    with pytest.raises(ValueError, match="does not tile"):
        TilingSpec(sites=((0, 0), (1, 0)), e1=(1, 0), e2=(0, 1))


def test_tiling_rejects_equivalent_sites():
    with pytest.raises(ValueError, match="not unique"):
        TilingSpec(sites=((0, 0), (2, 0)), e1=(2, 0), e2=(0, 1))


def test_hopping_blocks_frozen(partition):
    np.testing.assert_array_equal(partition.t0, [[0.0, -1.0], [-1.0, 0.0]])
    assert set(partition.inter) == {(2, 0), (-2, 0), (0, 1), (0, -1)}
    np.testing.assert_array_equal(partition.inter[(2, 0)], [[0, -1], [0, 0]])
    np.testing.assert_array_equal(partition.inter[(-2, 0)], [[0, 0], [-1, 0]])
    np.testing.assert_array_equal(partition.inter[(0, 1)], -np.eye(2))
    np.testing.assert_array_equal(partition.inter[(0, -1)], -np.eye(2))


def test_partition_covers_every_bond(partition):
    # 2 sites x 4 neighbors = 8 directed bonds, each carrying -gamma once.
    total = -(partition.t0.sum() + sum(m.sum() for m in partition.inter.values()))
    assert total == 8.0


def test_chemical_potential_sits_on_t0_diagonal():
    part = partition_hoppings(dimer_tiling(mu=1.5))
    np.testing.assert_array_equal(np.diag(part.t0), [-1.5, -1.5])


def test_partition_validates_hermiticity():
    with pytest.raises(ValueError, match="Hermitian"):
        HoppingPartition(np.array([[0.0, 1.0], [0.0, 0.0]]), {})
    block = np.array([[0.0, -1.0], [0.0, 0.0]])
    with pytest.raises(ValueError, match="partner"):
        HoppingPartition(np.zeros((2, 2)), {(2, 0): block})
    with pytest.raises(ValueError, match="partner"):
        HoppingPartition(np.zeros((2, 2)),
                         {(2, 0): block, (-2, 0): 2.0 * block.T})


@pytest.mark.parametrize("q", [(0.0, 0.0), (0.7, -1.3), (np.pi / 2, np.pi)])
def test_tau_matches_closed_form(partition, q):
    np.testing.assert_allclose(tau_q(partition, q), tau_closed_form(q),
                               rtol=0, atol=1e-14)


def test_tau_at_zone_center_is_frozen(partition):
    np.testing.assert_allclose(tau_q(partition, (0.0, 0.0)),
                               [[-2.0, -1.0], [-1.0, -2.0]], atol=1e-15)


def test_cpt_green_solves_dyson(partition):
    rng = np.random.default_rng(0)
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    g = a + a.conj().T + 1j * 0.3 * np.eye(2)
    q = (0.4, 1.1)
    g_lat = cpt_green(g, partition, q)
    lhs = (np.linalg.inv(g) - tau_q(partition, q)) @ g_lat
    np.testing.assert_allclose(lhs, np.eye(2), rtol=0, atol=1e-12)


def test_detached_clusters_recover_cluster_green(partition):
    rng = np.random.default_rng(1)
    g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    alone = HoppingPartition(partition.t0, {})
    np.testing.assert_allclose(cpt_green(g, alone, (0.9, 0.2)), g,
                               rtol=0, atol=1e-12)


def test_fold_maps_into_reduced_zone(tiling):
    np.testing.assert_allclose(fold_k(tiling, (np.pi + 0.3, 2 * np.pi + 0.4)),
                               (0.3, 0.4), atol=1e-12)
    # X = (pi, 0) is a reciprocal superlattice vector of the 2x1 cell.
    np.testing.assert_allclose(fold_k(tiling, (np.pi, 0.0)), (0.0, 0.0),
                               atol=1e-12)


def test_tau_is_fold_invariant(tiling, partition):
    rng = np.random.default_rng(2)
    for k in rng.uniform(-4.0, 4.0, size=(5, 2)):
        np.testing.assert_allclose(tau_q(partition, fold_k(tiling, k)),
                                   tau_q(partition, k), rtol=0, atol=1e-12)


def test_periodize_formula(tiling):
    g = np.array([[1.0 + 0.2j, 0.5], [-0.25j, 2.0]])
    kx = 0.8
    expected = 0.5 * (g[0, 0] + g[1, 1] + g[0, 1] * np.exp(1j * kx)
                      + g[1, 0] * np.exp(-1j * kx))
    np.testing.assert_allclose(periodize(g, tiling, (kx, 0.3)), expected,
                               rtol=1e-14)


@pytest.mark.parametrize("mu", [0.0, 0.7])
def test_noninteracting_lattice_is_exact(mu):
    # At U = 0 the cluster function is [(w + i eta) - T0]^{-1} and CPT must
    # reproduce the tight-binding band at any original-zone momentum.
    tiling = dimer_tiling(mu=mu)
    part = partition_hoppings(tiling)
    rng = np.random.default_rng(4)
    omega = np.array([0.35])
    z = (omega[0] + 1j * ETA) * np.eye(2)
    g0 = np.linalg.inv(z - part.t0)
    for k in rng.uniform(-np.pi, np.pi, size=(6, 2)):
        g_lat = cpt_green(g0, part, fold_k(tiling, k))
        g_k = periodize(g_lat, tiling, k)
        eps = -2.0 * (np.cos(k[0]) + np.cos(k[1])) - mu
        np.testing.assert_allclose(g_k, 1.0 / (omega[0] + 1j * ETA - eps),
                                   rtol=0, atol=1e-12)


def test_single_site_tiling_also_exact():
    tiling = TilingSpec(sites=((0, 0),), e1=(1, 0), e2=(0, 1))
    part = partition_hoppings(tiling)
    assert part.t0.shape == (1, 1) and part.t0[0, 0] == 0.0
    omega, k = 0.6, (1.1, -0.4)
    g0 = np.array([[1.0 / (omega + 1j * ETA)]])
    g_k = periodize(cpt_green(g0, part, fold_k(tiling, k)), tiling, k)
    eps = -2.0 * (np.cos(k[0]) + np.cos(k[1]))
    np.testing.assert_allclose(g_k, 1.0 / (omega + 1j * ETA - eps), atol=1e-12)


@pytest.fixture(scope="module")
def cluster_g():
    ham = build_hubbard_cluster(dimer_spec(3.0, 1.0))
    sol = ed_solve(ham)
    omega = np.linspace(-8.0, 8.0, 161)
    return omega, exact_g_matrix(sol, omega, ETA)


def test_self_energy_vanishes_without_interaction():
    part = partition_hoppings(dimer_tiling())
    omega = np.linspace(-3.0, 3.0, 11)
    z = (omega + 1j * ETA).reshape(-1, 1, 1) * np.eye(2)
    g0 = np.linalg.inv(z - part.t0)
    sigma = self_energy(g0, part, omega, ETA)
    np.testing.assert_allclose(sigma, 0.0, rtol=0, atol=1e-12)


def test_self_energy_tail_is_hartree():
    # Sigma(omega -> inf) -> U <n_-sigma> = U/2 at half filling; frozen at
    # omega = 800: 1.5028 for U = 3.
    ham = build_hubbard_cluster(dimer_spec(3.0, 1.0))
    sol = ed_solve(ham)
    part = partition_hoppings(dimer_tiling(mu=1.5))
    omega = np.array([800.0])
    g = exact_g_matrix(sol, omega, ETA)
    sigma = self_energy(g, part, omega, ETA)
    np.testing.assert_allclose(sigma[0, 0, 0].real, 1.5, rtol=0, atol=5e-3)
    np.testing.assert_allclose(sigma[0, 0, 0], sigma[0, 1, 1], rtol=1e-10)


def test_kpath_default_geometry():
    path = kpath()
    assert path.n_points == 193
    assert path.vertex_indices == (0, 64, 128, 192)
    assert path.vertex_labels == ("Gamma", "X", "M", "Gamma")
    assert path.label_of(64) == "X"
    assert path.label_of(63) == ""
    np.testing.assert_allclose(path.points[0], (0.0, 0.0))
    np.testing.assert_allclose(path.points[64], (np.pi, 0.0))
    np.testing.assert_allclose(path.points[128], (np.pi, np.pi))
    np.testing.assert_allclose(path.points[192], (0.0, 0.0))


def test_kpath_validation():
    with pytest.raises(ValueError, match="per segment"):
        kpath(per_segment=0)
    with pytest.raises(ValueError, match="two vertices"):
        kpath(vertices=DEFAULT_PATH[:1])
    short = kpath(per_segment=1)
    assert short.n_points == 4


def test_excitation_grid_shape_and_integrals(tiling, cluster_g):
    omega, g_table = cluster_g
    path = kpath(per_segment=8)
    grid = excitation_spectra(g_table, tiling, path, omega, ETA)
    assert grid.intensity.shape == (path.n_points, omega.size)
    assert grid.k_integrals.shape == (path.n_points,)
    assert not grid.singular_omega.any()
    np.testing.assert_allclose(
        grid.k_integrals, np.trapezoid(grid.intensity, omega, axis=1),
        rtol=1e-13)
    # eta-broadened half-filled bands: every k keeps most of its weight
    assert grid.k_integrals.min() > 0.8
    assert grid.metadata["n_sites"] == 2


def test_excitation_grid_flags_ill_conditioned_frequencies(tiling):
    # healthy slices carry the +i eta retarded offset (a bare identity would
    # hit an exact CPT pole at M); the middle slice is near-singular on
    # purpose and must be flagged, not regularized.
    omega = np.array([-0.5, 0.0, 0.5])
    g = np.stack([np.eye(2) / (w + 1j * ETA) for w in omega])
    g[1] = np.diag([1e-14, 1.0])
    grid = excitation_spectra(g, tiling, kpath(per_segment=1), omega, ETA)
    np.testing.assert_array_equal(grid.singular_omega, [False, True, False])


def test_excitation_grid_rejects_wrong_table_shape(tiling):
    omega = np.linspace(-1.0, 1.0, 5)
    with pytest.raises(ValueError, match="shape"):
        excitation_spectra(np.zeros((4, 2, 2), complex), tiling,
                           kpath(per_segment=1), omega, ETA)


def test_lattice_particle_hole_symmetry(tiling, cluster_g):
    # At mu = U/2 the intensity obeys rho(k, omega) = rho(k + (pi, pi), -omega).
    omega, g_table = cluster_g
    part = partition_hoppings(tiling)
    rng = np.random.default_rng(6)
    for k in rng.uniform(-np.pi, np.pi, size=(4, 2)):
        kq = k + np.array([np.pi, np.pi])
        rho_k = -periodize(cpt_green(g_table, part, fold_k(tiling, k)),
                           tiling, k).imag / np.pi
        rho_kq = -periodize(cpt_green(g_table, part, fold_k(tiling, kq)),
                            tiling, kq).imag / np.pi
        np.testing.assert_allclose(rho_k, rho_kq[::-1], rtol=0, atol=1e-10)
