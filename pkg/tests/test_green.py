"""Hadamard-test Green's functions against exact diagonalization.

The dimer at U = 3, gamma = 1 (half filling) has the closed-form diagonal

    G_11(t) = -i [0.9 cos(1.5 t) + 0.1 cos(3.5 t)]

which anchors every circuit-level check here.  Trotter accuracy numbers are
frozen from the first-order product formula at the default 60 slices.
"""

import numpy as np
import pytest

from qcpt.circuit import Circuit, run, zero_state
from qcpt.ed import ed_solve, exact_g_t
from qcpt.fermion import build_hubbard_cluster, dimer_spec, jw_string, mode_index
from qcpt.green import (
    ASSEMBLIES,
    CONVENTION_TOL,
    TrotterPlan,
    convention_check,
    hadamard_test_f,
    retarded_g,
    trotter_circuit,
)

U, GAMMA = 3.0, 1.0


def g11_closed_form(t):
    return -1j * (0.9 * np.cos(1.5 * np.asarray(t)) + 0.1 * np.cos(3.5 * np.asarray(t)))


@pytest.fixture(scope="module")
def dimer():
    ham = build_hubbard_cluster(dimer_spec(U, GAMMA))
    return ham, ed_solve(ham)


def dense_unitary(circuit):
    dim = 1 << circuit.n_qubits
    cols = []
    for k in range(dim):
        basis = np.zeros(dim, dtype=complex)
        basis[k] = 1.0
        cols.append(run(circuit, basis))
    return np.column_stack(cols)


def test_trotter_circuit_zero_time_is_empty(dimer):
    ham, _ = dimer
    circ = trotter_circuit(ham, 0.0)
    assert len(circ.gates) == 0
    assert circ.global_phase == 1.0


def test_trotter_circuit_gate_count_and_identity_phase(dimer):
    # Six non-identity dimer terms per slice; the identity coefficient -1.5
    # only shifts the tracked global phase, exp(-i c_I t).
    ham, _ = dimer
    circ = trotter_circuit(ham, 0.5, TrotterPlan(3))
    assert len(circ.gates) == 18
    np.testing.assert_allclose(circ.global_phase, np.exp(1.5j * 0.5), rtol=0, atol=1e-12)


def test_trotter_plan_rejects_zero_slices():
    with pytest.raises(ValueError):
        TrotterPlan(0)


def test_convention_check_gives_minus_i_on_every_mode(dimer):
    ham, sol = dimer
    for site in (0, 1):
        for spin in ("up", "down"):
            g0 = convention_check(ham, sol.ground_state, site, spin)
            assert abs(g0 + 1.0j) < CONVENTION_TOL


def test_four_term_assembly_equal_time(dimer):
    ham, sol = dimer
    series = retarded_g(ham, sol.ground_state, 1, 1, np.array([0.0]))
    np.testing.assert_allclose(series.values[0], -1.0j, rtol=0, atol=1e-12)


def test_two_term_assembly_vanishes_at_equal_time(dimer):
    # The documented alternate W+- form has no anticommutator piece at t = 0,
    # which is exactly why it is not the normative assembly.
    ham, sol = dimer
    series = retarded_g(ham, sol.ground_state, 1, 1, np.array([0.0]),
                        assembly="two_term", check_convention=False)
    np.testing.assert_allclose(series.values[0], 0.0, rtol=0, atol=1e-12)


def test_unnormalized_state_fails_the_convention_probe(dimer):
    # G_ii(0) = -i <psi|{c, c+}|psi> = -i <psi|psi>, so any norm defect trips
    # the runtime self-check before a series is computed.
    ham, sol = dimer
    with pytest.raises(RuntimeError, match="convention self-check"):
        retarded_g(ham, 0.5 * sol.ground_state, 1, 1, np.array([0.4]))


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_diagonal_matches_closed_form(dimer, t):
    ham, sol = dimer
    series = retarded_g(ham, sol.ground_state, 1, 1, np.array([t]),
                        check_convention=False)
    np.testing.assert_allclose(series.values[0], g11_closed_form(t), rtol=0,
                               atol=5e-4)


def test_trotter_error_grows_but_stays_under_bound(dimer):
    # Frozen first-order profile at 60 slices: |dG| = 4.8e-7 (t=0.5) up to
    # 2.3e-2 (t=10), comfortably under the 0.05 working bound.
    ham, sol = dimer
    ts = np.array([0.5, 2.0, 10.0])
    series = retarded_g(ham, sol.ground_state, 1, 1, ts, check_convention=False)
    dev = np.abs(series.values - exact_g_t(sol, 1, 1, "up", ts))
    assert dev[0] < dev[1] < dev[2] < 0.05
    np.testing.assert_allclose(dev[2], 0.0230868, rtol=1e-4)


def test_real_part_vanishes_at_half_filling(dimer):
    # Particle-hole symmetry at mu = U/2 keeps the Trotterized diagonal purely
    # imaginary, not just the exact one.
    ham, sol = dimer
    ts = np.array([0.5, 1.0, 2.0, 5.0])
    series = retarded_g(ham, sol.ground_state, 1, 1, ts, check_convention=False)
    assert np.abs(series.values.real).max() < 1e-6


def test_off_diagonal_is_symmetric(dimer):
    ham, sol = dimer
    ts = np.array([0.5, 1.0])
    kw = dict(plan=TrotterPlan(40), check_convention=False)
    s01 = retarded_g(ham, sol.ground_state, 0, 1, ts, **kw)
    s10 = retarded_g(ham, sol.ground_state, 1, 0, ts, **kw)
    np.testing.assert_allclose(s01.values, s10.values, rtol=0, atol=1e-12)


def test_noninteracting_single_slice_is_exact():
    # At U = 0 every remaining term commutes, so one slice reproduces the
    # exact propagator at machine precision.
    ham = build_hubbard_cluster(dimer_spec(0.0, GAMMA))
    sol = ed_solve(ham)
    ts = np.array([0.5, 2.0, 5.0, 10.0])
    series = retarded_g(ham, sol.ground_state, 0, 0, ts, plan=TrotterPlan(1),
                        check_convention=False)
    np.testing.assert_allclose(series.values, exact_g_t(sol, 0, 0, "up", ts),
                               rtol=0, atol=1e-12)


@pytest.mark.parametrize("a,b", [("X", "X"), ("Y", "Y"), ("X", "Y"), ("Y", "X")])
def test_interference_amplitude_matches_algebra(dimer, a, b):
    # F = <g| sigma_i(t) sigma_j + sigma_j sigma_i(t) |g> with sigma_i(t)
    # conjugated by the same Trotter unitary the ancilla circuit applies.
    ham, sol = dimer
    u_circ = trotter_circuit(ham, 0.7, TrotterPlan(12))
    u_mat = dense_unitary(u_circ)
    p = mode_index(1, "up", 2)
    strings = {"X": jw_string(p, ham.n_qubits, "X"),
               "Y": jw_string(p, ham.n_qubits, "Y")}
    from qcpt.pauli import dense_string

    si = dense_string(strings[a])
    sj = dense_string(strings[b])
    si_t = u_mat.conj().T @ si @ u_mat
    g = sol.ground_state
    expected = np.real(g.conj() @ (si_t @ sj + sj @ si_t) @ g)
    measured = hadamard_test_f(g, strings[a], strings[b], u_circ)
    np.testing.assert_allclose(measured, expected, rtol=0, atol=1e-10)
    assert -2.0 <= measured <= 2.0


def test_state_prep_circuit_and_injected_vector_agree(dimer):
    ham, sol = dimer
    prep = Circuit(ham.n_qubits)
    for q in (0, 3):
        prep.x(q)
    vec = run(prep, zero_state(ham.n_qubits))
    u_circ = trotter_circuit(ham, 0.3, TrotterPlan(8))
    xb = jw_string(0, ham.n_qubits, "X")
    f_circ = hadamard_test_f(prep, xb, xb, u_circ)
    f_vec = hadamard_test_f(vec, xb, xb, u_circ)
    np.testing.assert_allclose(f_circ, f_vec, rtol=0, atol=1e-12)


def test_sampled_series_is_seed_reproducible(dimer):
    ham, sol = dimer
    ts = np.array([0.3, 0.9])
    kw = dict(plan=TrotterPlan(6), mode="sampled", shots=400,
              check_convention=False)
    a = retarded_g(ham, sol.ground_state, 1, 1, ts, seed=5, **kw)
    b = retarded_g(ham, sol.ground_state, 1, 1, ts, seed=5, **kw)
    c = retarded_g(ham, sol.ground_state, 1, 1, ts, seed=6, **kw)
    np.testing.assert_array_equal(a.values, b.values)
    assert np.any(a.values != c.values)
    assert a.metadata["shots"] == 400
    assert a.metadata["noise_p"] is None


def test_series_records_provenance(dimer):
    ham, sol = dimer
    series = retarded_g(ham, sol.ground_state, 1, 1, np.array([0.0]))
    assert (series.i, series.j, series.spin) == (1, 1, "up")
    assert series.assembly == "four_term" and series.assembly in ASSEMBLIES
    assert series.mode == "exact"
    assert series.plan.n_tau == 60
    assert series.metadata["shots"] is None
    assert series.metadata["ordering"] == "blocked"


def test_scalar_time_is_accepted(dimer):
    ham, sol = dimer
    series = retarded_g(ham, sol.ground_state, 1, 1, 0.0)
    assert series.values.shape == (1,)


def test_rejections(dimer):
    ham, sol = dimer
    g = sol.ground_state
    with pytest.raises(ValueError, match="t >= 0"):
        retarded_g(ham, g, 1, 1, np.array([-0.1]))
    with pytest.raises(ValueError, match="assembly"):
        retarded_g(ham, g, 1, 1, np.array([0.0]), assembly="three_term")
    with pytest.raises(ValueError, match="dimension"):
        hadamard_test_f(g[:8], "XIII", "XIII", Circuit(4))
    with pytest.raises(ValueError, match="span"):
        hadamard_test_f(g, "XI", "XI", Circuit(4))
    with pytest.raises(ValueError, match="mode"):
        hadamard_test_f(g, "XIII", "XIII", Circuit(4), mode="density")
