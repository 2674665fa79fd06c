"""Statevector simulator: gates, Pauli rotations, noise, folding, sampling."""

import math

import numpy as np
import pytest

from qcpt.circuit import (Circuit, NoiseModel, allclose_up_to_phase,
                          density_expectation, expectation, fold, run,
                          sample_expectation, zero_state)
from qcpt.pauli import dense_string


def dense_unitary(circuit):
    dim = 1 << circuit.n_qubits
    u = np.empty((dim, dim), dtype=complex)
    for b in range(dim):
        e = np.zeros(dim, dtype=complex)
        e[b] = 1.0
        u[:, b] = run(circuit, e)
    return u


def test_h_and_x():
    c = Circuit(1)
    c.h(0)
    np.testing.assert_allclose(run(c), [1, 1] / np.sqrt(2), atol=1e-14)
    c = Circuit(2)
    c.x(1)
    psi = run(c)
    assert abs(psi[2]) == 1.0  # qubit 1 is index bit 1


def test_ry_rotation():
    c = Circuit(1)
    c.ry(0, 0.7)
    np.testing.assert_allclose(
        run(c), [math.cos(0.35), math.sin(0.35)], atol=1e-14)


def test_rz_phases():
    c = Circuit(1)
    c.h(0)
    c.rz(0, 1.1)
    psi = run(c)
    np.testing.assert_allclose(psi[1] / psi[0], np.exp(1.1j), atol=1e-14)


def test_cnot_entangles():
    c = Circuit(2)
    c.h(0)
    c.cnot(0, 1)
    psi = run(c)
    np.testing.assert_allclose(np.abs(psi) ** 2, [0.5, 0, 0, 0.5],
                               atol=1e-14)


def test_exp_pauli_closed_form():
    """exp(-i theta P) = cos(theta) I - i sin(theta) P."""
    theta = 0.9
    c = Circuit(2)
    c.exp_pauli(theta, "XY")
    target = (math.cos(theta) * np.eye(4)
              - 1j * math.sin(theta) * dense_string("XY"))
    np.testing.assert_allclose(dense_unitary(c), target, atol=1e-13)


def test_exp_pauli_identity_is_global_phase():
    c = Circuit(2)
    c.exp_pauli(0.4, "II")
    assert len(c.gates) == 0
    np.testing.assert_allclose(c.global_phase, np.exp(-0.4j), atol=1e-14)
    np.testing.assert_allclose(run(c), np.exp(-0.4j) * zero_state(2),
                               atol=1e-14)


def test_cpauli_polarity():
    # polarity 1: apply when control is |1>; polarity 0: when control is |0>
    for polarity, flipped_index in ((1, 0b11), (0, 0b10)):
        c = Circuit(2)
        if polarity == 1:
            c.x(0)
        c.cpauli(0, polarity, "IX")
        psi = run(c)
        assert abs(psi[flipped_index]) > 0.999, (polarity, psi)


def test_cpauli_rejects_control_inside_string():
    c = Circuit(2)
    with pytest.raises(ValueError):
        c.cpauli(0, 1, "XI")


def test_inverse_undoes():
    rng = np.random.default_rng(3)
    c = Circuit(3)
    c.h(0)
    c.exp_pauli(float(rng.uniform()), "XYZ")
    c.cnot(0, 2)
    c.ry(1, 0.3)
    both = c.copy().extend(c.inverse().gates)
    both.global_phase *= c.inverse().global_phase
    np.testing.assert_allclose(run(both), zero_state(3), atol=1e-13)


def test_pad_adds_idle_qubits():
    c = Circuit(2)
    c.h(0)
    c.cnot(0, 1)
    padded = c.pad(1)
    assert padded.n_qubits == 3
    psi = run(padded)
    np.testing.assert_allclose(psi[:4], run(c), atol=1e-14)
    np.testing.assert_allclose(psi[4:], 0.0, atol=1e-14)


def test_expectation_matches_dense():
    c = Circuit(2)
    c.h(0)
    c.cnot(0, 1)
    psi = run(c)
    np.testing.assert_allclose(expectation(c, "ZZ"),
                               np.real(psi.conj()
                                       @ dense_string("ZZ") @ psi),
                               atol=1e-14)


def test_sample_expectation_reproducible_and_converging():
    c = Circuit(2)
    c.h(0)
    c.ry(1, 0.4)
    c.cnot(0, 1)
    a = sample_expectation(c, "XZ", 2000, seed=9)
    b = sample_expectation(c, "XZ", 2000, seed=9)
    assert a == b
    big = sample_expectation(c, "XZ", 200000, seed=10)
    assert abs(big - expectation(c, "XZ")) < 0.01


def test_sample_expectation_identity_string():
    c = Circuit(1)
    c.h(0)
    assert sample_expectation(c, "I", 100, seed=0) == 1.0


def test_fold_preserves_unitary():
    c = Circuit(2)
    c.h(0)
    c.cnot(0, 1)
    c.ry(1, 1.3)
    for scale in (1, 3, 5):
        folded = fold(c, scale)
        assert len(folded.gates) == scale * len(c.gates)
        assert allclose_up_to_phase(run(folded), run(c), tol=1e-12)


def test_fold_rejects_even_scale():
    c = Circuit(1)
    c.h(0)
    with pytest.raises(ValueError):
        fold(c, 2)


def test_depolarizing_channel_single_qubit():
    """Each touched qubit passes the channel once per gate, contracting the
    Bloch vector by (1 - 4p/3) per slot (measurement rotations included)."""
    p = 0.12
    shrink = 1.0 - 4.0 * p / 3.0
    c = Circuit(1)
    c.x(0)
    # Z needs no measurement rotation: exactly one noise slot
    got = density_expectation(c, "Z", noise=NoiseModel(p))
    np.testing.assert_allclose(got, -shrink, atol=1e-12)
    c = Circuit(1)
    c.h(0)
    # X measurement adds one rotation gate, hence a second slot
    got = density_expectation(c, "X", noise=NoiseModel(p))
    np.testing.assert_allclose(got, shrink ** 2, atol=1e-12)


def test_noise_scales_with_folding():
    c = Circuit(1)
    c.h(0)
    vals = [density_expectation(fold(c, s), "X", noise=NoiseModel(0.02))
            for s in (1, 3, 5)]
    assert vals[0] > vals[1] > vals[2]


def test_sampled_noisy_tracks_density():
    c = Circuit(2)
    c.h(0)
    c.cnot(0, 1)
    p = 0.01
    dens = density_expectation(c, "ZZ", noise=NoiseModel(p))
    sampled = sample_expectation(c, "ZZ", 150000, noise=NoiseModel(p),
                                 seed=5)
    assert abs(sampled - dens) < 0.01


def test_run_rejects_wrong_dimension():
    c = Circuit(2)
    with pytest.raises(ValueError):
        run(c, np.zeros(3, dtype=complex))
