"""Statevector circuit simulator with stochastic depolarizing noise.

Gates: H, X, Ry, Rz, CNOT, Pauli strings controlled on an ancilla value
(polarity 0 or 1), and exact Pauli-string rotations exp(-i theta P) applied
as two-level rotations in the string's eigenbasis.  Amplitudes are indexed
little-endian (bit p of the index = qubit p).

Noise model: after each gate, each qubit the gate touches independently
suffers a uniformly random X/Y/Z error with probability p.  Sampling is
trajectory-based and exactly reproduces per-shot trajectory statistics:
shots with zero or one error event reuse cached prefix/suffix statevectors
(the outcome law for a shot depends only on its trajectory's final state, so
grouping equal trajectories is exact); shots with two or more events are
replayed individually.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from .pauli import (
    apply_string,
    dense_string,
    expectation_string,
    pauli_action,
    string_support,
)

NORM_TOL = 1e-10

GATE_KINDS = ("h", "x", "ry", "rz", "cnot", "cpauli", "exp_pauli")


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: Tuple[int, ...]
    angle: float | None = None
    string: str | None = None
    polarity: int | None = None

    @property
    def touched(self) -> Tuple[int, ...]:
        return self.qubits

    def inverse(self) -> "Gate":
        if self.kind in ("h", "x", "cnot", "cpauli"):
            return self
        return Gate(self.kind, self.qubits, -self.angle, self.string,
                    self.polarity)


@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing probability per gate per touched qubit, plus a seed."""

    p: float
    seed: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"noise probability {self.p} outside [0, 1]")


class Circuit:
    """Ordered gate list on a fixed register, with a tracked global phase."""

    def __init__(self, n_qubits: int):
        self.n_qubits = int(n_qubits)
        self.gates: List[Gate] = []
        self.global_phase = 1.0 + 0.0j

    def _check(self, *qubits: int):
        for q in qubits:
            if not 0 <= q < self.n_qubits:
                raise ValueError(f"qubit {q} outside register")

    def add(self, gate: Gate) -> "Circuit":
        self._check(*gate.qubits)
        self.gates.append(gate)
        return self

    def h(self, q: int) -> "Circuit":
        return self.add(Gate("h", (q,)))

    def x(self, q: int) -> "Circuit":
        return self.add(Gate("x", (q,)))

    def ry(self, q: int, theta: float) -> "Circuit":
        return self.add(Gate("ry", (q,), float(theta)))

    def rz(self, q: int, theta: float) -> "Circuit":
        return self.add(Gate("rz", (q,), float(theta)))

    def cnot(self, control: int, target: int) -> "Circuit":
        if control == target:
            raise ValueError("cnot control equals target")
        return self.add(Gate("cnot", (control, target)))

    def cpauli(self, control: int, polarity: int, string: str) -> "Circuit":
        if len(string) != self.n_qubits:
            raise ValueError("controlled string must span the register")
        if string[control] != "I":
            raise ValueError("control qubit must be outside the string")
        if polarity not in (0, 1):
            raise ValueError("polarity is 0 or 1")
        qubits = (control, *string_support(string))
        return self.add(Gate("cpauli", qubits, None, string, polarity))

    def exp_pauli(self, theta: float, string: str) -> "Circuit":
        if len(string) != self.n_qubits:
            raise ValueError("rotation string must span the register")
        support = string_support(string)
        if not support:
            # exp(-i theta I) is a pure phase; track it instead of a gate
            self.global_phase *= np.exp(-1.0j * theta)
            return self
        return self.add(Gate("exp_pauli", support, float(theta), string))

    def extend(self, gates: Iterable[Gate]) -> "Circuit":
        for g in gates:
            self.add(g)
        return self

    def copy(self) -> "Circuit":
        c = Circuit(self.n_qubits)
        c.gates = list(self.gates)
        c.global_phase = self.global_phase
        return c

    def inverse(self) -> "Circuit":
        c = Circuit(self.n_qubits)
        c.gates = [g.inverse() for g in reversed(self.gates)]
        c.global_phase = np.conj(self.global_phase)
        return c

    def pad(self, extra: int) -> "Circuit":
        """Same gates on a register widened by ``extra`` high qubits."""
        c = Circuit(self.n_qubits + extra)
        tail = "I" * extra
        for g in self.gates:
            string = g.string + tail if g.string is not None else None
            c.gates.append(Gate(g.kind, g.qubits, g.angle, string, g.polarity))
        c.global_phase = self.global_phase
        return c

    def noise_slots(self) -> List[Tuple[int, int]]:
        """All (gate index, qubit) pairs where a depolarizing event can fire."""
        return [(gi, q) for gi, g in enumerate(self.gates) for q in g.touched]

    def to_text(self) -> str:
        """One gate per line: kind, qubits, then angle / polarity+string."""
        lines = []
        for g in self.gates:
            parts = [g.kind, ",".join(map(str, g.qubits))]
            if g.angle is not None:
                parts.append(repr(g.angle))
            if g.string is not None:
                if g.polarity is not None:
                    parts.append(str(g.polarity))
                parts.append(g.string)
            lines.append(" ".join(parts))
        return "\n".join(lines) + "\n"

    def __len__(self) -> int:
        return len(self.gates)


_H = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)
_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


def _ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(theta: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * theta), 0.0],
                     [0.0, np.exp(0.5j * theta)]], dtype=complex)


_PAULI_1Q = {
    0: np.array([[0, 1], [1, 0]], dtype=complex),
    1: np.array([[0, -1j], [1j, 0]], dtype=complex),
    2: np.array([[1, 0], [0, -1]], dtype=complex),
}


@lru_cache(maxsize=None)
def _cached_action(string: str):
    return pauli_action(string)


@lru_cache(maxsize=None)
def _control_mask(n: int, control: int, polarity: int) -> np.ndarray:
    idx = np.arange(1 << n)
    sel = ((idx >> control) & 1) == polarity
    return idx[sel]


def _apply_1q(psi: np.ndarray, mat: np.ndarray, q: int,
              n: int) -> np.ndarray:
    shaped = psi.reshape(1 << (n - q - 1), 2, 1 << q)
    a0 = shaped[:, 0, :]
    a1 = shaped[:, 1, :]
    out = np.empty_like(shaped)
    out[:, 0, :] = mat[0, 0] * a0 + mat[0, 1] * a1
    out[:, 1, :] = mat[1, 0] * a0 + mat[1, 1] * a1
    return out.reshape(psi.shape)


def apply_gate(psi: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    """Return the statevector after one gate."""
    kind = gate.kind
    if kind == "h":
        return _apply_1q(psi, _H, gate.qubits[0], n)
    if kind == "x":
        return _apply_1q(psi, _X, gate.qubits[0], n)
    if kind == "ry":
        return _apply_1q(psi, _ry(gate.angle), gate.qubits[0], n)
    if kind == "rz":
        return _apply_1q(psi, _rz(gate.angle), gate.qubits[0], n)
    if kind == "cnot":
        control, target = gate.qubits
        sel = _control_mask(n, control, 1)
        out = psi.copy()
        out[sel] = psi[sel ^ (1 << target)]
        return out
    if kind == "cpauli":
        flip, phases = _cached_action(gate.string)
        sel = _control_mask(n, gate.qubits[0], gate.polarity)
        out = psi.copy()
        src = sel ^ flip
        out[sel] = phases[src] * psi[src]
        return out
    if kind == "exp_pauli":
        action = _cached_action(gate.string)
        return (math.cos(gate.angle) * psi
                - 1.0j * math.sin(gate.angle) * apply_string(
                    gate.string, psi, action))
    raise ValueError(f"unknown gate kind {kind!r}")


def _apply_error(psi: np.ndarray, which: int, q: int, n: int) -> np.ndarray:
    return _apply_1q(psi, _PAULI_1Q[which], q, n)


def zero_state(n: int) -> np.ndarray:
    psi = np.zeros(1 << n, dtype=complex)
    psi[0] = 1.0
    return psi


def run(circuit: Circuit, init: np.ndarray | None = None,
        check_norm: bool = True) -> np.ndarray:
    """Noiseless statevector after the whole circuit (global phase applied)."""
    n = circuit.n_qubits
    psi = zero_state(n) if init is None else np.asarray(init, dtype=complex).copy()
    if psi.size != 1 << n:
        raise ValueError("initial state has the wrong dimension")
    for gate in circuit.gates:
        psi = apply_gate(psi, gate, n)
        if check_norm:
            nrm = np.linalg.norm(psi)
            if abs(nrm - 1.0) > NORM_TOL:
                raise RuntimeError(
                    f"norm drifted to {nrm} after {gate}; unitarity broken")
    return circuit.global_phase * psi


def expectation(circuit: Circuit, string: str,
                init: np.ndarray | None = None) -> float:
    """Exact <P> on the final state of a noiseless circuit."""
    psi = run(circuit, init, check_norm=False)
    return expectation_string(string, psi)


def measurement_rotations(string: str) -> List[Gate]:
    """Gates rotating each non-identity letter into the Z basis (X via H,
    Y via Rz(-pi/2) then H)."""
    gates: List[Gate] = []
    for q, letter in enumerate(string):
        if letter == "X":
            gates.append(Gate("h", (q,)))
        elif letter == "Y":
            gates.append(Gate("rz", (q,), -math.pi / 2.0))
            gates.append(Gate("h", (q,)))
    return gates


def _parity_signs(n: int, support: Sequence[int]) -> np.ndarray:
    mask = 0
    for q in support:
        mask |= 1 << q
    idx = np.arange(1 << n, dtype=np.uint64)
    return 1.0 - 2.0 * (np.bitwise_count(idx & np.uint64(mask)) & 1)


def _even_probability(psi: np.ndarray, signs: np.ndarray) -> float:
    prob = np.abs(psi) ** 2
    return min(max(float(prob[signs > 0].sum()), 0.0), 1.0)


def sample_expectation(circuit: Circuit, string: str, shots: int,
                       noise: NoiseModel | None = None,
                       seed: int | None = None,
                       init: np.ndarray | None = None) -> float:
    """Shot-sampled <P>: basis-rotate, sample Z parities, average the +-1s.

    Every stochastic choice is drawn from a generator seeded by ``seed`` (or,
    failing that, ``noise.seed``, else 0), so results are reproducible.
    """
    if shots < 1:
        raise ValueError("shots must be positive")
    if len(string) != circuit.n_qubits:
        raise ValueError("measured string must span the register")
    support = string_support(string)
    meas = circuit.copy().extend(measurement_rotations(string))
    if seed is None and noise is not None:
        seed = noise.seed
    rng = np.random.default_rng(0 if seed is None else seed)

    n = circuit.n_qubits
    signs = _parity_signs(n, support)
    if not support:
        return 1.0

    if noise is None or noise.p == 0.0:
        psi = run(meas, init, check_norm=False)
        k = rng.binomial(shots, _even_probability(psi, signs))
        return (2.0 * k - shots) / shots

    return _sample_noisy(meas, signs, shots, noise.p, rng, init)


def _sample_noisy(meas: Circuit, signs: np.ndarray, shots: int, p: float,
                  rng: np.random.Generator,
                  init: np.ndarray | None) -> float:
    n = meas.n_qubits
    slots = meas.noise_slots()
    n_slots = len(slots)
    if n_slots == 0:
        psi = run(meas, init, check_norm=False)
        k = rng.binomial(shots, _even_probability(psi, signs))
        return (2.0 * k - shots) / shots

    # Clean prefix states: prefix[g] = state after the first g gates.
    psi = zero_state(n) if init is None else np.asarray(init, dtype=complex).copy()
    prefix = [psi]
    for gate in meas.gates:
        psi = apply_gate(psi, gate, n)
        prefix.append(psi)
    p_even_clean = _even_probability(prefix[-1], signs)

    # Error counts per shot follow Binomial(n_slots, p); conditioned on the
    # count, the error slots are a uniform subset and types are uniform X/Y/Z.
    counts = rng.binomial(n_slots, p, size=shots)
    total = 0.0

    n_clean = int(np.sum(counts == 0))
    if n_clean:
        k = rng.binomial(n_clean, p_even_clean)
        total += 2.0 * k - n_clean

    n_single = int(np.sum(counts == 1))
    if n_single:
        slot_draw = rng.integers(0, n_slots, size=n_single)
        type_draw = rng.integers(0, 3, size=n_single)
        keys, group_counts = np.unique(
            slot_draw * 3 + type_draw, return_counts=True)
        for key, m in zip(keys, group_counts):
            slot_i, which = divmod(int(key), 3)
            gi, q = slots[slot_i]
            state = _apply_error(prefix[gi + 1], which, q, n)
            for gate in meas.gates[gi + 1:]:
                state = apply_gate(state, gate, n)
            k = rng.binomial(int(m), _even_probability(state, signs))
            total += 2.0 * k - int(m)

    for count in counts[counts >= 2]:
        chosen = np.sort(rng.choice(n_slots, size=int(count), replace=False))
        types = rng.integers(0, 3, size=int(count))
        state = prefix[0].copy()
        ptr = 0
        for gi, gate in enumerate(meas.gates):
            state = apply_gate(state, gate, n)
            while ptr < len(chosen) and slots[chosen[ptr]][0] == gi:
                state = _apply_error(state, int(types[ptr]),
                                     slots[chosen[ptr]][1], n)
                ptr += 1
        outcome = 1.0 if rng.random() < _even_probability(state, signs) else -1.0
        total += outcome

    return total / shots


def density_expectation(circuit: Circuit, string: str,
                        noise: NoiseModel | None = None,
                        init: np.ndarray | None = None) -> float:
    """Exact noise-averaged <P> by dense density-matrix evolution (n <= 6).

    Independent cross-check for the trajectory sampler: gates act as dense
    unitaries built from projectors and Pauli matrices, and each touched
    qubit passes through the depolarizing channel
    rho -> (1-p) rho + (p/3)(X rho X + Y rho Y + Z rho Z).
    """
    n = circuit.n_qubits
    if n > 6:
        raise ValueError("density-matrix cross-check is limited to 6 qubits")
    if len(string) != n:
        raise ValueError("measured string must span the register")
    meas = circuit.copy().extend(measurement_rotations(string))
    if init is None:
        init = zero_state(n)
    rho = np.outer(init, np.conj(init))
    p = 0.0 if noise is None else noise.p
    for gate in meas.gates:
        u = _dense_gate(gate, n)
        rho = u @ rho @ u.conj().T
        if p > 0.0:
            for q in gate.touched:
                mix = np.zeros_like(rho)
                for which in range(3):
                    e = _dense_1q_op(_PAULI_1Q[which], q, n)
                    mix += e @ rho @ e.conj().T
                rho = (1.0 - p) * rho + (p / 3.0) * mix
    signs = _parity_signs(n, string_support(string))
    return float(np.real(np.sum(signs * np.diag(rho))))


def _dense_1q_op(mat: np.ndarray, q: int, n: int) -> np.ndarray:
    return np.kron(np.eye(1 << (n - q - 1)),
                   np.kron(mat, np.eye(1 << q)))


def _dense_gate(gate: Gate, n: int) -> np.ndarray:
    if gate.kind == "h":
        return _dense_1q_op(_H, gate.qubits[0], n)
    if gate.kind == "x":
        return _dense_1q_op(_X, gate.qubits[0], n)
    if gate.kind == "ry":
        return _dense_1q_op(_ry(gate.angle), gate.qubits[0], n)
    if gate.kind == "rz":
        return _dense_1q_op(_rz(gate.angle), gate.qubits[0], n)
    if gate.kind == "cnot":
        control, target = gate.qubits
        pz = _dense_1q_op(np.diag([1.0 + 0j, -1.0 + 0j]), control, n)
        eye = np.eye(1 << n)
        p1 = 0.5 * (eye - pz)
        p0 = 0.5 * (eye + pz)
        return p0 + p1 @ _dense_1q_op(_X, target, n)
    if gate.kind == "cpauli":
        control = gate.qubits[0]
        pz = _dense_1q_op(np.diag([1.0 + 0j, -1.0 + 0j]), control, n)
        eye = np.eye(1 << n)
        sel = 0.5 * (eye - pz) if gate.polarity == 1 else 0.5 * (eye + pz)
        rest = eye - sel
        return rest + sel @ dense_string(gate.string)
    if gate.kind == "exp_pauli":
        return (math.cos(gate.angle) * np.eye(1 << n)
                - 1.0j * math.sin(gate.angle) * dense_string(gate.string))
    raise ValueError(f"unknown gate kind {gate.kind!r}")


def fold(circuit: Circuit, scale: int) -> Circuit:
    """Global folding C (C^+ C)^((scale-1)/2); scale must be odd and >= 1."""
    if scale < 1 or scale % 2 == 0:
        raise ValueError(f"fold scale must be an odd positive integer, "
                         f"got {scale}")
    folded = circuit.copy()
    inv = circuit.inverse()
    for _ in range((scale - 1) // 2):
        folded.extend(inv.gates)
        folded.extend(circuit.gates)
    folded.global_phase = circuit.global_phase
    return folded


def allclose_up_to_phase(a: np.ndarray, b: np.ndarray,
                         tol: float = 1e-9) -> bool:
    """True if statevectors agree up to a single global phase."""
    a = np.asarray(a)
    b = np.asarray(b)
    k = int(np.argmax(np.abs(a)))
    if abs(a[k]) < 1e-12 or abs(b[k]) < 1e-12:
        return bool(np.allclose(a, b, atol=tol))
    phase = b[k] / a[k]
    return bool(abs(abs(phase) - 1.0) < tol and np.allclose(phase * a, b,
                                                            atol=tol))
