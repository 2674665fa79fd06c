"""Pauli-string algebra and real-coefficient Pauli-sum Hamiltonians.

A Pauli string is a plain ``str`` over the alphabet ``IXYZ`` whose p-th
character is the letter acting on qubit p (qubit 0 first).  Basis states are
indexed little-endian: bit p of the amplitude index is the state of qubit p.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Tuple

import numpy as np

LETTERS = "IXYZ"

_I = np.eye(2, dtype=complex)
_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

DENSE_1Q = {"I": _I, "X": _X, "Y": _Y, "Z": _Z}

# Single-letter products: (a, b) -> (letter of a*b, phase).
_PAULI_MULT: Dict[Tuple[str, str], Tuple[str, complex]] = {
    ("I", "I"): ("I", 1.0), ("I", "X"): ("X", 1.0),
    ("I", "Y"): ("Y", 1.0), ("I", "Z"): ("Z", 1.0),
    ("X", "I"): ("X", 1.0), ("X", "X"): ("I", 1.0),
    ("X", "Y"): ("Z", 1.0j), ("X", "Z"): ("Y", -1.0j),
    ("Y", "I"): ("Y", 1.0), ("Y", "X"): ("Z", -1.0j),
    ("Y", "Y"): ("I", 1.0), ("Y", "Z"): ("X", 1.0j),
    ("Z", "I"): ("Z", 1.0), ("Z", "X"): ("Y", 1.0j),
    ("Z", "Y"): ("X", -1.0j), ("Z", "Z"): ("I", 1.0),
}

MERGE_TOL = 1e-12


def identity_string(n_qubits: int) -> str:
    return "I" * n_qubits


def multiply_strings(a: str, b: str) -> Tuple[str, complex]:
    """Product of two Pauli strings: returns (string, phase) with a*b = phase*string."""
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    phase = 1.0 + 0.0j
    out = []
    for la, lb in zip(a, b):
        lc, ph = _PAULI_MULT[(la, lb)]
        out.append(lc)
        phase *= ph
    return "".join(out), phase


def strings_commute(a: str, b: str) -> bool:
    """Pauli strings either commute or anticommute; True if they commute."""
    clashes = sum(
        1 for la, lb in zip(a, b) if la != "I" and lb != "I" and la != lb
    )
    return clashes % 2 == 0


def merge_terms(terms: Iterable[Tuple[str, complex]],
                tol: float = MERGE_TOL) -> Dict[str, complex]:
    """Sum coefficients of like strings, dropping entries below tol."""
    acc: Dict[str, complex] = {}
    for string, coef in terms:
        acc[string] = acc.get(string, 0.0) + coef
    return {s: c for s, c in acc.items() if abs(c) > tol}


def string_support(string: str) -> Tuple[int, ...]:
    return tuple(q for q, letter in enumerate(string) if letter != "I")


def pauli_action(string: str) -> Tuple[int, np.ndarray]:
    """Bit-level action of a Pauli string on little-endian basis states.

    Returns (flip, phases) such that string |b> = phases[b] |b ^ flip>.
    """
    n = len(string)
    flip = 0
    zy_mask = 0
    n_y = 0
    for q, letter in enumerate(string):
        if letter in ("X", "Y"):
            flip |= 1 << q
        if letter in ("Z", "Y"):
            zy_mask |= 1 << q
        if letter == "Y":
            n_y += 1
    idx = np.arange(1 << n, dtype=np.uint64)
    signs = 1.0 - 2.0 * (np.bitwise_count(idx & np.uint64(zy_mask)) & 1)
    phases = (1.0j ** n_y) * signs
    return flip, phases.astype(complex)


def apply_string(string: str, psi: np.ndarray,
                 action: Tuple[int, np.ndarray] | None = None) -> np.ndarray:
    """Return string @ psi for a statevector psi (little-endian indexing)."""
    flip, phases = pauli_action(string) if action is None else action
    if flip == 0:
        return phases * psi
    idx = np.arange(psi.size) ^ flip
    return (phases * psi)[idx]


def expectation_string(string: str, psi: np.ndarray) -> float:
    """<psi| string |psi>, real for any Pauli string on a normalized state."""
    val = np.vdot(psi, apply_string(string, psi))
    return float(val.real)


def dense_string(string: str) -> np.ndarray:
    """Dense matrix of a Pauli string (qubit 0 = least significant index bit)."""
    mat = np.array([[1.0 + 0.0j]])
    for letter in string:  # kron with new qubit as the *most* significant factor
        mat = np.kron(DENSE_1Q[letter], mat)
    return mat


@dataclass(frozen=True)
class PauliTerm:
    """One summand xi * P with a real coefficient."""

    string: str
    coefficient: float

    def __post_init__(self):
        if any(c not in LETTERS for c in self.string):
            raise ValueError(f"bad Pauli string {self.string!r}")


class PauliHamiltonian:
    """Real-coefficient sum of Pauli strings with an explicit identity term.

    Construction merges like strings (tolerance 1e-12) and fails loudly if any
    merged coefficient has |imag| > 1e-12; the identity term is always kept,
    even at coefficient zero.
    """

    def __init__(self, n_qubits: int, terms: Iterable[Tuple[str, complex]]):
        self.n_qubits = int(n_qubits)
        ident = identity_string(self.n_qubits)
        merged = merge_terms(terms, tol=0.0)
        cleaned: List[PauliTerm] = []
        id_coef = 0.0
        for string, coef in merged.items():
            if len(string) != self.n_qubits:
                raise ValueError(
                    f"term {string!r} does not act on {self.n_qubits} qubits")
            if abs(coef.imag) > MERGE_TOL:
                raise ValueError(
                    f"non-real coefficient {coef} for {string!r}; "
                    "the fermionic input was not Hermitian")
            re = float(coef.real)
            if string == ident:
                id_coef = re
            elif abs(re) > MERGE_TOL:
                cleaned.append(PauliTerm(string, re))
        cleaned.sort(key=lambda t: t.string)
        self.identity_coefficient = id_coef
        self.terms: Tuple[PauliTerm, ...] = tuple(cleaned)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[PauliTerm]:
        return iter(self.terms)

    def all_terms(self) -> List[PauliTerm]:
        """All terms including the explicit identity term (listed first)."""
        ident = PauliTerm(identity_string(self.n_qubits),
                          self.identity_coefficient)
        return [ident, *self.terms]

    def coefficient(self, string: str) -> float:
        if string == identity_string(self.n_qubits):
            return self.identity_coefficient
        for term in self.terms:
            if term.string == string:
                return term.coefficient
        return 0.0

    def matrix(self) -> np.ndarray:
        """Dense Hermitian matrix (2^n x 2^n)."""
        dim = 1 << self.n_qubits
        mat = np.zeros((dim, dim), dtype=complex)
        for term in self.all_terms():
            mat += term.coefficient * dense_string(term.string)
        return mat

    def expectation(self, psi: np.ndarray) -> float:
        val = self.identity_coefficient
        for term in self.terms:
            val += term.coefficient * expectation_string(term.string, psi)
        return float(val)

    def to_text(self) -> str:
        """One term per line: coefficient, a tab, then the string."""
        lines = [f"{t.coefficient!r}\t{t.string}" for t in self.all_terms()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "PauliHamiltonian":
        terms = []
        n = None
        for line in text.strip().splitlines():
            coef_s, string = line.split("\t")
            if n is None:
                n = len(string)
            terms.append((string, float(coef_s)))
        if n is None:
            raise ValueError("empty Pauli-sum text")
        return cls(n, terms)

    def __repr__(self) -> str:
        return (f"PauliHamiltonian(n_qubits={self.n_qubits}, "
                f"terms={len(self.terms)}+identity)")
