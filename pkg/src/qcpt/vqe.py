"""Single-parameter variational ground-state search with error mitigation.

The ansatz template is: initial X mask, a CNOT layer, fixed single-qubit
interlayer gates, one Ry(phi), then a second CNOT layer.  With a single
rotation parameter the energy is exactly sinusoidal,
E(phi) = a + b cos(phi) + c sin(phi), so the minimum comes from a
least-squares sinusoid fit over a handful of samples instead of an
iterative optimizer.

Digital zero-noise extrapolation (DZNE) folds the state-prep circuit to odd
scales s, measures each Hamiltonian term at every scale, and extrapolates
the per-term expectation values polynomially to scale 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .circuit import Circuit, NoiseModel, fold, run, sample_expectation
from .pauli import PauliHamiltonian, expectation_string

FIXED_GATE_KINDS = ("x", "ry")


def derive_seed(*keys: int) -> int:
    """Stable child seed from a tuple of integer keys."""
    return int(np.random.SeedSequence(entropy=tuple(
        int(k) & 0xFFFFFFFF for k in keys)).generate_state(1)[0])


@dataclass(frozen=True)
class AnsatzSpec:
    """Layout of the one-parameter ansatz.

    ``interlayer`` entries are ("x", qubit) or ("ry", qubit, angle); the
    default dimer layout keeps the occupation-setting gates in ``x_mask``
    and uses a single fixed Ry(pi/2) interlayer rotation.
    """

    n_qubits: int
    x_mask: Tuple[int, ...]
    cnot_first: Tuple[Tuple[int, int], ...]
    interlayer: Tuple[Tuple, ...]
    ry_qubit: int
    cnot_second: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        for entry in self.interlayer:
            if entry[0] not in FIXED_GATE_KINDS:
                raise ValueError(f"unsupported fixed gate {entry[0]!r}")


def dimer_ansatz(style: str = "x") -> AnsatzSpec:
    """Default 4-qubit dimer layout (qubits: site0 up, site1 up, site0 down,
    site1 down).

    At phi = 0 the prepared state superposes a doublon on each site,
    (|up dn on site 0> + |up dn on site 1>)/sqrt(2), <N> = 2; sweeping phi
    reaches the dimer singlet ground state exactly.  ``style="ry"`` replaces
    the occupation-mask X gates with Ry(pi) / Ry(-pi), which prepares the
    same states up to a global phase.
    """
    if style == "x":
        return AnsatzSpec(
            n_qubits=4,
            x_mask=(1, 3),
            cnot_first=(),
            interlayer=(("ry", 2, math.pi / 2.0),),
            ry_qubit=0,
            cnot_second=((2, 0), (0, 1), (2, 3)),
        )
    if style == "ry":
        return AnsatzSpec(
            n_qubits=4,
            x_mask=(),
            cnot_first=(),
            interlayer=(("ry", 1, math.pi), ("ry", 3, -math.pi),
                        ("ry", 2, math.pi / 2.0)),
            ry_qubit=0,
            cnot_second=((2, 0), (0, 1), (2, 3)),
        )
    raise ValueError(f"unknown ansatz style {style!r}")


def build_ansatz(spec: AnsatzSpec, phi: float) -> Circuit:
    """Assemble the circuit for one parameter value."""
    c = Circuit(spec.n_qubits)
    for q in spec.x_mask:
        c.x(q)
    for ctl, tgt in spec.cnot_first:
        c.cnot(ctl, tgt)
    for entry in spec.interlayer:
        if entry[0] == "x":
            c.x(entry[1])
        else:
            c.ry(entry[1], entry[2])
    c.ry(spec.ry_qubit, float(phi))
    for ctl, tgt in spec.cnot_second:
        c.cnot(ctl, tgt)
    return c


@dataclass
class EnergyEstimate:
    """One energy evaluation, with the per-term expectation values."""

    value: float
    phi: float
    mode: str
    scale: int
    terms: Dict[str, float] = field(default_factory=dict)


def energy(hamiltonian: PauliHamiltonian, spec: AnsatzSpec, phi: float,
           mode: str = "exact", shots: int = 12000,
           noise: NoiseModel | None = None, seed: int = 0,
           scale: int = 1) -> EnergyEstimate:
    """E(phi) as the identity coefficient plus the weighted term sum.

    ``mode="exact"`` evaluates term expectations on the statevector;
    ``mode="sampled"`` draws ``shots`` shots per term from the (folded,
    possibly noisy) circuit, with per-term seeds derived from ``seed``.
    """
    circ = build_ansatz(spec, phi)
    total = hamiltonian.identity_coefficient
    per_term: Dict[str, float] = {}
    if mode == "exact":
        if scale != 1:
            circ = fold(circ, scale)
        psi = run(circ, check_norm=False)
        for term in hamiltonian.terms:
            val = expectation_string(term.string, psi)
            per_term[term.string] = val
            total += term.coefficient * val
    elif mode == "sampled":
        folded = fold(circ, scale) if scale != 1 else circ
        for k, term in enumerate(hamiltonian.terms):
            val = sample_expectation(folded, term.string, shots, noise,
                                     seed=derive_seed(seed, scale, k))
            per_term[term.string] = val
            total += term.coefficient * val
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return EnergyEstimate(float(total), float(phi), mode, scale, per_term)


@dataclass
class SinusoidFit:
    a: float
    b: float
    c: float
    phi0: float
    residual: float


def fit_minimize(phis: Sequence[float], energies: Sequence[float],
                 atol: float = 1e-8) -> SinusoidFit:
    """Least-squares fit E = a + b cos(phi) + c sin(phi); phi0 minimizes it.

    Raises ValueError("flat landscape...") when b and c both vanish within
    ``atol``, since then no minimizing angle is defined.
    """
    phis = np.asarray(phis, dtype=float)
    energies = np.asarray(energies, dtype=float)
    if phis.size < 3:
        raise ValueError("need at least 3 samples to fit a sinusoid")
    design = np.column_stack(
        [np.ones_like(phis), np.cos(phis), np.sin(phis)])
    coef, *_ = np.linalg.lstsq(design, energies, rcond=None)
    a, b, c = (float(v) for v in coef)
    if math.hypot(b, c) < atol:
        raise ValueError(
            f"flat landscape: fitted amplitude {math.hypot(b, c):.2e} below "
            f"{atol:.2e}, no minimum to report")
    phi0 = math.atan2(-c, -b)
    residual = float(np.max(np.abs(design @ coef - energies)))
    return SinusoidFit(a, b, c, phi0, residual)


def phi_samples(n: int = 5) -> np.ndarray:
    """n equally spaced parameter values over one period."""
    if n < 3:
        raise ValueError("need at least 3 phase samples")
    return np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)


def dzne(scales: Sequence[int], values: Sequence[float],
         order: int = 1) -> Tuple[float, bool]:
    """Extrapolate per-term <P>(scale) to scale 0 with a degree-``order``
    polynomial fit; Richardson behaviour comes from order = len(scales)-1.

    Returns (value, clamped): expectation values outside [-1, 1] are clamped
    to the boundary and flagged.
    """
    scales = np.asarray(scales, dtype=float)
    values = np.asarray(values, dtype=float)
    if scales.size != values.size:
        raise ValueError("scales and values must pair up")
    if scales.size < 2:
        raise ValueError("extrapolation needs at least two scales")
    if np.any(scales < 1) or np.any(np.diff(scales) <= 0):
        raise ValueError("scales must be increasing and >= 1")
    if not 1 <= order < scales.size:
        raise ValueError(f"order {order} needs at least order+1 scales")
    coeffs = np.polyfit(scales, values, deg=order)
    val = float(np.polyval(coeffs, 0.0))
    if abs(val) > 1.0:
        return math.copysign(1.0, val), True
    return val, False


@dataclass
class TermMitigation:
    string: str
    coefficient: float
    per_scale: Dict[int, float]
    mitigated: float
    exact: float
    clamped: bool


@dataclass
class MitigationReport:
    phi: float
    scales: Tuple[int, ...]
    order: int
    rows: List[TermMitigation]
    energy_raw: float
    energy_mitigated: float
    energy_exact: float


def mitigate_energy(hamiltonian: PauliHamiltonian, spec: AnsatzSpec,
                    phi: float, scales: Sequence[int] = (1, 3, 5),
                    order: int = 1, shots: int = 12000,
                    noise: NoiseModel | None = None,
                    seed: int = 0) -> MitigationReport:
    """Per-term DZNE at a fixed phi: sample every term at every fold scale,
    extrapolate each to scale 0, and rebuild raw and mitigated energies."""
    scales = tuple(int(s) for s in scales)
    estimates = {
        s: energy(hamiltonian, spec, phi, mode="sampled", shots=shots,
                  noise=noise, seed=derive_seed(seed, 101, s), scale=s)
        for s in scales
    }
    reference = energy(hamiltonian, spec, phi, mode="exact")
    rows: List[TermMitigation] = []
    e_raw = hamiltonian.identity_coefficient
    e_mit = hamiltonian.identity_coefficient
    for term in hamiltonian.terms:
        per_scale = {s: estimates[s].terms[term.string] for s in scales}
        mitigated, clamped = dzne(scales, [per_scale[s] for s in scales],
                                  order=order)
        rows.append(TermMitigation(term.string, term.coefficient, per_scale,
                                   mitigated, reference.terms[term.string],
                                   clamped))
        e_raw += term.coefficient * per_scale[scales[0]]
        e_mit += term.coefficient * mitigated
    return MitigationReport(float(phi), scales, order, rows, float(e_raw),
                            float(e_mit), reference.value)


@dataclass
class GroundResult:
    fit: SinusoidFit
    phis: np.ndarray
    energies: np.ndarray
    energy_min: float


def minimize_energy(hamiltonian: PauliHamiltonian, spec: AnsatzSpec,
                    n_phi: int = 5, mode: str = "exact", shots: int = 12000,
                    noise: NoiseModel | None = None,
                    seed: int = 0) -> GroundResult:
    """Sample E(phi) on an equally spaced grid, fit, and evaluate the fitted
    minimum value a - hypot(b, c)."""
    phis = phi_samples(n_phi)
    energies = np.array([
        energy(hamiltonian, spec, phi, mode=mode, shots=shots, noise=noise,
               seed=derive_seed(seed, 7, k)).value
        for k, phi in enumerate(phis)
    ])
    fit = fit_minimize(phis, energies)
    e_min = fit.a - math.hypot(fit.b, fit.c)
    return GroundResult(fit, phis, energies, float(e_min))
