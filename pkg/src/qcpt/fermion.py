"""Hubbard cluster Hamiltonians and the Jordan-Wigner map to qubits.

Occupation convention: qubit basis state "1" means an occupied spin-orbital,
so the annihilator of mode p maps to (prod_{a<p} Z_a) (X_p + i Y_p)/2.  Modes
are spin-orbitals; the default ordering places all spin-up orbitals first
(site 0 up, site 1 up, ..., site 0 down, ...), selectable via ``ordering``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from .pauli import PauliHamiltonian, identity_string, multiply_strings

UP = "up"
DOWN = "down"
ORDERINGS = ("blocked", "interleaved")

# A fermionic product term: coefficient * prod of (mode, dagger) factors,
# applied right to left like operators.
FermionTerm = Tuple[complex, Tuple[Tuple[int, bool], ...]]


def mode_index(site: int, spin: str, n_sites: int,
               ordering: str = "blocked") -> int:
    """Spin-orbital index of (site, spin) under the chosen qubit ordering."""
    if spin not in (UP, DOWN):
        raise ValueError(f"spin must be 'up' or 'down', got {spin!r}")
    if not 0 <= site < n_sites:
        raise ValueError(f"site {site} outside cluster of {n_sites} sites")
    if ordering == "blocked":
        return site + (0 if spin == UP else n_sites)
    if ordering == "interleaved":
        return 2 * site + (0 if spin == UP else 1)
    raise ValueError(f"unknown ordering {ordering!r}")


@dataclass(frozen=True)
class FermionOpIndex:
    """Label of a single spin-orbital: cluster site index plus spin."""

    site: int
    spin: str

    def mode(self, n_sites: int, ordering: str = "blocked") -> int:
        return mode_index(self.site, self.spin, n_sites, ordering)


@dataclass
class HubbardSpec:
    """Hubbard cluster: sites, bonds, hopping gamma, interaction U, mu.

    With ``half_filling`` set, mu is pinned to U/2 and the ``mu`` field must
    be left as None.  Attractive U < 0 requires ``allow_attractive``.
    """

    sites: Tuple[Tuple[int, int], ...]
    bonds: Tuple[Tuple[int, int], ...]
    gamma: float = 1.0
    u: float = 0.0
    mu: float | None = None
    half_filling: bool = True
    allow_attractive: bool = False

    def __post_init__(self):
        self.sites = tuple(tuple(int(x) for x in s) for s in self.sites)
        if len(set(self.sites)) != len(self.sites):
            raise ValueError("duplicate site coordinates")
        bonds = []
        seen = set()
        for a, b in self.bonds:
            a, b = int(a), int(b)
            if a == b:
                raise ValueError(f"bond ({a},{b}) connects a site to itself")
            if not (0 <= a < len(self.sites) and 0 <= b < len(self.sites)):
                raise ValueError(f"bond ({a},{b}) references a missing site")
            key = (min(a, b), max(a, b))
            if key in seen:
                raise ValueError(f"duplicate bond ({a},{b})")
            seen.add(key)
            bonds.append((a, b))
        self.bonds = tuple(bonds)
        if self.u < 0 and not self.allow_attractive:
            raise ValueError(
                "attractive U < 0 requires allow_attractive=True")
        if self.half_filling and self.mu is not None:
            raise ValueError("half_filling pins mu = U/2; leave mu unset")
        if not self.half_filling and self.mu is None:
            raise ValueError("set mu explicitly or use half_filling")

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    @property
    def n_modes(self) -> int:
        return 2 * len(self.sites)

    @property
    def chemical_potential(self) -> float:
        return 0.5 * self.u if self.half_filling else float(self.mu)


def dimer_spec(u: float, gamma: float = 1.0, **kwargs) -> HubbardSpec:
    """Two-site cluster at half filling, the workhorse example."""
    return HubbardSpec(sites=((0, 0), (1, 0)), bonds=((0, 1),),
                       gamma=gamma, u=u, **kwargs)


def jw_ladder(mode: int, n_modes: int, dagger: bool = False,
              negate_string: bool = False) -> List[Tuple[str, complex]]:
    """Jordan-Wigner image of c_mode (or c_mode^+) as two Pauli strings.

    Returns [(string, coef), (string, coef)] for
    (prod_{a<mode} Z_a)(X_mode -+ i Y_mode)/2 with "-" for dagger.
    ``negate_string`` uses (-Z) factors instead, i.e. multiplies by (-1)^mode.
    """
    if not 0 <= mode < n_modes:
        raise ValueError(f"mode {mode} outside register of {n_modes}")
    z_part = "Z" * mode
    tail = "I" * (n_modes - mode - 1)
    sign = (-1.0) ** mode if negate_string else 1.0
    y_coef = -0.5j if dagger else 0.5j
    return [
        (z_part + "X" + tail, 0.5 * sign),
        (z_part + "Y" + tail, y_coef * sign),
    ]


def jw_string(mode: int, n_modes: int, letter: str) -> str:
    """The dressed operator Zbar...Z letter I...I used by Green's functions."""
    if letter not in ("X", "Y"):
        raise ValueError("dressed strings carry X or Y")
    return "Z" * mode + letter + "I" * (n_modes - mode - 1)


def jordan_wigner(terms: Sequence[FermionTerm], n_modes: int,
                  negate_string: bool = False) -> PauliHamiltonian:
    """Map a Hermitian sum of fermionic products to a PauliHamiltonian.

    Each term is (coef, ((mode, dagger), ...)) with factors applied right to
    left.  Raises if the merged result has an imaginary coefficient above
    1e-12, which signals a non-Hermitian input.
    """
    acc: Dict[str, complex] = {identity_string(n_modes): 0.0}
    for coef, factors in terms:
        partial: List[Tuple[str, complex]] = [(identity_string(n_modes), coef)]
        # operator products compose left to right in matrix order
        for mode, dagger in factors:
            ladder = jw_ladder(mode, n_modes, dagger, negate_string)
            nxt: List[Tuple[str, complex]] = []
            for s1, c1 in partial:
                for s2, c2 in ladder:
                    s, ph = multiply_strings(s1, s2)
                    nxt.append((s, c1 * c2 * ph))
            partial = nxt
        for s, c in partial:
            acc[s] = acc.get(s, 0.0) + c
    return PauliHamiltonian(n_modes, acc.items())


def hubbard_fermion_terms(spec: HubbardSpec,
                          ordering: str = "blocked") -> List[FermionTerm]:
    """Second-quantized term list for the cluster Hamiltonian."""
    n = spec.n_sites
    mu = spec.chemical_potential
    terms: List[FermionTerm] = []
    for a, b in spec.bonds:
        for spin in (UP, DOWN):
            p = mode_index(a, spin, n, ordering)
            q = mode_index(b, spin, n, ordering)
            terms.append((-spec.gamma, ((p, True), (q, False))))
            terms.append((-spec.gamma, ((q, True), (p, False))))
    for site in range(n):
        p_up = mode_index(site, UP, n, ordering)
        p_dn = mode_index(site, DOWN, n, ordering)
        terms.append((spec.u, ((p_up, True), (p_up, False),
                               (p_dn, True), (p_dn, False))))
        for p in (p_up, p_dn):
            terms.append((-mu, ((p, True), (p, False))))
    return terms


def build_hubbard_cluster(spec: HubbardSpec,
                          ordering: str = "blocked") -> PauliHamiltonian:
    """Jordan-Wigner qubit Hamiltonian of a Hubbard cluster.

    For the half-filled dimer this yields four XX/YY hopping strings, one
    ZZ string per site, and the explicit identity term.
    """
    if ordering not in ORDERINGS:
        raise ValueError(f"unknown ordering {ordering!r}")
    return jordan_wigner(hubbard_fermion_terms(spec, ordering), spec.n_modes)
