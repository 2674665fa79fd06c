"""Quantum-circuit cluster perturbation theory for small Hubbard clusters.

The package walks the full chain from a fermionic cluster Hamiltonian to
lattice excitation spectra:

``fermion``   Hubbard cluster specs and the Jordan-Wigner map.
``pauli``     Pauli-string algebra and Hamiltonian container.
``circuit``   Statevector simulator with depolarizing noise and folding.
``ed``        Exact diagonalization and Lehmann references.
``vqe``       One-parameter ansatz, energy landscape fit, DZNE mitigation.
``green``     Hadamard-test retarded Green's functions with Trotter U(t).
``spectral``  Time-to-frequency transform, spectral weight, sum rules.
``cpt``       Cluster perturbation theory, periodization, k-path spectra.
``pipeline``  File-based stages (ground / green / spectra) with manifest.
``verify``    Named invariant checks over the whole chain.
"""

__version__ = "0.1.0"

from .circuit import Circuit, NoiseModel, expectation, run, sample_expectation
from .config import ConfigError, RunConfig, default_ini, load_config
from .cpt import (TilingSpec, dimer_tiling, cpt_green, excitation_spectra,
                  fold_k, kpath, partition_hoppings, periodize, self_energy,
                  tau_q)
from .ed import ed_solve, exact_g_matrix, exact_g_t, lehmann_poles, \
    lehmann_spectral
from .fermion import (HubbardSpec, build_hubbard_cluster, dimer_spec,
                      jordan_wigner, mode_index)
from .green import (GreenTimeSeries, TrotterPlan, convention_check,
                    hadamard_test_f, retarded_g, trotter_circuit)
from .pauli import PauliHamiltonian, multiply_strings
from .pipeline import run_all, run_green, run_ground, run_spectra
from .spectral import (FrequencyGreen, QuadratureRule, SpectralSeries,
                       kramers_kronig_real, legendre_rule, spectral,
                       sum_rule, to_frequency)
from .vqe import (build_ansatz, derive_seed, dimer_ansatz, energy,
                  fit_minimize, minimize_energy, mitigate_energy)

__all__ = [
    "__version__",
    "Circuit", "NoiseModel", "expectation", "run", "sample_expectation",
    "ConfigError", "RunConfig", "default_ini", "load_config",
    "TilingSpec", "dimer_tiling", "cpt_green", "excitation_spectra",
    "fold_k", "kpath", "partition_hoppings", "periodize", "self_energy",
    "tau_q",
    "ed_solve", "exact_g_matrix", "exact_g_t", "lehmann_poles",
    "lehmann_spectral",
    "HubbardSpec", "build_hubbard_cluster", "dimer_spec", "jordan_wigner",
    "mode_index",
    "GreenTimeSeries", "TrotterPlan", "convention_check", "hadamard_test_f",
    "retarded_g", "trotter_circuit",
    "PauliHamiltonian", "multiply_strings",
    "run_all", "run_green", "run_ground", "run_spectra",
    "FrequencyGreen", "QuadratureRule", "SpectralSeries",
    "kramers_kronig_real", "legendre_rule", "spectral", "sum_rule",
    "to_frequency",
    "build_ansatz", "derive_seed", "dimer_ansatz", "energy", "fit_minimize",
    "minimize_energy", "mitigate_energy",
]
