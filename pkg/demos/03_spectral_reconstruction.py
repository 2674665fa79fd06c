"""
From time series to spectral density
====================================

The frequency-domain Green's function is a damped half-line Fourier
integral, evaluated with Gauss-Legendre quadrature so the time series is
only needed at the rule's nodes.  The spectral density rho = -Im G / pi
then shows the cluster's excitation poles as Lorentzians of width eta.

The dimer at u = 3 has poles at +-1.5 (weight 0.45 each) and +-3.5
(weight 0.05 each); their weights must integrate to one, and a noisy
measurement visibly eats into that budget.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from qcpt.circuit import NoiseModel
from qcpt.ed import ed_solve, exact_g_t
from qcpt.fermion import build_hubbard_cluster, dimer_spec
from qcpt.green import TrotterPlan, retarded_g
from qcpt.spectral import legendre_rule, spectral, to_frequency

here = Path(__file__).resolve().parent

ham = build_hubbard_cluster(dimer_spec(3.0, 1.0))
sol = ed_solve(ham)
rule = legendre_rule(100, 30.0)
omega = np.linspace(-8.0, 8.0, 801)
eta = 0.2

POLES = (-3.5, -1.5, 1.5, 3.5)
WEIGHTS = (0.05, 0.45, 0.45, 0.05)

# --- noiseless circuit measurement on the quadrature nodes -----------------
series = retarded_g(ham, sol.ground_state, 1, 1, rule.nodes,
                    plan=TrotterPlan(60), check_convention=False)
rho_circ = spectral(to_frequency(series, rule, omega, eta)).rho

# --- the same, with shots and a depolarizing channel ------------------------
noisy = retarded_g(ham, sol.ground_state, 1, 1, rule.nodes,
                   plan=TrotterPlan(60), mode="sampled", shots=12000,
                   noise=NoiseModel(1e-4), seed=7, check_convention=False)
rho_noisy = spectral(to_frequency(noisy, rule, omega, eta)).rho

# --- exact reference straight from the pole sum -----------------------------
rho_exact = spectral(to_frequency((rule.nodes,
                                   exact_g_t(sol, 1, 1, "up", rule.nodes)),
                                  rule, omega, eta)).rho

for label, rho in (("exact poles", rho_exact), ("circuit", rho_circ),
                   ("circuit + noise", rho_noisy)):
    print(f"{label:16s} sum rule = {np.trapezoid(rho, omega):.4f}")

fig, ax = plt.subplots(figsize=(7, 4))
ax.plot(omega, rho_exact, color="0.75", lw=2.5, label="exact")
ax.plot(omega, rho_circ, "--", color="tab:blue", lw=1.2, label="circuit")
ax.plot(omega, rho_noisy, "-", color="tab:red", lw=1.0, alpha=0.8,
        label="circuit, p=1e-4, 12000 shots")
for pole, w in zip(POLES, WEIGHTS):
    ax.vlines(pole, 0.0, w / (np.pi * eta), color="0.4", lw=0.8, ls=":")
ax.set_xlabel("omega")
ax.set_ylabel("rho_11(omega)")
ax.set_xlim(omega[0], omega[-1])
ax.legend(frameon=False)
fig.tight_layout()
out = here / "spectral_reconstruction.png"
fig.savefig(out, dpi=150)
print(f"wrote {out}")
