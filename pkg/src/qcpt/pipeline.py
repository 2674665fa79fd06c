"""Pipeline stages: ground energies, Green's functions, lattice spectra.

Each stage writes plain CSV plus a shared ``manifest.json`` (config echo,
seeds, versions, timings, QC numbers, output index).  All CSV content is
deterministic for a fixed config and master seed: floats are printed with
Python's shortest round-trip repr and every stochastic quantity draws from
seeds derived per (stage, spin, pair, node), never from global state, so a
re-run reproduces the files byte for byte regardless of --jobs.

Stages only communicate through files: ``spectra`` reads the frequency
tables ``green`` wrote, so it can be re-run on its own.
"""

from __future__ import annotations

import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, List, Sequence

import numpy as np

from . import __version__
from .circuit import NoiseModel
from .config import RunConfig
from .cpt import TilingSpec, excitation_spectra, kpath
from .ed import ed_solve, exact_g_t, exact_g_matrix
from .fermion import HubbardSpec, build_hubbard_cluster, dimer_spec
from .green import TrotterPlan, convention_check, retarded_g
from .spectral import legendre_rule, spectral, sum_rule, to_frequency
from .vqe import (build_ansatz, derive_seed, dimer_ansatz, minimize_energy,
                  mitigate_energy)

SPINS = ("up", "down")


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return repr(float(x))


def write_csv(path: Path, header: Sequence[str], rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(x) for x in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def read_csv(path: Path):
    lines = path.read_text().strip().split("\n")
    header = lines[0].split(",")
    cols = {h: [] for h in header}
    for line in lines[1:]:
        for h, cell in zip(header, line.split(",")):
            cols[h].append(cell)
    return {h: np.array([float(c) for c in v])
            if h not in ("k_label", "term", "label") else np.array(v)
            for h, v in cols.items()}


def _load_manifest(out: Path) -> Dict:
    path = out / "manifest.json"
    if path.exists():
        return json.loads(path.read_text())
    return {"stages": {}}


def _save_manifest(out: Path, manifest: Dict, config: RunConfig) -> None:
    manifest["config"] = config.as_dict()
    manifest["versions"] = {
        "package": __version__,
        "python": sys.version.split()[0],
        "numpy": np.__version__,
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _model(config: RunConfig, u: float | None = None) -> HubbardSpec:
    u = config.u if u is None else float(u)
    if config.half_filling:
        return dimer_spec(u, config.gamma)
    return dimer_spec(u, config.gamma, half_filling=False, mu=config.mu)


def _noise(config: RunConfig) -> NoiseModel | None:
    if config.mode == "exact" or config.noise_p == 0.0:
        return None
    return NoiseModel(config.noise_p, config.seed)


def run_ground(config: RunConfig, out_dir: str | Path | None = None) -> Dict:
    """Energy sweep over u_sweep: exact reference, raw and DZNE-mitigated.

    In sampled mode the raw/mitigated pair is averaged over
    ``mitigation_seeds`` independent repetitions at the fitted phi0.  A fit
    that fails to converge is recorded for that U and the sweep continues.
    """
    out = Path(out_dir or config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t_start = time.perf_counter()
    ansatz = dimer_ansatz()
    rows: List = []
    term_rows: List = []
    errors: List[str] = []
    for iu, u in enumerate(config.u_sweep):
        ham = build_hubbard_cluster(_model(config, u))
        exact_e = ed_solve(ham).ground_energy
        seed_u = derive_seed(config.seed, 11, iu)
        try:
            fit = minimize_energy(ham, ansatz, n_phi=config.n_phi,
                                  mode=config.mode, shots=config.shots,
                                  noise=_noise(config), seed=seed_u)
        except ValueError as exc:
            errors.append(f"u={u}: fit failed: {exc}")
            rows.append((u, float("nan"), float("nan"), exact_e))
            continue
        if config.mode == "exact":
            rows.append((u, fit.energy_min, fit.energy_min, exact_e))
            continue
        raws, mits = [], []
        for rep in range(config.mitigation_seeds):
            rep_seed = derive_seed(config.seed, 17, iu, rep)
            report = mitigate_energy(ham, ansatz, fit.fit.phi0,
                                     scales=config.dzne_scales,
                                     order=config.dzne_order,
                                     shots=config.shots,
                                     noise=_noise(config), seed=rep_seed)
            raws.append(report.energy_raw)
            mits.append(report.energy_mitigated)
            if rep == 0:
                for tr in report.rows:
                    term_rows.append((u, report.phi, tr.string,
                                      tr.coefficient,
                                      *[tr.per_scale[s]
                                        for s in config.dzne_scales],
                                      tr.mitigated, tr.exact,
                                      int(tr.clamped)))
        rows.append((u, float(np.mean(raws)), float(np.mean(mits)),
                     exact_e))
    write_csv(out / "ground_energies.csv",
              ("u", "raw", "mitigated", "exact"), rows)
    files = ["ground_energies.csv"]
    if term_rows:
        header = ("u", "phi", "term", "coefficient",
                  *[f"scale_{s}" for s in config.dzne_scales],
                  "mitigated", "exact", "clamped")
        write_csv(out / "mitigation_terms.csv", header, term_rows)
        files.append("mitigation_terms.csv")
    manifest = _load_manifest(out)
    manifest["stages"]["ground"] = {
        "seed": config.seed,
        "mode": config.mode,
        "files": files,
        "errors": errors,
        "elapsed_s": round(time.perf_counter() - t_start, 3),
    }
    _save_manifest(out, manifest, config)
    return {"rows": rows, "errors": errors, "files": files}


def _green_node(task):
    """One (pair, spin, time) Green's value; top level so pools can pickle."""
    (ham, ground, i, j, spin, t, n_tau, mode, shots, noise, seed) = task
    series = retarded_g(ham, ground, i, j, np.array([t]), spin=spin,
                        plan=TrotterPlan(n_tau), mode=mode, shots=shots,
                        noise=noise, seed=seed, check_convention=False)
    return series.values[0]


def run_green(config: RunConfig, out_dir: str | Path | None = None) -> Dict:
    """Retarded G for every site pair on the quadrature grid, then G(omega)
    and rho(omega) tables per spin.

    Spin up is always measured.  In exact mode spin down is measured too
    (and must agree); in sampled mode it is mirrored from spin up, as the
    paramagnetic model guarantees, to halve the wall time (noted in the
    manifest).
    """
    out = Path(out_dir or config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t_start = time.perf_counter()
    ham = build_hubbard_cluster(_model(config))
    solution = ed_solve(ham)
    seed_stage = derive_seed(config.seed, 13)
    if config.inject_exact_ground:
        ground = solution.ground_state
        ground_note = "exact ED statevector injected"
    else:
        fit = minimize_energy(ham, dimer_ansatz(), n_phi=config.n_phi,
                              mode=config.mode, shots=config.shots,
                              noise=_noise(config),
                              seed=derive_seed(config.seed, 11, 99))
        ground = build_ansatz(dimer_ansatz(), fit.fit.phi0)
        ground_note = f"ansatz circuit at phi0={fit.fit.phi0!r}"
    g_conv = convention_check(ham, ground, 0, "up")
    if abs(g_conv + 1.0j) > 1e-8:
        raise RuntimeError(f"convention self-check failed: {g_conv}")
    rule = legendre_rule(config.quad_n, config.t_max)
    times = rule.nodes
    n_sites = ham.n_qubits // 2
    pairs = [(i, j) for i in range(n_sites) for j in range(n_sites)]
    measured_spins = SPINS if config.mode == "exact" else ("up",)
    noise = _noise(config)
    tables: Dict[str, np.ndarray] = {}
    for spin in measured_spins:
        spin_idx = SPINS.index(spin)
        table = np.empty((times.size, n_sites, n_sites), dtype=complex)
        tasks = []
        for ip, (i, j) in enumerate(pairs):
            for k, t in enumerate(times):
                tasks.append((ham, ground, i, j, spin, float(t),
                              config.n_tau, config.mode, config.shots,
                              noise,
                              derive_seed(seed_stage, spin_idx, ip, k)))
        if config.jobs > 1:
            with ProcessPoolExecutor(max_workers=config.jobs) as pool:
                values = list(pool.map(_green_node, tasks,
                                       chunksize=max(1, len(tasks) // (4 * config.jobs))))
        else:
            values = [_green_node(t) for t in tasks]
        for ip, (i, j) in enumerate(pairs):
            table[:, i, j] = values[ip * times.size:(ip + 1) * times.size]
        tables[spin] = table
    if "down" not in tables:
        tables["down"] = tables["up"].copy()
    omega = np.linspace(config.omega_min, config.omega_max,
                        config.omega_points)
    qc: Dict = {"ground_state": ground_note,
                "mirrored_down": "down" not in measured_spins}
    files: List[str] = []
    for spin in SPINS:
        table = tables[spin]
        for i, j in pairs:
            g_t = table[:, i, j]
            damp = np.exp(-config.eta * times)
            g_ed = exact_g_t(solution, i, j, spin, times)
            name = f"green_t_{i}{j}_{spin}.csv"
            write_csv(out / name,
                      ("t", "re_g", "im_g", "re_damped", "im_damped",
                       "re_ed", "im_ed"),
                      zip(times, g_t.real, g_t.imag, (damp * g_t).real,
                          (damp * g_t).imag, g_ed.real, g_ed.imag))
            files.append(name)
        header = ["omega"]
        columns = [omega]
        for i, j in pairs:
            fg = to_frequency((times, table[:, i, j]), rule, omega,
                              config.eta)
            sp = spectral(fg)
            header += [f"re_g_{i}{j}", f"im_g_{i}{j}", f"rho_{i}{j}"]
            columns += [fg.values.real, fg.values.imag, sp.rho]
            if i == j:
                qc[f"sum_rule_{i}{i}_{spin}"] = float(
                    np.trapezoid(sp.rho, omega))
        name = f"green_w_{spin}.csv"
        write_csv(out / name, header, zip(*columns))
        files.append(name)
    manifest = _load_manifest(out)
    manifest["stages"]["green"] = {
        "seed": config.seed,
        "mode": config.mode,
        "noise_p": 0.0 if noise is None else noise.p,
        "files": files,
        "qc": qc,
        "elapsed_s": round(time.perf_counter() - t_start, 3),
    }
    _save_manifest(out, manifest, config)
    return {"files": files, "qc": qc, "tables": tables}


RENDER_SCRIPT = """\
#!/usr/bin/env python3
\"\"\"Render the excitation-spectra heatmap written next to this script.\"\"\"
import csv
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

here = Path(__file__).resolve().parent
for spin in ("up", "down"):
    grid = np.loadtxt(here / f"spectra_grid_{spin}.csv", delimiter=",",
                      skiprows=1)
    with open(here / f"spectra_grid_{spin}.csv") as fh:
        omega = np.array([float(w) for w in
                          next(csv.reader(fh))[1:]])
    k_index = grid[:, 0]
    intensity = grid[:, 1:]
    meta = {}
    with open(here / "spectra_vertices.csv") as fh:
        for row in csv.DictReader(fh):
            meta[int(row["k_index"])] = row["label"]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    mesh = ax.pcolormesh(k_index, omega, intensity.T, shading="auto",
                         cmap="inferno")
    fig.colorbar(mesh, ax=ax, label="intensity")
    ax.set_xticks(sorted(meta))
    ax.set_xticklabels([meta[i] for i in sorted(meta)])
    ax.set_ylabel("omega")
    ax.axhline(0.0, color="w", lw=0.5, ls="--")
    fig.tight_layout()
    fig.savefig(here / f"spectra_{spin}.png", dpi=150)
    plt.close(fig)
print("wrote", here / "spectra_up.png", "and spectra_down.png")
"""


def run_spectra(config: RunConfig,
                out_dir: str | Path | None = None) -> Dict:
    """Lattice excitation spectra from the green stage's frequency tables.

    Reads only ``green_w_{spin}.csv`` (plus the config), so the stage can be
    re-run without touching the circuit simulator again.
    """
    out = Path(out_dir or config.out_dir)
    t_start = time.perf_counter()
    tiling = TilingSpec(sites=((0, 0), (1, 0)), e1=(2, 0), e2=(0, 1),
                        gamma=config.gamma, mu=config.chemical_potential)
    path = kpath(per_segment=config.k_per_segment)
    files: List[str] = []
    qc: Dict = {}
    for spin in SPINS:
        src = out / f"green_w_{spin}.csv"
        if not src.exists():
            raise FileNotFoundError(
                f"{src} not found; run the green stage first")
        cols = read_csv(src)
        omega = cols["omega"]
        n = tiling.n_sites
        table = np.empty((omega.size, n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                table[:, i, j] = cols[f"re_g_{i}{j}"] + \
                    1j * cols[f"im_g_{i}{j}"]
        grid = excitation_spectra(table, tiling, path, omega, config.eta)
        long_name = f"spectra_long_{spin}.csv"
        rows = ((ik, path.label_of(ik), k[0], k[1], w, grid.intensity[ik, iw])
                for ik, k in enumerate(path.points)
                for iw, w in enumerate(omega))
        write_csv(out / long_name,
                  ("k_index", "k_label", "kx", "ky", "omega", "intensity"),
                  rows)
        dense_name = f"spectra_grid_{spin}.csv"
        write_csv(out / dense_name,
                  ("k_index", *[_fmt(w) for w in omega]),
                  ((ik, *grid.intensity[ik]) for ik in range(path.n_points)))
        files += [long_name, dense_name]
        i0 = int(np.argmin(np.abs(omega)))
        qc[spin] = {
            "k_integral_min": float(grid.k_integrals.min()),
            "k_integral_max": float(grid.k_integrals.max()),
            "singular_omega_count": int(grid.singular_omega.sum()),
            "max_rho_at_omega0": float(grid.intensity[:, i0].max()),
            "max_rho": float(grid.intensity.max()),
            "min_rho": float(grid.intensity.min()),
        }
    write_csv(out / "spectra_vertices.csv", ("k_index", "label"),
              zip(path.vertex_indices, path.vertex_labels))
    (out / "render_spectra.py").write_text(RENDER_SCRIPT)
    files += ["spectra_vertices.csv", "render_spectra.py"]
    (out / "spectra_qc.json").write_text(
        json.dumps(qc, indent=2, sort_keys=True) + "\n")
    files.append("spectra_qc.json")
    manifest = _load_manifest(out)
    manifest["stages"]["spectra"] = {
        "files": files,
        "qc": qc,
        "elapsed_s": round(time.perf_counter() - t_start, 3),
    }
    _save_manifest(out, manifest, config)
    return {"files": files, "qc": qc}


def run_all(config: RunConfig, out_dir: str | Path | None = None) -> Dict:
    ground = run_ground(config, out_dir)
    green = run_green(config, out_dir)
    spectra = run_spectra(config, out_dir)
    return {"ground": ground, "green": green, "spectra": spectra}
