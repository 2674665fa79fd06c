"""Run configuration: a single INI file, fully defaulted and validated.

Every physics default lives here (gamma=1, half filling, U=3, 12000 shots,
p=1e-4, 60 Trotter slices, 100 quadrature nodes up to t=30, eta=0.2, the
801-point [-8, 8] frequency window, 64 k-points per path segment) so a bare
``qcpt all`` reproduces the reference pipeline.  Loading is strict: unknown
sections/keys, out-of-range numbers, or a chemical potential supplied
together with the half-filling flag all raise ConfigError rather than being
silently patched.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import asdict, dataclass, field
from typing import Dict, Tuple

MODES = ("exact", "sampled")


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration (CLI exit code 2)."""


@dataclass
class RunConfig:
    # model
    gamma: float = 1.0
    u: float = 3.0
    half_filling: bool = True
    mu: float | None = None
    u_sweep: Tuple[float, ...] = (0.0, 1.0, 2.0, 3.0, 4.0, 5.0)
    # simulation
    shots: int = 12000
    noise_p: float = 1e-4
    seed: int = 7
    mode: str = "exact"
    inject_exact_ground: bool = False
    # vqe
    n_phi: int = 5
    dzne_scales: Tuple[int, ...] = (1, 3, 5)
    dzne_order: int = 1
    mitigation_seeds: int = 20
    # green
    n_tau: int = 60
    quad_n: int = 100
    t_max: float = 30.0
    eta: float = 0.2
    # spectra
    omega_min: float = -8.0
    omega_max: float = 8.0
    omega_points: int = 801
    k_per_segment: int = 64
    # output
    out_dir: str = "runs/default"
    jobs: int = 1

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.gamma <= 0:
            raise ConfigError("gamma must be positive")
        if self.u < 0:
            raise ConfigError("u must be nonnegative")
        if self.half_filling and self.mu is not None:
            raise ConfigError("half_filling fixes mu = u/2; do not set mu")
        if not self.half_filling and self.mu is None:
            raise ConfigError("either set half_filling or give mu")
        if not self.u_sweep:
            raise ConfigError("u_sweep must list at least one value")
        if any(u < 0 for u in self.u_sweep):
            raise ConfigError("u_sweep values must be nonnegative")
        if self.shots < 1:
            raise ConfigError("shots must be at least 1")
        if not 0.0 <= self.noise_p < 1.0:
            raise ConfigError("noise_p must lie in [0, 1)")
        if self.seed < 0:
            raise ConfigError("seed must be nonnegative")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if self.n_phi < 3:
            raise ConfigError("n_phi must be at least 3 to fit a sinusoid")
        if len(self.dzne_scales) < 2:
            raise ConfigError("dzne needs at least two scales")
        if any(s < 1 or s % 2 == 0 for s in self.dzne_scales):
            raise ConfigError("dzne scales must be odd and >= 1")
        if len(set(self.dzne_scales)) != len(self.dzne_scales):
            raise ConfigError("dzne scales must be distinct")
        if not 1 <= self.dzne_order < len(self.dzne_scales):
            raise ConfigError("dzne order must be < number of scales")
        if self.mitigation_seeds < 1:
            raise ConfigError("mitigation_seeds must be at least 1")
        if self.n_tau < 1:
            raise ConfigError("n_tau must be at least 1")
        if self.quad_n < 1:
            raise ConfigError("quad_n must be at least 1")
        if self.t_max <= 0:
            raise ConfigError("t_max must be positive")
        if self.eta <= 0:
            raise ConfigError("eta must be positive")
        if self.omega_max <= self.omega_min:
            raise ConfigError("omega window is empty")
        if self.omega_points < 2:
            raise ConfigError("omega_points must be at least 2")
        if self.k_per_segment < 1:
            raise ConfigError("k_per_segment must be at least 1")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")

    @property
    def chemical_potential(self) -> float:
        return 0.5 * self.u if self.half_filling else float(self.mu)

    def replace(self, **kwargs) -> "RunConfig":
        data = asdict(self)
        data.update(kwargs)
        return RunConfig(**data)

    def as_dict(self) -> Dict:
        return asdict(self)


_SCHEMA = {
    "model": {"gamma": "float", "u": "float", "half_filling": "bool",
              "mu": "float_or_none", "u_sweep": "floats"},
    "simulation": {"shots": "int", "noise_p": "float", "seed": "int",
                   "mode": "str", "inject_exact_ground": "bool"},
    "vqe": {"n_phi": "int", "dzne_scales": "ints", "dzne_order": "int",
            "mitigation_seeds": "int"},
    "green": {"n_tau": "int", "quad_n": "int", "t_max": "float",
              "eta": "float"},
    "spectra": {"omega_min": "float", "omega_max": "float",
                "omega_points": "int", "k_per_segment": "int"},
    "output": {"out_dir": "str", "jobs": "int"},
}


def _parse(kind: str, raw: str, where: str):
    raw = raw.strip()
    try:
        if kind == "float":
            return float(raw)
        if kind == "int":
            return int(raw)
        if kind == "bool":
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if kind == "str":
            return raw
        if kind == "float_or_none":
            return None if raw.lower() in ("", "none") else float(raw)
        if kind == "floats":
            return tuple(float(x) for x in raw.replace(",", " ").split())
        if kind == "ints":
            return tuple(int(x) for x in raw.replace(",", " ").split())
    except ValueError as exc:
        raise ConfigError(f"cannot parse {where} = {raw!r} as {kind}") \
            from exc
    raise ConfigError(f"unknown schema kind {kind}")


def load_config(path: str | None = None, **overrides) -> RunConfig:
    """RunConfig from an INI file (or pure defaults), plus keyword overrides.

    Overrides with value None are ignored, so CLI flags can be passed
    through unconditionally.
    """
    values: Dict = {}
    if path is not None:
        parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        try:
            with open(path) as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") \
                from exc
        except configparser.Error as exc:
            raise ConfigError(f"malformed config file {path}: {exc}") \
                from exc
        for section in parser.sections():
            if section not in _SCHEMA:
                raise ConfigError(f"unknown config section [{section}]")
            for key, raw in parser.items(section):
                if key not in _SCHEMA[section]:
                    raise ConfigError(
                        f"unknown key {key!r} in section [{section}]")
                values[key] = _parse(_SCHEMA[section][key], raw,
                                     f"[{section}] {key}")
    for key, val in overrides.items():
        if val is not None:
            values[key] = val
    try:
        return RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def default_ini() -> str:
    """The fully commented default config, suitable to write and edit."""
    cfg = RunConfig()
    out = io.StringIO()
    out.write("# qcpt run configuration (all values shown are defaults)\n")
    data = cfg.as_dict()
    for section, keys in _SCHEMA.items():
        out.write(f"\n[{section}]\n")
        for key, kind in keys.items():
            val = data[key]
            if kind in ("floats", "ints"):
                val = " ".join(str(v) for v in val)
            elif val is None:
                val = "none"
            out.write(f"{key} = {val}\n")
    return out.getvalue()
