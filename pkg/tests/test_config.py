"""Configuration loading, defaults, and strict validation."""

import numpy as np
import pytest

from qcpt.config import ConfigError, RunConfig, default_ini, load_config


def test_defaults_reproduce_reference_pipeline():
    cfg = RunConfig()
    assert cfg.gamma == 1.0 and cfg.u == 3.0
    assert cfg.half_filling and cfg.mu is None
    assert cfg.chemical_potential == 1.5
    assert cfg.u_sweep == (0.0, 1.0, 2.0, 3.0, 4.0, 5.0)
    assert cfg.shots == 12000 and cfg.noise_p == 1e-4 and cfg.seed == 7
    assert cfg.mode == "exact"
    assert cfg.n_tau == 60 and cfg.quad_n == 100 and cfg.t_max == 30.0
    assert cfg.eta == 0.2
    assert (cfg.omega_min, cfg.omega_max, cfg.omega_points) == (-8.0, 8.0, 801)
    assert cfg.k_per_segment == 64
    assert cfg.dzne_scales == (1, 3, 5) and cfg.dzne_order == 1


def test_explicit_mu_requires_dropping_half_filling():
    cfg = RunConfig(half_filling=False, mu=0.4)
    assert cfg.chemical_potential == 0.4
    with pytest.raises(ConfigError, match="do not set mu"):
        RunConfig(mu=0.4)
    with pytest.raises(ConfigError, match="give mu"):
        RunConfig(half_filling=False)


def test_replace_returns_validated_copy():
    cfg = RunConfig()
    other = cfg.replace(u=5.0, seed=11)
    assert (other.u, other.seed) == (5.0, 11)
    assert (cfg.u, cfg.seed) == (3.0, 7)
    with pytest.raises(ConfigError):
        cfg.replace(eta=-1.0)


@pytest.mark.parametrize("kwargs,fragment", [
    (dict(gamma=0.0), "gamma"),
    (dict(u=-1.0), "u must"),
    (dict(u_sweep=()), "at least one"),
    (dict(u_sweep=(1.0, -2.0)), "nonnegative"),
    (dict(shots=0), "shots"),
    (dict(noise_p=1.0), "noise_p"),
    (dict(noise_p=-0.1), "noise_p"),
    (dict(seed=-1), "seed"),
    (dict(mode="noisy"), "mode"),
    (dict(n_phi=2), "n_phi"),
    (dict(dzne_scales=(3,)), "two scales"),
    (dict(dzne_scales=(1, 2)), "odd"),
    (dict(dzne_scales=(3, 3)), "distinct"),
    (dict(dzne_scales=(1, 3), dzne_order=2), "order"),
    (dict(mitigation_seeds=0), "mitigation_seeds"),
    (dict(n_tau=0), "n_tau"),
    (dict(quad_n=0), "quad_n"),
    (dict(t_max=0.0), "t_max"),
    (dict(eta=0.0), "eta"),
    (dict(omega_min=2.0, omega_max=-2.0), "window"),
    (dict(omega_points=1), "omega_points"),
    (dict(k_per_segment=0), "k_per_segment"),
    (dict(jobs=0), "jobs"),
])
def test_out_of_range_values_are_rejected(kwargs, fragment):
    with pytest.raises(ConfigError, match=fragment):
        RunConfig(**kwargs)


def test_load_without_file_gives_defaults():
    assert load_config() == RunConfig()


def test_load_applies_overrides_and_skips_none():
    cfg = load_config(None, seed=3, mode=None, out_dir="runs/x")
    assert cfg.seed == 3 and cfg.mode == "exact" and cfg.out_dir == "runs/x"


def test_ini_roundtrip(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text(default_ini())
    assert load_config(str(path)) == RunConfig()


def test_ini_values_override_defaults(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text(
        "[model]\n"
        "u = 4.5\n"
        "half_filling = no\n"
        "mu = 2.25  # inline comments are fine\n"
        "u_sweep = 0, 2, 4\n"
        "[simulation]\n"
        "mode = sampled\n"
        "[vqe]\n"
        "dzne_scales = 1 3 5 7\n"
        "dzne_order = 2\n")
    cfg = load_config(str(path))
    assert cfg.u == 4.5 and cfg.mu == 2.25 and not cfg.half_filling
    assert cfg.u_sweep == (0.0, 2.0, 4.0)
    assert cfg.mode == "sampled"
    assert cfg.dzne_scales == (1, 3, 5, 7) and cfg.dzne_order == 2


def test_cli_override_beats_file(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text("[simulation]\nseed = 9\n")
    assert load_config(str(path), seed=21).seed == 21
    assert load_config(str(path)).seed == 9


def test_unknown_section_and_key_are_errors(tmp_path):
    bad_section = tmp_path / "a.ini"
    bad_section.write_text("[physics]\nu = 3\n")
    with pytest.raises(ConfigError, match="unknown config section"):
        load_config(str(bad_section))
    bad_key = tmp_path / "b.ini"
    bad_key.write_text("[model]\ncoupling = 3\n")
    with pytest.raises(ConfigError, match="unknown key"):
        load_config(str(bad_key))


def test_unparseable_value_is_an_error(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text("[green]\nn_tau = sixty\n")
    with pytest.raises(ConfigError, match="cannot parse"):
        load_config(str(path))


def test_missing_and_malformed_files_are_config_errors(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(str(tmp_path / "absent.ini"))
    broken = tmp_path / "broken.ini"
    broken.write_text("u = 3\n")  # key before any section header
    with pytest.raises(ConfigError, match="malformed"):
        load_config(str(broken))


def test_mu_none_spelling(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text("[model]\nmu = none\n")
    assert load_config(str(path)).mu is None


def test_bool_spellings(tmp_path):
    for raw, expected in (("yes", True), ("off", False), ("1", True)):
        path = tmp_path / f"{raw}.ini"
        path.write_text(f"[simulation]\ninject_exact_ground = {raw}\n")
        assert load_config(str(path)).inject_exact_ground is expected
    path = tmp_path / "bad.ini"
    path.write_text("[simulation]\ninject_exact_ground = maybe\n")
    with pytest.raises(ConfigError, match="cannot parse"):
        load_config(str(path))


def test_unknown_keyword_override_is_config_error():
    with pytest.raises(ConfigError, match="unexpected keyword"):
        load_config(None, bogus=1)


def test_default_ini_mentions_every_key():
    text = default_ini()
    for key in RunConfig().as_dict():
        assert f"{key} = " in text


def test_as_dict_matches_fields():
    cfg = RunConfig(seed=12)
    data = cfg.as_dict()
    assert data["seed"] == 12
    assert RunConfig(**data) == cfg
    assert np.isclose(data["noise_p"], 1e-4)
