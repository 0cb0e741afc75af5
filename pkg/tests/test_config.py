import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levelgas.config import RunConfig, apply_overrides, load_config, save_config
from levelgas.errors import ConfigError

from conftest import CONFIGS

positive = st.floats(min_value=1e-6, max_value=1e3, allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.json")), ids=lambda p: p.name)
def test_pinned_configs_load(path):
    cfg = load_config(path)
    assert RunConfig.from_dict(json.loads(cfg.to_json())) == cfg


def test_pinned_parameters(noiseless_cfg, wiener_cfg):
    m, s, i = noiseless_cfg.model, noiseless_cfg.schedule, noiseless_cfg.integrator
    assert (m.J, m.h1, m.h2, m.Z) == (1.0, 0.1, 0.2, 10.0)
    assert (s.kind, s.A, s.B, s.t0, s.t1, s.log_base) == ("log", 1e-3, 0.1, 10.1, 100.0, "e")
    assert (i.method, i.dt, i.stride) == ("rk4", 1e-3, 100)
    assert (wiener_cfg.noise.kind, wiener_cfg.noise.sigma) == ("wiener", 0.05)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=2**64 - 1), positive, positive, st.sampled_from(["rk4", "euler"]),
       st.sampled_from(["none", "wiener", "ornstein_uhlenbeck"]), st.one_of(st.none(), st.integers(0, 5)))
def test_round_trip(seed, sigma, dt, method, kind, eps):
    cfg = RunConfig.from_dict({
        "seed": seed, "noise": {"kind": kind, "sigma": sigma},
        "integrator": {"method": method, "dt": dt}, "window": {"epsilon": eps},
    })
    again = RunConfig.from_dict(json.loads(cfg.to_json()))
    assert again == cfg
    assert again.to_json() == cfg.to_json()
    assert again.hash() == cfg.hash()


def test_save_and_load(tmp_path, wiener_cfg):
    save_config(wiener_cfg, tmp_path / "c.json")
    assert load_config(tmp_path / "c.json") == wiener_cfg


def test_hash_ignores_outputs(noiseless_cfg):
    moved = apply_overrides(noiseless_cfg, ['outputs.csv="elsewhere.csv"'])
    assert moved.hash() == noiseless_cfg.hash()
    assert apply_overrides(noiseless_cfg, ["seed=1"]).hash() != noiseless_cfg.hash()


@pytest.mark.parametrize("data,match", [
    ({"bogus": 1}, "unknown key"),
    ({"model": {"Jay": 1}}, "unknown key"),
    ({"integrator": {"dt": "fast"}}, "must be a number"),
    ({"integrator": {"stride": 1.5}}, "must be an integer"),
    ({"integrator": {"strict": 1}}, "must be a boolean"),
    ({"integrator": {"dt": -1.0}}, "dt"),
    ({"integrator": {"sign": 0.5}}, "sign"),
    ({"noise": {"kind": "pink"}}, "noise.kind"),
    ({"noise": {"sigma": -1}}, "sigma"),
    ({"schedule": {"t0": 0.0}}, "schedule"),
    ({"schedule": {"t0": 50.0, "t1": 20.0}}, "schedule"),
    ({"model": {"type": "matrix"}}, "H0"),
    ({"model": {"J": float("nan")}}, "finite"),
    ({"rho0": {"kind": "explicit"}}, "rho0"),
    ({"rho0": {"kind": "explicit", "matrix": {"re": [[1]]}}}, "dimension"),
    ({"window": {"epsilon": 1.5}}, "window"),
    ({"seed": -1}, "seed"),
    ({"seed": 2**64}, "seed"),
])
def test_rejects_invalid(data, match):
    with pytest.raises(ConfigError, match=match):
        RunConfig.from_dict(data)


def test_load_errors(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "missing.json")
    (tmp_path / "bad.json").write_text("{not json")
    with pytest.raises(ConfigError, match="valid JSON"):
        load_config(tmp_path / "bad.json")


def test_overrides(noiseless_cfg):
    cfg = apply_overrides(noiseless_cfg, ["integrator.dt=2e-3", 'noise.kind="wiener"', "window.epsilon=null"])
    assert cfg.integrator.dt == 2e-3 and cfg.noise.kind == "wiener" and cfg.window.epsilon is None
    assert apply_overrides(noiseless_cfg, ["noise.kind=wiener"]).noise.kind == "wiener"
    with pytest.raises(ConfigError):
        apply_overrides(noiseless_cfg, ["integrator.nope=1"])
    with pytest.raises(ConfigError):
        apply_overrides(noiseless_cfg, ["integrator"])
