import pytest
import yaml

from fuzzyblend.config import ConfigError, ScenarioConfig, config_from_dict, load_config
from fuzzyblend.wind import Constant, FileTrace, Turbulent

BASE = {"wind": {"type": "constant", "v": 8.0}, "duration": 10.0}


def cfg(**changes):
    return config_from_dict({**BASE, **changes})


def test_minimal_defaults():
    c = cfg()
    assert c.wind == Constant(8.0)
    assert c.dt == 0.01 and c.controller == "blended" and c.n_steps == 1000
    assert c.blending.torque_weighting == "gated_sector"


def test_full_schema(tmp_path):
    data = {
        "turbine": {"T_g_min": 5000.0}, "wind": {"type": "turbulent", "mean": 11, "intensity": 0.08},
        "controller": "hard_switch",
        "blending": {"eps_omega": 0.2, "eps_Tg": 0.05, "ramp_shape": "smoothstep",
                     "torque_weighting": "ramp", "torque_premise": "previous"},
        "observer": {"pole": 3.0, "tau_v": 0.5}, "reference": {"tau_f": 1.0},
        "integrator": {"bound": 5.0},
        "design": {"full_beta": [0.0, 0.2], "partial_weights": {"q_omega": 1, "q_beta": 0, "q_I": 1, "r": 1}},
        "dt": 0.02, "duration": 30, "output": "x.csv", "seed": 9,
        "controller_file": "gains.yaml",
    }
    path = tmp_path / "s.yaml"
    path.write_text(yaml.safe_dump(data))
    c = load_config(path)
    assert c.turbine.T_g_min == 5000.0
    assert c.wind == Turbulent(11.0, 0.08, 9)
    assert c.blending.ramp_shape == "smoothstep" and c.tau_f == 1.0 and c.integrator_bound == 5.0
    assert c.design.full_beta == (0.0, 0.2) and c.design.partial_weights.q_omega == 1.0
    assert c.controller_file == str(tmp_path / "gains.yaml")


@pytest.mark.parametrize("changes", [
    {"colour": 1}, {"blending": {"eps": 0.1}}, {"wind": {"type": "constant", "v": 8, "gust": 1}},
    {"design": {"partial_weights": {"q_omega": 1}}}, {"observer": {"poles": 2}},
])
def test_unknown_or_incomplete_keys_rejected(changes):
    with pytest.raises(ConfigError):
        cfg(**changes)


@pytest.mark.parametrize("changes", [
    {"dt": 0.0}, {"dt": 0.06}, {"dt": 0.01, "duration": 0.09}, {"controller": "pid"},
    {"blending": {"eps_omega": 0.6}}, {"blending": {"ramp_shape": "cubic"}},
    {"wind": {"type": "turbulent", "mean": 10, "intensity": 0.9}}, {"wind": {"type": "breeze"}},
    {"turbine": {"R": -1}}, {"seed": 1.5}, {"duration": "long"}, {"blending": {"pinned_vertex": 5}},
    {"observer": {"pole": 0}}, {"integrator": {"bound": 0}},
])
def test_invalid_values_rejected(changes):
    with pytest.raises(ConfigError):
        cfg(**changes)


def test_duration_at_minimum_is_valid():
    assert cfg(duration=0.1).n_steps == 10


def test_file_wind_resolves_relative(tmp_path):
    path = tmp_path / "s.yaml"
    path.write_text(yaml.safe_dump({**BASE, "wind": {"type": "file", "path": "w.csv"}}))
    assert load_config(path).wind == FileTrace(str(tmp_path / "w.csv"))


def test_unreadable_or_bad_yaml(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.yaml")
    (tmp_path / "bad.yaml").write_text("wind: [unclosed\n")
    with pytest.raises(ConfigError, match="YAML"):
        load_config(tmp_path / "bad.yaml")


def test_dataclass_validation():
    with pytest.raises(ConfigError):
        ScenarioConfig(wind=Constant(8.0), duration=10.0, dt=0.1)
