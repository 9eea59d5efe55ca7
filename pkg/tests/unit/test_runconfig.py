import numpy as np
import pytest

from src.runconfig import PRESETS, ConfigError, load_run_config, parse_kv, preset, to_kv


def _write(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_parse_kv_nests_dotted_keys():
    data, lines = parse_kv("# header\nlabel = demo\n\nmodel.C1 = 2.0\nintegrator.snapshots = [1.0, 10.0]\n")
    assert data == {"label": "demo", "model": {"C1": 2.0}, "integrator": {"snapshots": [1.0, 10.0]}}
    assert lines == {"label": 2, "model.C1": 4, "integrator.snapshots": 5}


@pytest.mark.parametrize(
    "text,line,key",
    [
        ("label = a\njust words\n", 2, None),
        ("L = 10\nL = 20\n", 2, "L"),
        ("model.C1 =\n", 1, "model.C1"),
        ("model = 1\nmodel.C1 = 2\n", 2, "model.C1"),
        ("a.. = 1\n", 1, "a.."),
    ],
)
def test_parse_kv_errors_carry_location(text, line, key):
    with pytest.raises(ConfigError) as info:
        parse_kv(text)
    assert info.value.line == line
    assert info.value.key == key


def test_load_kv_config(tmp_path):
    cfg = load_run_config(
        _write(tmp_path, "label = sub\nL = 50\ninitial.kind = monomer\ninitial.rho0 = 2.0\nenvelope.lambda = 2.0\n")
    )
    assert cfg.label == "sub"
    assert cfg.L == 50
    assert cfg.initial.rho0 == 2.0
    assert cfg.envelope.lam == 2.0
    assert not cfg.envelope.enabled
    model = cfg.build_model()
    assert model.N == 2


def test_unknown_key_is_reported_with_its_line(tmp_path):
    with pytest.raises(ConfigError) as info:
        load_run_config(_write(tmp_path, "label = x\nmodel.bogus = 1\n"))
    assert info.value.key == "model.bogus"
    assert info.value.line == 2


def test_single_monomer_interaction_is_rejected(tmp_path):
    with pytest.raises(ConfigError) as info:
        load_run_config(_write(tmp_path, "label = x\nmodel.N = 1\n"))
    assert info.value.key == "model.N"
    assert info.value.line == 2


def test_consistency_rules(tmp_path):
    with pytest.raises(ConfigError) as info:
        load_run_config(_write(tmp_path, "L = 4\n"))
    assert info.value.key == "L"
    with pytest.raises(ConfigError) as info:
        load_run_config(_write(tmp_path, "L = 50\nsweep.L = [50, 3]\n"))
    assert info.value.key == "sweep.L"
    with pytest.raises(ConfigError) as info:
        load_run_config(_write(tmp_path, "integrator.T = 5.0\nintegrator.snapshots = [1.0, 10.0]\n"))
    assert info.value.key == "integrator.snapshots"
    with pytest.raises(ConfigError):
        load_run_config(_write(tmp_path, "integrator.snapshots = [2.0, 1.0]\n"))
    with pytest.raises(ConfigError) as info:
        load_run_config(_write(tmp_path, "initial.kind = file\ninitial.path = nowhere.bin\n"))
    assert info.value.key == "initial.path"
    with pytest.raises(ConfigError) as info:
        load_run_config(_write(tmp_path, "model.family = custom\n"))
    assert info.value.key == "model"


def test_custom_truncation_beyond_table_is_rejected(tmp_path):
    np.savez(tmp_path / "kernel.npz", a=np.ones((2, 300)), log_q=np.zeros(400))
    body = "model.family = custom\nmodel.table = kernel.npz\n"
    with pytest.raises(ConfigError) as info:
        load_run_config(_write(tmp_path, body + "L = 1000\n"))
    assert info.value.key == "L"
    assert info.value.line == 3
    with pytest.raises(ConfigError) as info:
        load_run_config(_write(tmp_path, body + "L = 100\nsweep.L = [100, 302]\n"))
    assert info.value.key == "sweep.L"
    assert load_run_config(_write(tmp_path, body + "L = 301\n")).L == 301


def test_initial_kind_requires_its_fields(tmp_path):
    with pytest.raises(ConfigError):
        load_run_config(_write(tmp_path, "initial.kind = equilibrium\n"))


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_run_config(tmp_path / "absent.cfg")


def test_yaml_config(tmp_path):
    cfg = load_run_config(
        _write(tmp_path, "label: from_yaml\nL: 30\ninitial:\n  kind: monomer\n  rho0: 1.5\n", name="run.yaml")
    )
    assert cfg.L == 30
    assert cfg.initial.rho0 == 1.5


def test_presets_round_trip_through_text(tmp_path):
    for name in PRESETS:
        cfg = preset(name)
        again = load_run_config(_write(tmp_path, to_kv(cfg), name=f"{name}.cfg"))
        assert again.model_dump() == cfg.model_dump()


def test_preset_contents():
    assert preset("subcritical").initial.rho0 == 2.0
    assert preset("supercritical").initial.rho0 == 20.0
    assert 11.8 < preset("critical").initial.rho0 < 12.0
    assert preset("refinement").sizes() == [250, 500, 1000, 2000]
    with pytest.raises(ConfigError):
        preset("nope")
