import numpy as np
import pytest

from src.coefficients import power_law_model
from src.equilibrium import activity_of_density, equilibrium_profile
from src.kinetics import (
    State,
    StateFormatError,
    TruncationError,
    equilibrium_plus_monomer,
    equilibrium_state,
    file_state,
    monomer_state,
    read_state,
    truncate_initial,
    write_state,
)
from src.kinetics.state import MAGIC


def test_state_is_read_only_copy():
    c = np.array([1.0, 2.0, 3.0])
    s = State(c, 0.5)
    c[0] = 9.0
    assert s.c[0] == 1.0
    with pytest.raises(ValueError):
        s.c[0] = 2.0
    assert s.L == 3
    assert s.density == pytest.approx(1.0 + 4.0 + 9.0)
    assert s.at(2.0).t == 2.0


def test_state_rejects_empty_vectors():
    with pytest.raises(TruncationError):
        State(np.array([]))


def test_truncate_initial_zeroes_the_tail():
    s = truncate_initial([1.0, 1.0, 1.0, 1.0], 2, 6)
    np.testing.assert_array_equal(s.c, [1.0, 1.0, 0.0, 0.0, 0.0, 0.0])
    assert s.t == 0.0
    with pytest.raises(TruncationError):
        truncate_initial([1.0], 7, 6)


def test_monomer_state():
    s = monomer_state(2.5, 10)
    assert s.density == 2.5
    assert np.count_nonzero(s.c) == 1
    with pytest.raises(ValueError):
        monomer_state(-1.0, 10)


def test_equilibrium_builders():
    model = power_law_model(1.0, 0.5, 1.0, 0.5, 2)
    s = equilibrium_state(model, 2.0, 200)
    z = activity_of_density(model, 2.0)
    np.testing.assert_allclose(s.c, equilibrium_profile(model, z, 200).densities)
    shifted = equilibrium_plus_monomer(model, 2.0, 0.5, 200)
    assert shifted.c[0] == pytest.approx(s.c[0] + 0.5)
    np.testing.assert_array_equal(shifted.c[1:], s.c[1:])


def test_state_file_round_trip(tmp_path):
    s = State(np.array([0.1, 1e-300, 3.0, 0.0]), 12.5)
    path = write_state(s, tmp_path / "states" / "s.bin")
    raw = path.read_bytes()
    assert raw[:4] == MAGIC
    assert len(raw) == 16 + 8 * 5
    back = read_state(path)
    assert back.t == 12.5
    np.testing.assert_array_equal(back.c, s.c)


def test_file_state_pads_to_truncation(tmp_path):
    path = write_state(State(np.array([1.0, 2.0, 3.0]), 4.0), tmp_path / "s.bin")
    s = file_state(path, 6)
    np.testing.assert_array_equal(s.c, [1.0, 2.0, 3.0, 0.0, 0.0, 0.0])
    assert s.t == 0.0
    assert file_state(path, 6, n=1).density == 1.0


def test_corrupt_state_files(tmp_path):
    short = tmp_path / "short.bin"
    short.write_bytes(b"BDK1")
    with pytest.raises(StateFormatError):
        read_state(short)

    path = write_state(State(np.ones(3)), tmp_path / "ok.bin")
    raw = bytearray(path.read_bytes())
    bad_magic = tmp_path / "magic.bin"
    bad_magic.write_bytes(b"XXXX" + bytes(raw[4:]))
    with pytest.raises(StateFormatError):
        read_state(bad_magic)
    truncated = tmp_path / "truncated.bin"
    truncated.write_bytes(bytes(raw[:-8]))
    with pytest.raises(StateFormatError):
        read_state(truncated)
