import numpy as np
import pytest

from lanekeep.errors import ModelFormatError
from lanekeep.nn.modelio import MAGIC, load_network, save_network
from lanekeep.policy import build_network


def test_round_trip_bit_exact(tmp_path):
    net = build_network(seed=11)
    path = tmp_path / "m.lkn"
    save_network(net, path)
    loaded = load_network(path)
    assert [s.kind for s in loaded.specs()] == [s.kind for s in net.specs()]
    for a, b in zip(loaded.parameters(), net.parameters()):
        assert np.array_equal(a, b)
    x = np.random.default_rng(0).standard_normal((1, 1, 68, 183))
    assert np.array_equal(loaded.forward(x), net.forward(x))


def test_wrong_magic(tmp_path):
    path = tmp_path / "bad.lkn"
    path.write_bytes(b"NOPE" + b"\x00" * 64)
    with pytest.raises(ModelFormatError, match="magic"):
        load_network(path)


def test_wrong_version(tmp_path):
    path = tmp_path / "bad.lkn"
    path.write_bytes(MAGIC + (99).to_bytes(4, "little") + (0).to_bytes(4, "little"))
    with pytest.raises(ModelFormatError, match="version"):
        load_network(path)


def test_truncated(tmp_path):
    net = build_network(seed=0)
    path = tmp_path / "m.lkn"
    save_network(net, path)
    data = path.read_bytes()
    path.write_bytes(data[: len(data) // 2])
    with pytest.raises(ModelFormatError, match="truncated"):
        load_network(path)


def test_trailing_bytes(tmp_path):
    net = build_network(seed=0)
    path = tmp_path / "m.lkn"
    save_network(net, path)
    path.write_bytes(path.read_bytes() + b"x")
    with pytest.raises(ModelFormatError, match="trailing"):
        load_network(path)
