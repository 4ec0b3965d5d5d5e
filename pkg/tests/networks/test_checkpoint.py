import dataclasses

import pytest
import torch

from exemplar_synth.exceptions import CheckpointError, ConfigHashMismatchError
from exemplar_synth.networks import (
    CheckpointHeader,
    build_state,
    load_checkpoint,
    read_records,
    save_checkpoint,
    write_records,
)


@pytest.fixture()
def stepped_state(tiny_config):
    state = build_state(tiny_config)
    x = torch.rand(1, 1, 32, 32)
    loss = state.generator(x, torch.rand(1, 3, 32, 32), x).square().mean()
    loss.backward()
    state.opt_g.step()
    state.iteration = 7
    return state


def test_roundtrip(stepped_state, tiny_config, tmp_path):
    path = save_checkpoint(stepped_state, tmp_path / "a.ckpt")
    restored = load_checkpoint(build_state(tiny_config, initialize=False), path)

    assert restored.iteration == 7
    assert restored.seed == tiny_config.seed
    for name, net in stepped_state.networks().items():
        other = restored.networks()[name].state_dict()
        for key, tensor in net.state_dict().items():
            assert torch.equal(tensor, other[key]), f"{name}.{key}"

    param = next(stepped_state.generator.parameters())
    restored_param = next(restored.generator.parameters())
    assert torch.equal(
        stepped_state.opt_g.state[param]["exp_avg"],
        restored.opt_g.state[restored_param]["exp_avg"],
    )
    assert not restored.opt_d_real.state

    save_checkpoint(restored, tmp_path / "b.ckpt")
    assert (tmp_path / "a.ckpt").read_bytes() == (tmp_path / "b.ckpt").read_bytes()


def test_layout(tmp_path):
    header = CheckpointHeader("abc", iteration=3, seed=-1)
    write_records(tmp_path / "r.ckpt", {"w": torch.arange(6.0).reshape(2, 3)}, header)

    data = (tmp_path / "r.ckpt").read_bytes()
    assert data[:4] == b"EXSY"
    assert data[4:8] == (1).to_bytes(4, "little")
    assert len(data) == 4 + 8 + 3 + 20 + 4 + 1 + 4 + 8 + 24

    read_header, records = read_records(tmp_path / "r.ckpt")
    assert read_header == header
    assert torch.equal(records["w"], torch.arange(6.0).reshape(2, 3))


def test_hash_mismatch(stepped_state, tiny_config, tmp_path):
    path = save_checkpoint(stepped_state, tmp_path / "a.ckpt")
    other = build_state(dataclasses.replace(tiny_config, base_lr=1e-4), initialize=False)
    with pytest.raises(ConfigHashMismatchError) as exc_info:
        load_checkpoint(other, path)
    assert exc_info.value.exit_code == 3
    assert exc_info.value.expected == stepped_state.config_hash


@pytest.mark.parametrize(
    ("mangle", "match"),
    [
        (lambda data: b"NOPE" + data[4:], "bad magic"),
        (lambda data: data[:4] + (2).to_bytes(4, "little") + data[8:], "version 2"),
        (lambda data: data[:-3], "Truncated"),
        (lambda data: data + b"\0", "trailing bytes"),
    ],
)
def test_corrupt_files(stepped_state, tmp_path, mangle, match):
    path = save_checkpoint(stepped_state, tmp_path / "a.ckpt")
    path.write_bytes(mangle(path.read_bytes()))
    with pytest.raises(CheckpointError, match=match):
        read_records(path)


def test_missing_file(tmp_path):
    with pytest.raises(CheckpointError, match="does not exist"):
        read_records(tmp_path / "nowhere.ckpt")


def test_architecture_mismatch(tmp_path, tiny_config):
    write_records(
        tmp_path / "r.ckpt",
        {"G.encoder.0.weight": torch.zeros(1)},
        CheckpointHeader(build_state(tiny_config).config_hash, 0, 0),
    )
    with pytest.raises(CheckpointError, match="records for G do not match"):
        load_checkpoint(build_state(tiny_config, initialize=False), tmp_path / "r.ckpt")
