import json

import pytest

from exemplar_synth.eval import MetricReport


@pytest.fixture()
def report():
    return MetricReport(
        n_samples=4,
        config_hash="0123456789abcdef",
        backbone="small",
        fid=1.5,
        seg=(0.75, 0.75, 0.5),
        patch_dist=0.25,
        skipped={"lepe": "no point extraction for parsing labels"},
    )


def test_text(report):
    assert report.to_text() == (
        "n_samples = 4\n"
        "config_hash = 0123456789abcdef\n"
        "backbone = small\n"
        "fid = 1.5\n"
        "lepe = \n"
        "seg = 0.75,0.75,0.5\n"
        "patch_dist = 0.25\n"
        "style_win_rate = \n"
        "mask_iou = \n"
        "skipped.lepe = no point extraction for parsing labels\n"
    )


def test_write_appends_to_ledger(report, tmp_path):
    path = report.write(tmp_path, "results.jsonl")
    assert path == tmp_path / "report.txt"
    assert path.read_text(encoding="utf-8") == report.to_text()

    report.write(tmp_path, "results.jsonl")
    lines = (tmp_path / "results.jsonl").read_text(encoding="utf-8").splitlines()
    assert len(lines) == 2
    assert json.loads(lines[0]) == report.to_dict()
    assert json.loads(lines[0])["seg"] == [0.75, 0.75, 0.5]


@pytest.mark.parametrize(
    "kwargs",
    [
        {"fid": -1.0},
        {"patch_dist": float("nan")},
        {"mask_iou": float("inf")},
        {"seg": (0.5, 1.5, 0.5)},
    ],
)
def test_invalid_values(kwargs):
    with pytest.raises(ValueError, match="must"):
        MetricReport(n_samples=1, config_hash="", backbone="", **kwargs)
