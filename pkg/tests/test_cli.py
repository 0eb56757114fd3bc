import csv
import json
from pathlib import Path

import pytest

from shrinkinit.cli import main, run, timing_probe
from shrinkinit.exceptions import ParameterError

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def small_config(tmp_path, **overrides):
    cfg = {
        "dataset": {"kind": "blobs", "classes": 3, "per_class": 20, "dim": 3, "separation": 3.0, "seed": 1},
        "hidden": [6, 6],
        "activation": "sigmoid",
        "schemes": ["random", "sinl"],
        "seeds": [1, 2],
        "epochs": 60,
        "learning_rate": 0.5,
        "record_every": 20,
        "output_dir": "out",
    }
    cfg.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return path


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_file_count_contract(tmp_path):
    assert run(small_config(tmp_path)) == 0
    out = tmp_path / "out"
    assert len(list(out.glob("*_metrics.csv"))) == 4
    assert len(list(out.glob("*_weights_init.csv"))) == 4
    rows = read_csv(out / "summary.csv")
    assert rows[0] == ["scheme", "seed", "status", "epoch", "objective", "train_acc", "test_acc", "message"]
    assert sorted((r[0], r[1]) for r in rows[1:]) == [("random", "1"), ("random", "2"), ("sinl", "1"), ("sinl", "2")]
    metrics = read_csv(out / "sinl_1_metrics.csv")
    assert metrics[0] == ["epoch", "objective", "train_acc", "test_acc"]
    assert [r[0] for r in metrics[1:]] == ["0", "20", "40", "60"]
    weights = read_csv(out / "sinl_1_weights_init.csv")
    assert weights[0] == ["layer", "row", "col", "value"]
    assert len(weights) - 1 == 3 * 6 + 6 * 6 + 6 * 3


def test_rerun_is_byte_identical(tmp_path):
    config = small_config(tmp_path)
    assert run(config, out=str(tmp_path / "a")) == 0
    assert run(config, out=str(tmp_path / "b"), jobs=2) == 0
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names == sorted(p.name for p in (tmp_path / "b").iterdir())
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes(), name


def test_csv_uses_lf(tmp_path):
    run(small_config(tmp_path))
    assert b"\r" not in (tmp_path / "out" / "summary.csv").read_bytes()


@pytest.mark.parametrize(
    "overrides",
    [
        {"schemes": []},
        {"schemes": ["xavier"]},
        {"activation": "identity"},
        {"hidden": [0]},
        {"epochs": 0},
        {"bogus": 1},
        {"dataset": {"kind": "parquet"}},
        {"dataset": {"kind": "csv", "path": "missing.csv"}},
    ],
)
def test_config_errors_exit_2(tmp_path, overrides, capsys):
    assert run(small_config(tmp_path, **overrides)) == 2
    assert "config error" in capsys.readouterr().err


def test_invalid_json_exit_2(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert main(["run", "--config", str(path)]) == 2


def test_failed_cell_exit_1(tmp_path, capsys):
    # constant features standardize to zeros, so BN sees zero pre-activation variance
    lines = [f"1.0,2.0,{i % 3}" for i in range(30)]
    (tmp_path / "flat.csv").write_text("\n".join(lines) + "\n")
    config = small_config(tmp_path, dataset={"kind": "csv", "path": "flat.csv"}, schemes=["bn", "din"], seeds=[0])
    assert run(config) == 1
    rows = {r[0]: r for r in read_csv(tmp_path / "out" / "summary.csv")[1:]}
    assert rows["bn"][2] == "failed" and "zero variance" in rows["bn"][7]
    assert rows["din"][2] == "ok"
    assert "cell bn/0 failed" in capsys.readouterr().err


def test_divergence_recorded(tmp_path, monkeypatch):
    import shrinkinit.cli as cli
    from shrinkinit.exceptions import NumericError

    def exploding_train(*args, **kwargs):
        raise NumericError("objective diverged at epoch 7", iteration=7)

    monkeypatch.setattr(cli, "train", exploding_train)
    assert run(small_config(tmp_path, schemes=["random"], seeds=[0])) == 1
    row = read_csv(tmp_path / "out" / "summary.csv")[1]
    assert row[:4] == ["random", "0", "diverged", "7"]
    assert not (tmp_path / "out" / "random_0_metrics.csv").exists()


def test_csv_dataset(tmp_path):
    lines = [f"{i % 5},{(i * 7) % 3},{i % 2}" for i in range(40)]
    (tmp_path / "train.csv").write_text("a,b,label\n" + "\n".join(lines) + "\n")
    config = small_config(tmp_path, dataset={"kind": "csv", "path": "train.csv"}, seeds=[0])
    assert run(config) == 0


def test_probe_command(tmp_path):
    out = tmp_path / "timing.csv"
    assert main(["probe", "--widths", "4,8,8", "--out", str(out), "--repeats", "1"]) == 0
    rows = read_csv(out)
    assert rows[0] == ["width", "seconds"]
    assert [r[0] for r in rows[1:]] == ["4", "8", "8"]
    assert all(float(r[1]) > 0 for r in rows[1:])


def test_probe_empty_sweep():
    with pytest.raises(ParameterError):
        timing_probe([])


@pytest.mark.slow
def test_protocol_config_runs(tmp_path):
    raw = json.loads((CONFIGS / "protocol_hidden10.json").read_text())
    assert raw["epochs"] == 10000 and raw["hidden"] == [10, 10] and raw["activation"] == "sigmoid"
    raw["seeds"] = [0]
    path = tmp_path / "protocol.json"
    path.write_text(json.dumps(raw))
    assert run(path, out=str(tmp_path / "protocol")) == 0
    rows = read_csv(tmp_path / "protocol" / "summary.csv")
    assert len(rows) == 6
    assert all(r[2] == "ok" and r[3] == "10000" for r in rows[1:])


def test_shipped_configs_parse():
    from shrinkinit.cli import load_config

    for path in CONFIGS.glob("*.json"):
        load_config(path)
