import csv

import numpy as np
import pytest

from conftest import write_dump
from cfsec_oracle import cli

CFG = "L=2\nK=2\nM=1\nN_t=2\n"


@pytest.fixture
def tiny_setup(tmp_path, rng):
    cfg = tmp_path / "tiny.cfg"
    cfg.write_text(CFG)
    blocks = {d: (rng.standard_normal((2, 2, 1, 2))
                  + 1j * rng.standard_normal((2, 2, 1, 2))) / np.sqrt(2.0)
              for d in range(2)}
    dump = tmp_path / "chan.dump"
    write_dump(dump, blocks)
    return cfg, dump, tmp_path


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_cli_end_to_end(tiny_setup, capsys):
    cfg, dump, tmp = tiny_setup
    out = tmp / "res"
    assert cli.main(["--dump", str(dump), "--config", str(cfg),
                     "--snr-db", "10", "--out", str(out)]) == 0
    assert "wrote" in capsys.readouterr().out
    rows = _rows(str(out) + ".drops.csv")
    assert len(rows) == 2
    assert all(r["status"] == "ok" for r in rows)
    assert all(r["solver_status"] in ("optimal", "optimal_inaccurate") for r in rows)
    summ = _rows(str(out) + ".summary.csv")
    assert len(summ) == 1
    assert summ[0]["algo"] == "sdp"
    assert summ[0]["drops"] == "2"
    assert summ[0]["failed"] == "0"


def test_cli_reproducible_metrics(tiny_setup):
    cfg, dump, tmp = tiny_setup
    args = ["--dump", str(dump), "--config", str(cfg), "--snr-db", "10"]
    assert cli.main(args + ["--out", str(tmp / "a")]) == 0
    assert cli.main(args + ["--out", str(tmp / "b")]) == 0
    ra, rb = _rows(str(tmp / "a") + ".drops.csv"), _rows(str(tmp / "b") + ".drops.csv")
    for a, b in zip(ra, rb):
        assert abs(float(a["sum_secrecy"]) - float(b["sum_secrecy"])) < 1e-6
        assert abs(float(a["sum_rate"]) - float(b["sum_rate"])) < 1e-6


def test_cli_drop_limit_and_zero_rounds(tiny_setup):
    cfg, dump, tmp = tiny_setup
    out = tmp / "lim"
    assert cli.main(["--dump", str(dump), "--config", str(cfg),
                     "--snr-db", "10", "--out", str(out),
                     "--drops", "1", "--max-iter", "0"]) == 0
    rows = _rows(str(out) + ".drops.csv")
    assert len(rows) == 1
    assert rows[0]["iter_sdp"] == "0"
    assert rows[0]["converged"] == "0"


def test_cli_error_paths(tiny_setup, capsys):
    cfg, dump, tmp = tiny_setup
    out = str(tmp / "x")
    base = ["--dump", str(dump), "--config", str(cfg), "--snr-db", "10", "--out", out]

    assert cli.main(["--dump", str(tmp / "nope.dump"), "--config", str(cfg),
                     "--snr-db", "10", "--out", out]) == 2
    assert cli.main(["--dump", str(dump), "--config", str(tmp / "nope.cfg"),
                     "--snr-db", "10", "--out", out]) == 2
    assert cli.main(base + ["--eps", "0"]) == 2
    assert cli.main(base + ["--max-iter", "-1"]) == 2

    big = tmp / "big.cfg"
    big.write_text("L=4\nK=4\nM=2\nN_t=2\n")
    assert cli.main(["--dump", str(dump), "--config", str(big),
                     "--snr-db", "10", "--out", out]) == 2
    assert "ceiling" in capsys.readouterr().err
