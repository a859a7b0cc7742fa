import csv
import io
import json
import math
import subprocess
import sys

import pytest

from birkspec.cli import run


def cli(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "birkspec", *map(str, args)],
        capture_output=True,
        text=True,
        cwd=cwd,
    )


@pytest.fixture
def ex23(tmp_path):
    path = tmp_path / "ex23.json"
    assert run(["construct", "example23", "--out", str(path)]) == 0
    return path


@pytest.fixture
def indicator(tmp_path):
    path = tmp_path / "ind.json"
    assert run(["construct", "example-indicator", "--out", str(path)]) == 0
    return path


def test_construct_example23_roundtrip(ex23):
    obj = json.loads(ex23.read_text())
    assert obj == {"depth": 3, "values": [-2, -3, -2, 1, -1, 2, 3, 2]}


def test_endpoints_example23(ex23):
    res = cli("endpoints", "--input", ex23)
    assert res.returncode == 0
    obj = json.loads(res.stdout)
    assert (obj["alpha_star_min"], obj["alpha_star_max"]) == (-2, 2)
    assert obj["witness_max"] == "011"


def test_eggleston_half():
    res = cli("dim", "eggleston", "--alpha", "0.5")
    assert json.loads(res.stdout) == {"dimension": 1}


def test_moran_blocks(tmp_path):
    blocks = tmp_path / "b.json"
    blocks.write_text(json.dumps({"blocks": ["011", "000", "111"]}))
    res = cli("dim", "moran", "--blocks", blocks)
    assert json.loads(res.stdout)["dimension"] == pytest.approx(math.log2(3) / 3, abs=1e-12)


def test_spectrum_csv_matches_entropy(indicator):
    res = cli("spectrum", "--input", indicator, "--grid", 101)
    rows = list(csv.reader(io.StringIO(res.stdout)))
    assert rows[0] == ["alpha", "s"]
    assert len(rows) == 102
    for a, s in rows[1:]:
        a, s = float(a), float(s)
        h = -sum(p * math.log2(p) for p in (a, 1 - a) if p > 0)
        assert abs(s - h) < 1e-8


def test_output_is_byte_deterministic(indicator, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(["spectrum", "--input", str(indicator), "--grid", "33", "--out", str(a)])
    run(["spectrum", "--input", str(indicator), "--grid", "33", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_endpoint_dim_and_derivative(ex23, indicator):
    obj = json.loads(cli("endpoint-dim", "--input", ex23, "--side", "max").stdout)
    assert obj["dimension"] == pytest.approx(0.5514630897455953, abs=1e-10)
    res = cli("derivative", "--input", indicator, "--side", "max", "--deltas", "0.1,0.01")
    assert res.returncode == 0
    assert "slopes" in res.stdout or "slope" in res.stdout


def test_construct_block_metadata(indicator):
    obj = json.loads(cli("construct", "thm41", "--base", indicator, "--eps", 0.5).stdout)
    assert obj["ell"] == 81 and obj["k_A"] == 1
    assert obj["dim_H"] == pytest.approx(1 / 167, abs=1e-15)


def test_oracle_subcommands(indicator):
    cover = json.loads(
        cli("oracle", "cover", "--a", -1, "--b", 1, "--L", 6, "--beta", 0.25, "--N", 7, "--eps", 0.2).stdout
    )
    assert cover["exact_count"] == 8 and cover["pass"] is True
    n0 = json.loads(cli("oracle", "n0", "--input", indicator, "--eps", 1).stdout)
    # floor(2 k (|f| + a + eps/2) / eps) with k = 1, |f| = a = eps = 1
    assert n0["N0"] == 5
    count = cli("oracle", "count", "--input", indicator, "--alpha", 0.5, "--delta", 0.05, "--N", 20)
    assert "520676" in count.stdout


def test_error_path_leaves_no_file(tmp_path):
    out = tmp_path / "x.csv"
    res = cli("spectrum", "--input", tmp_path / "missing.json", "--out", out)
    assert res.returncode != 0
    lines = res.stderr.strip().splitlines()
    assert len(lines) == 1 and "error" in json.loads(lines[0])
    assert not out.exists()


def test_precondition_error_reported(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"depth": 2, "values": [1, 2, 3]}))
    res = cli("endpoints", "--input", bad)
    assert res.returncode == 2
    assert json.loads(res.stderr)["error"] == "PreconditionError"


def test_usage_error_is_json():
    res = cli("dim", "eggleston")
    assert res.returncode == 2
    json.loads(res.stderr)
