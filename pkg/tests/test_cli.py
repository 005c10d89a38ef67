"""CLI tests driven through click's runner."""

import csv
import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from argus.cli import cli

SCENARIO = """
[campaign]
n_versions = 8
k_periods = 10
m_licensees = 2
guarantee_len = 4
bounty_c = 100000
timeout = 2
seed = 7
asset_bytes = 512

[strategies]
owner = "honest"
licensees = ["leaker", "honest"]

[[strategies.informers]]
strategy = "honest"
"""


@pytest.fixture()
def runner():
    return CliRunner()


def write_scenario(tmp_path, text=SCENARIO):
    path = tmp_path / "scenario.toml"
    path.write_text(text)
    return str(path)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


# -- run -------------------------------------------------------------------


def test_run_scenario(tmp_path, runner):
    cfg = write_scenario(tmp_path)
    out = tmp_path / "out"
    result = runner.invoke(cli, ["run", "--config", cfg, "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert "PASS" in result.output and "FAIL" not in result.output
    outcome = json.loads((out / "outcome.json").read_text())
    assert outcome["statuses"]["1"] == "guilty"
    assert outcome["statuses"]["2"] == "normal"
    receipts = (out / "receipts.csv").read_text().splitlines()
    assert receipts[0].startswith("tx_id,")
    assert len(receipts) > 3
    bandwidth = read_csv(out / "bandwidth.csv")
    assert bandwidth[0] == ["licensee", "phase", "party", "bytes"]
    phases = {row[1] for row in bandwidth[1:]}
    assert {"ot-keys", "pir-query", "pir-response"} <= phases


def test_run_deterministic_output_bytes(tmp_path, runner):
    cfg = write_scenario(tmp_path)
    blobs = []
    for name in ("a", "b"):
        out = tmp_path / name
        result = runner.invoke(cli, ["run", "--config", cfg, "--out", str(out)])
        assert result.exit_code == 0
        blobs.append(
            (out / "outcome.json").read_bytes()
            + (out / "receipts.csv").read_bytes()
            + (out / "bandwidth.csv").read_bytes()
        )
    assert blobs[0] == blobs[1]


def test_run_bundled_scenario(tmp_path, runner):
    out = tmp_path / "out"
    result = runner.invoke(cli, ["run", "--config", "bsa-campaign", "--out", str(out)])
    assert result.exit_code == 0, result.output


def test_run_malformed_config_exit_2(tmp_path, runner):
    bad = tmp_path / "bad.toml"
    bad.write_text("[campaign\nnope")
    result = runner.invoke(cli, ["run", "--config", str(bad), "--out", str(tmp_path / "o")])
    assert result.exit_code == 2
    missing = runner.invoke(cli, ["run", "--config", str(tmp_path / "nope.toml"), "--out", str(tmp_path / "o")])
    assert missing.exit_code == 2
    invalid = tmp_path / "invalid.toml"
    invalid.write_text(SCENARIO.replace("n_versions = 8", "n_versions = 1"))
    result = runner.invoke(cli, ["run", "--config", str(invalid), "--out", str(tmp_path / "o")])
    assert result.exit_code == 2


# -- init / trade / report / appeal ------------------------------------------


def test_step_by_step_campaign(tmp_path, runner):
    cfg = write_scenario(tmp_path)
    out = tmp_path / "camp"
    r = runner.invoke(cli, ["init", "--config", cfg, "--out", str(out)])
    assert r.exit_code == 0, r.output
    summary = json.loads((out / "campaign.json").read_text())
    assert summary["n_versions"] == 8
    assert summary["owner_storage_bytes"] == 2 * 8 * 64

    r = runner.invoke(cli, ["trade", "--out", str(out), "--licensee", "1"])
    assert r.exit_code == 0, r.output
    copy_path = out / "copies" / "lic1.bin"
    assert copy_path.exists()

    r = runner.invoke(
        cli,
        ["report", "--out", str(out), "--informer", "inf-1", "--copy", str(copy_path)],
    )
    assert r.exit_code == 0, r.output
    assert "reveal" in r.output

    r = runner.invoke(cli, ["appeal", "--out", str(out), "--licensee", "1"])
    # the licensee is guilty (the reported copy really is theirs): appeal fails
    assert r.exit_code == 1
    assert "reverted" in r.output


def test_trade_twice_rejected(tmp_path, runner):
    cfg = write_scenario(tmp_path)
    out = tmp_path / "camp"
    runner.invoke(cli, ["init", "--config", cfg, "--out", str(out)])
    assert runner.invoke(cli, ["trade", "--out", str(out), "--licensee", "1"]).exit_code == 0
    r = runner.invoke(cli, ["trade", "--out", str(out), "--licensee", "1"])
    assert r.exit_code == 2


def test_report_without_watermark(tmp_path, runner):
    cfg = write_scenario(tmp_path)
    out = tmp_path / "camp"
    runner.invoke(cli, ["init", "--config", cfg, "--out", str(out)])
    plain = tmp_path / "plain.bin"
    plain.write_bytes(bytes(256))
    r = runner.invoke(
        cli, ["report", "--out", str(out), "--informer", "i", "--copy", str(plain)]
    )
    assert r.exit_code == 2


# -- reward-curve ---------------------------------------------------------------


def test_reward_curve_csv(tmp_path, runner):
    out = tmp_path / "curve.csv"
    r = runner.invoke(
        cli,
        ["reward-curve", "--c", "1000000", "--guarantee-len", "20",
         "--n", "20,inf", "--out", str(out)],
    )
    assert r.exit_code == 0, r.output
    rows = read_csv(out)
    assert rows[0] == ["model", "i", "n", "reward", "immediate", "deferred"]
    argus_20 = {r[1]: r for r in rows[1:] if r[0] == "argus" and r[2] == "20"}
    assert float(argus_20["1"][3]) == pytest.approx(99999.9046, abs=0.01)
    legacy = [r for r in rows[1:] if r[0] == "legacy"]
    assert len({r[3] for r in legacy}) == 1  # flat across i
    inf_rows = [r for r in rows[1:] if r[2] == "inf"]
    for row in inf_rows:
        assert row[3] == row[4]  # n=inf equals the immediate part


# -- bench ------------------------------------------------------------------------


def test_bench_appeal_size(tmp_path, runner):
    out = tmp_path / "appeal.csv"
    r = runner.invoke(
        cli, ["bench", "--dimension", "appeal-size", "--sweep", "8,64", "--out", str(out)]
    )
    assert r.exit_code == 0, r.output
    rows = read_csv(out)
    assert rows[0][0] == "n"
    o1_sizes = {row[1] for row in rows[1:]}
    assert len(o1_sizes) == 1  # constant calldata
    baseline = [int(row[3]) for row in rows[1:]]
    assert baseline[1] > baseline[0] * 4  # linear growth in N


def test_bench_caching(tmp_path, runner):
    out = tmp_path / "caching.csv"
    r = runner.invoke(
        cli, ["bench", "--dimension", "caching", "--sweep", "50", "--out", str(out)]
    )
    assert r.exit_code == 0, r.output
    rows = read_csv(out)
    reduction = float(rows[1][3])
    assert reduction >= 0.2


def test_bench_ot_latency(tmp_path, runner):
    out = tmp_path / "lat.csv"
    r = runner.invoke(
        cli, ["bench", "--dimension", "ot-latency", "--sweep", "50,100", "--out", str(out)]
    )
    assert r.exit_code == 0, r.output
    rows = read_csv(out)
    assert len(rows) == 3


def test_bench_bandwidth(tmp_path, runner):
    out = tmp_path / "bw.csv"
    r = runner.invoke(
        cli, ["bench", "--dimension", "bandwidth", "--sweep", "100", "--out", str(out)]
    )
    assert r.exit_code == 0, r.output
    rows = read_csv(out)
    assert int(rows[1][3]) > int(rows[1][2])  # direct costs more than hybrid
