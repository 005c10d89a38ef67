"""Command-line front end.

Subcommands:

* ``init`` / ``trade`` / ``report`` / ``appeal`` -- step through one
  campaign interactively, persisting state in the output directory.
* ``run`` -- execute a scenario file end to end; writes outcome.json,
  receipts.csv and bandwidth.csv; exit code 0 only if every scenario
  assertion holds (2 on malformed config).
* ``reward-curve`` -- bounty-schedule table as CSV.
* ``bench`` -- appeal-size / ot-latency / caching / bandwidth sweeps.

Scenario files are TOML; see the bundled ``bsa-campaign`` scenario for the
schema. Seeds are mandatory for reproducibility: identical (config, seed)
runs produce identical outputs.
"""

from __future__ import annotations

import csv
import json
import pickle
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import click

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from . import incentive, ot, pir, watermark
from .actors import (
    Assignment,
    CampaignConfig,
    ConfigError,
    InformerSpec,
    InformerStrategy,
    LicenseeStrategy,
    OwnerStrategy,
    run_appeal,
    run_game,
    run_initiate,
    run_report_piracy,
    run_share_data,
)
from .contract import build_plist_tree
from .crypto import keygen
from .group import get_group
from .ledger import receipt_csv_rows

STATE_FILE = "campaign.pkl"


def _load_toml(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError:
        raise click.UsageError(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise click.UsageError(f"malformed config: {exc}")


def _resolve_config_path(name_or_path: str) -> str:
    """A plain name resolves against the bundled scenarios."""
    p = Path(name_or_path)
    if p.exists():
        return str(p)
    bundled = Path(__file__).parent / "scenarios" / f"{name_or_path}.toml"
    if bundled.exists():
        return str(bundled)
    raise click.UsageError(f"no such config or bundled scenario: {name_or_path}")


_OWNER = {s.value: s for s in OwnerStrategy}
_LICENSEE = {s.value: s for s in LicenseeStrategy}
_INFORMER = {s.value: s for s in InformerStrategy}


def _parse_scenario(doc: dict, seed=None, backend=None, gas_doc=None):
    camp = dict(doc.get("campaign", {}))
    if seed is not None:
        camp["seed"] = seed
    if backend is not None:
        camp["backend"] = backend
    asset_path = camp.pop("asset", None)
    gas = dict(doc.get("gas", {}))
    if gas_doc:
        gas.update(gas_doc)
    try:
        if asset_path is not None:
            camp["asset_payload"] = Path(asset_path).read_bytes()
        config = CampaignConfig(gas_overrides=gas, **camp)
        config.validate()
    except (TypeError, ConfigError, OSError) as exc:
        raise click.UsageError(f"invalid campaign config: {exc}")

    strategies = doc.get("strategies")
    assignment = None
    if strategies is not None:
        try:
            owner = _OWNER[strategies.get("owner", "honest")]
            licensees = tuple(
                _LICENSEE[s] for s in strategies.get("licensees", ["honest"])
            )
            informers = tuple(
                InformerSpec(_INFORMER[i["strategy"]], i.get("sybil_count", 3))
                for i in strategies.get("informers", [])
            )
        except KeyError as exc:
            raise click.UsageError(f"unknown strategy {exc}")
        assignment = Assignment(owner, licensees, informers)
    return config, assignment


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _bandwidth_rows(campaign):
    rows = []
    for lic in campaign.licensees:
        if lic.bandwidth is None:
            continue
        for phase, party, nbytes in lic.bandwidth.rows():
            rows.append((lic.address, phase, party, nbytes))
    return rows


def _save_state(out: Path, campaign) -> None:
    with open(out / STATE_FILE, "wb") as fh:
        pickle.dump(campaign, fh)


def _load_state(out: Path):
    state = out / STATE_FILE
    if not state.exists():
        raise click.UsageError(f"no campaign state in {out}; run `argus init` first")
    with open(state, "rb") as fh:
        return pickle.load(fh)


@click.group()
def cli():
    """Anti-piracy bounty campaign simulator."""


@cli.command()
@click.option("--config", "config_path", required=True, help="scenario TOML or bundled name")
@click.option("--seed", type=int, default=None, help="override the scenario seed")
@click.option("--backend", type=click.Choice(["tiny", "secure"]), default=None)
@click.option("--gas-schedule", "gas_path", default=None, help="TOML with [gas] overrides")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def init(config_path, seed, backend, gas_path, out_dir):
    """Deploy a campaign and persist its state."""
    doc = _load_toml(_resolve_config_path(config_path))
    gas_doc = _load_toml(gas_path).get("gas", {}) if gas_path else None
    config, _assignment = _parse_scenario(doc, seed, backend, gas_doc)
    try:
        campaign = run_initiate(config)
    except ConfigError as exc:
        raise click.UsageError(str(exc))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _save_state(out, campaign)
    summary = {
        "backend": config.backend,
        "n_versions": config.n_versions,
        "k_periods": config.k_periods,
        "m_licensees": config.m_licensees,
        "seed": config.seed,
        "identity_root": campaign.contract.state.rt.hex(),
        "owner_storage_bytes": campaign.owner.id_tree.storage_bytes(),
    }
    (out / "campaign.json").write_text(json.dumps(summary, indent=2))
    click.echo(f"campaign deployed: {out / 'campaign.json'}")


@cli.command()
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--licensee", "x", type=int, required=True)
@click.option("--choice", type=int, default=None, help="version index (default: random)")
def trade(out_dir, x, choice):
    """Deliver one watermarked version to a licensee."""
    out = Path(out_dir)
    campaign = _load_state(out)
    try:
        lic = run_share_data(campaign, x, choice)
    except (ot.OtError, IndexError) as exc:
        raise click.UsageError(str(exc))
    copies = out / "copies"
    copies.mkdir(exist_ok=True)
    if lic.copy is not None:
        (copies / f"{lic.address}.bin").write_bytes(lic.copy)
    _save_state(out, campaign)
    _write_csv(
        out / "bandwidth.csv",
        ("licensee", "phase", "party", "bytes"),
        _bandwidth_rows(campaign),
    )
    click.echo(f"{lic.address} received a copy ({'saved' if lic.copy else 'evidence only'})")


@cli.command()
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--informer", required=True, help="informer address string")
@click.option("--copy", "copy_path", required=True, type=click.Path(exists=True))
def report(out_dir, informer, copy_path):
    """Report a pirated copy (commit now, reveal next period)."""
    out = Path(out_dir)
    campaign = _load_state(out)
    blob = Path(copy_path).read_bytes()
    try:
        commit_rcpt, reveal_rcpt = run_report_piracy(campaign, informer, blob)
    except watermark.DetectionError as exc:
        raise click.UsageError(f"no watermark in that file: {exc}")
    _save_state(out, campaign)
    (out / "receipts.csv").write_text("\n".join(receipt_csv_rows(campaign.ledger.receipts)) + "\n")
    click.echo(
        f"commit tx{commit_rcpt.tx_id} {commit_rcpt.status.value}; "
        f"reveal tx{reveal_rcpt.tx_id} {reveal_rcpt.status.value} "
        f"(gas {reveal_rcpt.gas_used})"
    )
    sys.exit(0 if reveal_rcpt.status.value == "ok" else 1)


@cli.command()
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--licensee", "x", type=int, required=True)
def appeal(out_dir, x):
    """Disclose the transfer record of an accused licensee."""
    out = Path(out_dir)
    campaign = _load_state(out)
    rcpt = run_appeal(campaign, x)
    _save_state(out, campaign)
    click.echo(f"appeal tx{rcpt.tx_id}: {rcpt.status.value} ({rcpt.error or 'exonerated'})")
    sys.exit(0 if rcpt.status.value == "ok" else 1)


@cli.command()
@click.option("--config", "config_path", required=True, help="scenario TOML or bundled name")
@click.option("--seed", type=int, default=None, help="override the scenario seed")
@click.option("--backend", type=click.Choice(["tiny", "secure"]), default=None)
@click.option("--gas-schedule", "gas_path", default=None)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.pass_context
def run(ctx, config_path, seed, backend, gas_path, out_dir):
    """Execute a full scenario and write outcome/receipt/bandwidth files."""
    doc = _load_toml(_resolve_config_path(config_path))
    gas_doc = _load_toml(gas_path).get("gas", {}) if gas_path else None
    config, assignment = _parse_scenario(doc, seed, backend, gas_doc)
    if assignment is None:
        raise click.UsageError("scenario file lacks a [strategies] section")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    outcome = run_game(assignment, config, seed=config.seed)
    payload = outcome.to_json_dict()
    payload["seed"] = config.seed
    (out / "outcome.json").write_text(json.dumps(payload, indent=2, sort_keys=True))
    (out / "receipts.csv").write_text("\n".join(receipt_csv_rows(outcome.receipts)) + "\n")
    _write_csv(out / "bandwidth.csv", ("licensee", "phase", "party", "bytes"), outcome.bandwidth)
    for a in outcome.assertions:
        click.echo(f"{'PASS' if a.passed else 'FAIL'}  {a.name}  {a.detail}")
    click.echo(f"outcome: {out / 'outcome.json'}")
    ctx.exit(0 if outcome.all_assertions_hold else 1)


@cli.command("reward-curve")
@click.option("--c", "total", default="1000000", help="total bounty per licensee")
@click.option("--guarantee-len", default=20, type=int)
@click.option("--n", "n_list", default="5,10,20,100", help="comma-separated totals; 'inf' allowed")
@click.option("--max-i", default=20, type=int)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def reward_curve(total, guarantee_len, n_list, max_i, out_path):
    """Reward table: (model, i, n, reward, immediate, deferred)."""
    try:
        sched = incentive.geometric_schedule(Fraction(total), guarantee_len)
        ns = [n if n == "inf" else int(n) for n in n_list.split(",") if n]
    except (ValueError, ZeroDivisionError) as exc:
        raise click.UsageError(str(exc))
    rows = [
        (model, i, n, f"{float(r):.6f}", f"{float(b1):.6f}", f"{float(b2):.6f}")
        for model, i, n, r, b1, b2 in incentive.reward_curve_rows(sched, ns, max_i)
    ]
    _write_csv(Path(out_path), ("model", "i", "n", "reward", "immediate", "deferred"), rows)
    click.echo(f"wrote {len(rows)} rows to {out_path}")


# -- bench ---------------------------------------------------------------------


def _bench_appeal_size(sweep, seed):
    """O(1) appeal vs the full-transcript baseline across version counts."""
    rows = []
    for n in sweep:
        config = CampaignConfig(
            n_versions=n,
            k_periods=4,
            m_licensees=1,
            guarantee_len=4,
            bounty_c=1000,
            timeout=1,
            seed=seed,
            data_transfer=False,
            enable_baseline_appeal=True,
        )
        measured = {}
        for mode in ("o1", "baseline"):
            campaign = run_initiate(config)
            rng = campaign.rng
            params = campaign.owner.ot_params
            record = ot.new_record(params, 2, rng)
            evidence = ot.generate_evidence(
                params, record, campaign.licensees[0].keypair, campaign.owner.keypair
            )
            # owner accuses version 1 through a shill report
            fake = watermark.embed(
                watermark.Asset(bytes(256)), campaign.owner.version_id(1, 1)
            )
            from .actors import report_commit, report_reveal

            _rcpt, pending = report_commit(campaign, "owner-shill", fake)
            campaign.ledger.advance_period()
            assert report_reveal(campaign, pending).status.value == "ok"
            sub = ot.AppealSubmission(record, evidence)
            if mode == "o1":
                rcpt = campaign.ledger.submit("lic1", "verify_appeal", submission=sub)
            else:
                keys = [bytes(32)] * n
                slots = ot.transfer(params, campaign.owner.ot_secret, evidence, keys)
                rcpt = campaign.ledger.submit(
                    "lic1", "baseline_appeal", submission=sub,
                    e_vector=slots, a_s=params.a_s,
                )
            assert rcpt.status.value == "ok", rcpt.error
            measured[mode] = (rcpt.calldata_bytes, rcpt.gas_used)
        rows.append(
            (
                n,
                measured["o1"][0],
                measured["o1"][1],
                measured["baseline"][0],
                measured["baseline"][1],
                f"{measured['baseline'][1] / measured['o1'][1]:.2f}",
            )
        )
    header = ("n", "o1_calldata", "o1_gas", "baseline_calldata", "baseline_gas", "gas_ratio")
    return header, rows


def _bench_ot_latency(sweep, seed):
    """Owner-side setup/transfer wall time across version counts."""
    group = get_group("tiny")
    rows = []
    for n in sweep:
        rng = random.Random(seed)
        owner = keygen(group, rng)
        licensee = keygen(group, rng)
        t0 = time.perf_counter()
        params, secret = ot.initialize(group, n, owner, rng)
        t1 = time.perf_counter()
        record = ot.new_record(params, max(1, n // 2), rng)
        evidence = ot.generate_evidence(params, record, licensee, owner)
        payloads = [bytes(64)] * n
        t2 = time.perf_counter()
        slots = ot.transfer(params, secret, evidence, payloads)
        t3 = time.perf_counter()
        ot.receive(slots, record, params.a_s)
        t4 = time.perf_counter()
        rows.append((n, f"{t1 - t0:.6f}", f"{t3 - t2:.6f}", f"{t4 - t3:.6f}"))
    return ("n", "owner_init_s", "owner_transfer_s", "licensee_receive_s"), rows


def _bench_caching(sweep, seed):
    """Hash-operation and verification-gas savings from the path cache."""
    from .actors import report_commit, report_reveal

    hash_only = {
        "base_tx": 0, "per_calldata_byte": 0, "per_hash": 1, "per_hash_word": 0,
        "storage_write_new": 0, "storage_write_update": 0, "storage_read": 0,
        "sig_verify": 0, "group_op": 0,
    }
    verification = {
        "base_tx": 0, "storage_write_new": 0, "storage_write_update": 0,
        "storage_read": 0, "sig_verify": 0, "group_op": 0,
    }
    rows = []
    for n_reports in sweep:
        measured = {}
        for label, overrides in (("ops", hash_only), ("gas", verification)):
            for truncate in (False, True):
                config = CampaignConfig(
                    n_versions=16, k_periods=64, m_licensees=2, guarantee_len=5,
                    bounty_c=1_000_000, timeout=2, seed=seed,
                    data_transfer=False, gas_overrides=overrides,
                )
                campaign = run_initiate(config)
                total = 0
                for i in range(n_reports):
                    target = campaign.owner.version_id(1, 1 + i % 8)
                    copy = watermark.embed(watermark.Asset(bytes(256)), target)
                    _c, pending = report_commit(campaign, f"inf-{i}", copy)
                    campaign.ledger.advance_period()
                    rcpt = report_reveal(campaign, pending, truncate=truncate)
                    assert rcpt.status.value == "ok"
                    total += rcpt.gas_used
                measured[(label, truncate)] = total
        ops_u, ops_c = measured[("ops", False)], measured[("ops", True)]
        gas_u, gas_c = measured[("gas", False)], measured[("gas", True)]
        rows.append(
            (
                n_reports, ops_u, ops_c, f"{1 - ops_c / ops_u:.3f}",
                gas_u, gas_c, f"{1 - gas_c / gas_u:.3f}",
            )
        )
    header = (
        "reports", "uncached_hash_ops", "cached_hash_ops", "hash_reduction",
        "uncached_verif_gas", "cached_verif_gas", "gas_reduction",
    )
    return header, rows


def _bench_bandwidth(sweep, seed):
    """Licensee download: hybrid delivery vs the full vector."""
    group = get_group("tiny")
    payload_len = 4096
    rows = []
    for n in sweep:
        rng = random.Random(seed)
        owner = keygen(group, rng)
        licensee = keygen(group, rng)
        params, secret = ot.initialize(group, n, owner, rng)
        record = ot.new_record(params, max(1, n // 2), rng)
        evidence = ot.generate_evidence(params, record, licensee, owner)
        payloads = [bytes(payload_len)] * n
        hybrid = pir.hybrid_share(params, secret, evidence, payloads, record, rng)
        direct = pir.direct_share(params, secret, evidence, payloads, record)
        h = hybrid.ledger.total(party="licensee")
        d = direct.ledger.total(party="licensee")
        rows.append((n, payload_len, h, d, f"{d / h:.1f}"))
    return ("n", "payload_bytes", "hybrid_bytes", "direct_bytes", "ratio"), rows


_BENCHES = {
    "appeal-size": (_bench_appeal_size, (10, 100, 1000)),
    "ot-latency": (_bench_ot_latency, (100, 1000, 10000)),
    "caching": (_bench_caching, (50,)),
    "bandwidth": (_bench_bandwidth, (100, 1000)),
}


@cli.command()
@click.option("--dimension", type=click.Choice(sorted(_BENCHES)), required=True)
@click.option("--sweep", default=None, help="comma-separated sweep values")
@click.option("--seed", type=int, default=0)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def bench(dimension, sweep, seed, out_path):
    """Measure cost/size/latency along one dimension."""
    fn, default_sweep = _BENCHES[dimension]
    values = default_sweep
    if sweep:
        try:
            values = tuple(int(v) for v in sweep.split(",") if v)
        except ValueError as exc:
            raise click.UsageError(str(exc))
    header, rows = fn(values, seed)
    _write_csv(Path(out_path), header, rows)
    click.echo(f"wrote {len(rows)} rows to {out_path}")


def main():
    cli(prog_name="argus")


if __name__ == "__main__":
    main()
