"""Protocol drivers and the adversarial scenario harness.

The drivers walk the six client protocols against a fresh ledger: campaign
setup, licensed data delivery, piracy reporting, appeals, convictions and
bounty claims. The harness assigns a scripted strategy to every actor

    owner:    HONEST | FALSE_ACCUSER
    licensee: HONEST | LEAKER | GUILTY_APPEALER
    informer: HONEST | SYBIL(k) | REPLAYER | GUESSER

and replays the whole campaign deterministically from a seed, returning an
outcome with per-role interest assertions evaluated (failures are flagged,
not raised). Malicious behaviors are scripted case enumerations, not
adaptive adversaries.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from . import crypto, incentive, ot, pir, watermark
from .contract import ArgusContract, ContractConfig, Status, build_plist_tree
from .crypto import H, be32
from .group import get_group
from .ledger import GasSchedule, Ledger, Receipt, TxStatus
from .merkle import (
    IdTreeOwner,
    MerklePath,
    build_id_tree,
    composite_leaf_position,
    tree_depth,
    truncate_for_cache,
)


class ConfigError(Exception):
    pass


class OwnerStrategy(enum.Enum):
    HONEST = "honest"
    FALSE_ACCUSER = "false_accuser"


class LicenseeStrategy(enum.Enum):
    HONEST = "honest"
    LEAKER = "leaker"
    GUILTY_APPEALER = "guilty_appealer"


class InformerStrategy(enum.Enum):
    HONEST = "honest"
    SYBIL = "sybil"
    REPLAYER = "replayer"
    GUESSER = "guesser"


@dataclass(frozen=True)
class InformerSpec:
    strategy: InformerStrategy
    sybil_count: int = 3


@dataclass(frozen=True)
class Assignment:
    owner: OwnerStrategy
    licensees: Tuple[LicenseeStrategy, ...]
    informers: Tuple[InformerSpec, ...]


@dataclass(frozen=True)
class CampaignConfig:
    n_versions: int = 16
    k_periods: int = 12
    m_licensees: int = 2
    guarantee_len: int = 5
    bounty_c: object = 1_000_000
    timeout: int = 2
    seed: int = 0
    backend: str = "tiny"
    l_seg: Optional[int] = None  # defaults to ceil(log2(n_versions))
    asset_payload: Optional[bytes] = None
    asset_bytes: int = 2048
    gas_overrides: Dict[str, int] = field(default_factory=dict)
    plist_root_committed: bool = False
    enable_baseline_appeal: bool = False
    data_transfer: bool = True  # False: stop ShareData at the evidence

    def resolved_l_seg(self) -> int:
        if self.l_seg is not None:
            return self.l_seg
        bits = max(1, (self.n_versions - 1).bit_length())
        return bits

    def validate(self) -> None:
        if self.n_versions < 2:
            raise ConfigError("need at least two versions")
        if self.m_licensees < 1:
            raise ConfigError("need at least one licensee")
        if self.k_periods < 4:
            raise ConfigError("campaign needs at least four periods")
        if self.timeout < 1:
            raise ConfigError("timeout must be at least one period")
        if (1 << self.resolved_l_seg()) < self.n_versions:
            raise ConfigError("2^l_seg must cover the version count")
        if self.data_transfer:
            payload = self.asset_payload or bytes(self.asset_bytes)
            if len(payload) < self.resolved_l_seg() * watermark.MARK_LEN:
                raise ConfigError("asset too small for the segment count")


@dataclass
class OwnerActor:
    address: str
    keypair: crypto.KeyPair
    ot_params: ot.OtPublicParams
    ot_secret: ot.OwnerOtSecret
    id_tree: IdTreeOwner
    family_keys: List[bytes]  # per licensee
    families: List[Optional[watermark.VersionFamily]]
    evidence_by_licensee: Dict[int, ot.OtEvidence] = field(default_factory=dict)
    cipher_stores: Dict[int, Tuple[pir.CipherStore, List[bytes]]] = field(default_factory=dict)

    def version_id(self, x: int, y: int) -> bytes:
        """id of licensee x's version y (1-based both)."""
        return watermark.version_id(self.family_keys[x - 1], y - 1)


@dataclass
class LicenseeActor:
    address: str
    index: int
    keypair: crypto.KeyPair
    record: Optional[ot.OtRecord] = None
    evidence: Optional[ot.OtEvidence] = None
    copy: Optional[bytes] = None
    bandwidth: Optional[pir.BandwidthLedger] = None


@dataclass
class Campaign:
    config: CampaignConfig
    rng: random.Random
    ledger: Ledger
    contract: ArgusContract
    owner: OwnerActor
    licensees: List[LicenseeActor]

    @property
    def schedule(self) -> incentive.RewardSchedule:
        return self.contract.config.schedule


# -- Initiate -----------------------------------------------------------------


def run_initiate(config: CampaignConfig) -> Campaign:
    """Deploy the campaign: OT parameters, watermark families, identity
    tree, contract state and the bounty deposits."""
    config.validate()
    rng = random.Random(config.seed)
    group = get_group(config.backend)
    owner_kp = crypto.keygen(group, rng)
    lic_kps = [crypto.keygen(group, rng) for _ in range(config.m_licensees)]
    params, ot_secret = ot.initialize(group, config.n_versions, owner_kp, rng)

    family_keys = [rng.randbytes(watermark.ID_LEN) for _ in range(config.m_licensees)]
    families: List[Optional[watermark.VersionFamily]] = []
    if config.data_transfer:
        payload = config.asset_payload or bytes(config.asset_bytes)
        asset = watermark.Asset(payload)
        l_seg = config.resolved_l_seg()
        families = [
            watermark.segment_generate(asset, l_seg, key) for key in family_keys
        ]
    else:
        families = [None] * config.m_licensees

    ids = [
        [watermark.version_id(key, y) for y in range(config.n_versions)]
        for key in family_keys
    ]
    tree = build_id_tree(ids, config.k_periods)

    sched = incentive.geometric_schedule(config.bounty_c, config.guarantee_len)
    ccfg = ContractConfig(
        n_versions=config.n_versions,
        k_periods=config.k_periods,
        timeout=config.timeout,
        schedule=sched,
        plist_root_committed=config.plist_root_committed,
        enable_baseline_appeal=config.enable_baseline_appeal,
    )
    contract = ArgusContract(
        group,
        ccfg,
        "owner",
        owner_kp.public,
        [(f"lic{i + 1}", kp.public) for i, kp in enumerate(lic_kps)],
    )
    # deploy-time storage seeding; Store() remains the incremental path
    if config.plist_root_committed:
        contract.state.p_root = build_plist_tree(params.points).root
    else:
        contract.state.plist = [p.encode() for p in params.points]
    contract.state.rt = tree.root

    schedule = GasSchedule().with_overrides(config.gas_overrides)
    ledger = Ledger(schedule)
    ledger.register_contract(contract)
    pool = config.m_licensees * sched.total_bounty
    ledger.mint("owner", pool)
    if not ledger.transfer("owner", ledger.contract_address, pool):
        raise ConfigError("owner cannot fund the bounty pool")

    owner = OwnerActor(
        "owner", owner_kp, params, ot_secret, tree, family_keys, families
    )
    licensees = [
        LicenseeActor(f"lic{i + 1}", i + 1, kp) for i, kp in enumerate(lic_kps)
    ]
    return Campaign(config, rng, ledger, contract, owner, licensees)


# -- ShareData ----------------------------------------------------------------


def run_share_data(campaign: Campaign, x: int, choice: int = None) -> LicenseeActor:
    """Deliver one version to licensee x: evidence exchange, then keys by
    OT and the ciphertext by PIR. One evidence per licensee is enforced."""
    owner = campaign.owner
    lic = campaign.licensees[x - 1]
    if x in owner.evidence_by_licensee:
        raise ot.OtError(f"licensee {x} already holds transfer evidence")
    params = owner.ot_params
    if choice is None:
        choice = campaign.rng.randrange(1, params.n + 1)
    record = ot.new_record(params, choice, campaign.rng)
    r_point, sig_l = ot.licensee_sign_evidence(params, record, lic.keypair)
    evidence = ot.owner_countersign(params, r_point, lic.keypair.public, sig_l, owner.keypair)
    owner.evidence_by_licensee[x] = evidence
    lic.record = record
    lic.evidence = evidence
    if not campaign.config.data_transfer:
        return lic
    family = owner.families[x - 1]
    if x not in owner.cipher_stores:
        payloads = [family.version(j) for j in range(params.n)]
        keys = [campaign.rng.randbytes(pir.KEY_LEN) for _ in range(params.n)]
        owner.cipher_stores[x] = (pir.encrypt_all(payloads, keys), keys)
    store, keys = owner.cipher_stores[x]
    payloads = [family.version(j) for j in range(params.n)]
    result = pir.hybrid_share(
        params, owner.ot_secret, evidence, payloads, record, campaign.rng,
        store=store, keys=keys,
    )
    lic.copy = result.payload
    lic.bandwidth = result.ledger
    return lic


# -- ReportPiracy -------------------------------------------------------------


def report_commit(campaign: Campaign, informer: str, copy: bytes) -> Tuple[Receipt, dict]:
    """Detect the watermark, resolve coordinates, and commit. Returns the
    receipt and the pending context needed for the reveal."""
    id_xy = watermark.detect(copy)  # DetectionError -> no ledger interaction
    x, y = campaign.owner.id_tree.locate(id_xy)
    t_commit = campaign.ledger.time()
    rv1 = H(id_xy, be32(t_commit))
    cm1 = H(rv1, informer.encode())
    rcpt = campaign.ledger.submit(informer, "store", tp="cm", dat=(cm1, x, y))
    pending = {"id": id_xy, "x": x, "y": y, "t": t_commit, "rv1": rv1, "informer": informer}
    return rcpt, pending


def report_reveal(campaign: Campaign, pending: dict, truncate: bool = True) -> Receipt:
    """Reveal in the period after the commit."""
    path = campaign.owner.id_tree.query(
        pending["x"], pending["y"], pending["t"], pending["id"]
    )
    if truncate:
        path = truncate_for_cache(path, campaign.contract.state.path_cache)
    return campaign.ledger.submit(
        pending["informer"],
        "verify_report",
        rv1=pending["rv1"],
        path=path,
        rv3=pending["informer"],
    )


def run_report_piracy(campaign: Campaign, informer: str, copy: bytes) -> Tuple[Receipt, Receipt]:
    """Full commit/advance/reveal round for one pirated copy."""
    commit_rcpt, pending = report_commit(campaign, informer, copy)
    campaign.ledger.advance_period()
    return commit_rcpt, report_reveal(campaign, pending)


# -- Appeal / ConfirmInfringer / ClaimBounty -----------------------------------


def run_appeal(campaign: Campaign, x: int) -> Receipt:
    lic = campaign.licensees[x - 1]
    if lic.record is None or lic.evidence is None:
        raise ot.OtError("licensee holds no transfer record to disclose")
    sub = ot.AppealSubmission(lic.record, lic.evidence)
    params = {}
    if campaign.config.plist_root_committed:
        ptree = build_plist_tree(campaign.owner.ot_params.points)
        params = {
            "p_point": campaign.owner.ot_params.points[lic.record.l - 1],
            "p_proof": ptree.prove(lic.record.l - 1),
        }
    return campaign.ledger.submit(lic.address, "verify_appeal", submission=sub, **params)


def confirm_infringers(campaign: Campaign) -> List[Receipt]:
    """Owner clock-driver: convict every accused licensee past the window."""
    receipts = []
    for x, slot in enumerate(campaign.contract.state.slots, start=1):
        if slot.status is Status.ACCUSED:
            receipts.append(campaign.ledger.submit("owner", "set_guilty", x=x))
    return receipts


def claim_bounties(campaign: Campaign) -> List[Receipt]:
    """Clock-driver for informers: claim every pending deferred payout."""
    receipts = []
    for x, slot in enumerate(campaign.contract.state.slots, start=1):
        for address, pending in sorted(slot.is_informer.items()):
            if pending:
                receipts.append(
                    campaign.ledger.submit(address, "allocate_bounty", pk=address, x=x)
                )
    return receipts


# -- the game harness -----------------------------------------------------------


@dataclass
class AssertionResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class Outcome:
    statuses: Dict[int, Status]
    report_numbers: Dict[int, int]
    payouts: Dict[str, Fraction]
    receipts: List[Receipt]
    assertions: List[AssertionResult]
    false_accusation_hit: bool = False
    accepted_reports: Dict[int, List[str]] = field(default_factory=dict)
    bandwidth: List[Tuple[str, str, str, int]] = field(default_factory=list)

    @property
    def all_assertions_hold(self) -> bool:
        return all(a.passed for a in self.assertions)

    def to_json_dict(self) -> dict:
        return {
            "statuses": {x: s.value for x, s in self.statuses.items()},
            "report_numbers": dict(self.report_numbers),
            "payouts": {k: str(v) for k, v in self.payouts.items()},
            "false_accusation_hit": self.false_accusation_hit,
            "accepted_reports": {x: list(v) for x, v in self.accepted_reports.items()},
            "assertions": [
                {"name": a.name, "passed": a.passed, "detail": a.detail}
                for a in self.assertions
            ],
            "receipts": len(self.receipts),
        }


def outcome_from_receipts(receipts: List[Receipt], m_licensees: int) -> Outcome:
    """Rebuild the observable outcome purely from the transaction log."""
    statuses = {x: Status.NORMAL for x in range(1, m_licensees + 1)}
    numbers = {x: 0 for x in range(1, m_licensees + 1)}
    payouts: Dict[str, Fraction] = {}
    accepted: Dict[int, List[str]] = {x: [] for x in range(1, m_licensees + 1)}
    for r in receipts:
        if r.status is not TxStatus.OK:
            continue
        for e in r.events:
            if e.kind == "Accused":
                statuses[e.get("licensee")] = Status.ACCUSED
            elif e.kind == "Exonerated":
                statuses[e.get("licensee")] = Status.EXONERATED
            elif e.kind == "Guilty":
                statuses[e.get("licensee")] = Status.GUILTY
            elif e.kind == "Reported":
                x = e.get("licensee")
                numbers[x] = max(numbers[x], e.get("number"))
                accepted[x].append(e.get("informer"))
            elif e.kind == "BountyPaid":
                pk = e.get("pk")
                payouts[pk] = payouts.get(pk, Fraction(0)) + e.get("amount")
    return Outcome(statuses, numbers, payouts, list(receipts), [], accepted_reports=accepted)


def _leaks(assignment: Assignment) -> List[int]:
    return [
        x
        for x, strat in enumerate(assignment.licensees, start=1)
        if strat in (LicenseeStrategy.LEAKER, LicenseeStrategy.GUILTY_APPEALER)
    ]


def run_game(assignment: Assignment, config: CampaignConfig = None, seed: int = 0) -> Outcome:
    """Execute a full campaign under the strategy assignment."""
    if config is None:
        config = CampaignConfig()
    config = replace(
        config, m_licensees=len(assignment.licensees), seed=seed
    )
    campaign = run_initiate(config)
    ledger = campaign.ledger
    contract = campaign.contract
    rng = campaign.rng

    for x in range(1, config.m_licensees + 1):
        run_share_data(campaign, x)

    # leak phase: guilty licensees publish their copies
    leaked: List[Tuple[int, bytes]] = []
    for x in _leaks(assignment):
        lic = campaign.licensees[x - 1]
        copy = lic.copy
        if copy is None:
            # no payload flow in slim mode: the leak is the id itself
            copy = watermark.embed(
                watermark.Asset(bytes(256)),
                campaign.owner.version_id(x, lic.record.l),
            )
        leaked.append((x, copy))

    accepted: Dict[int, List[str]] = {x: [] for x in range(1, config.m_licensees + 1)}
    observed_reveals: List[dict] = []

    # main report wave: commits batched in one period, reveals in the next
    wave: List[Tuple[str, bytes]] = []
    for i, spec in enumerate(assignment.informers):
        base = f"inf-{i + 1}"
        if spec.strategy is InformerStrategy.HONEST:
            for _x, copy in leaked:
                wave.append((base, copy))
        elif spec.strategy is InformerStrategy.SYBIL:
            for _x, copy in leaked:
                for s in range(spec.sybil_count):
                    wave.append((f"{base}-sybil{s + 1}", copy))
    pendings = []
    for address, copy in wave:
        rcpt, pending = report_commit(campaign, address, copy)
        if rcpt.status is TxStatus.OK:
            pendings.append(pending)

    # the false accuser rides the same commit wave through a shill address
    shill_pending = None
    if assignment.owner is OwnerStrategy.FALSE_ACCUSER and config.m_licensees >= 1:
        target = next(
            (
                x
                for x, s in enumerate(assignment.licensees, start=1)
                if s is LicenseeStrategy.HONEST
            ),
            1,
        )
        guess = rng.randrange(1, config.n_versions + 1)
        fake_copy = watermark.embed(
            watermark.Asset(bytes(256)), campaign.owner.version_id(target, guess)
        )
        rcpt, shill_pending = report_commit(campaign, "owner-shill", fake_copy)
        shill_target, shill_guess = target, guess

    # guessers commit garbage in the same wave
    guess_pendings = []
    for i, spec in enumerate(assignment.informers):
        if spec.strategy is InformerStrategy.GUESSER:
            address = f"inf-{i + 1}"
            fake_id = rng.randbytes(watermark.ID_LEN)
            t_commit = ledger.time()
            rv1 = H(fake_id, be32(t_commit))
            cm1 = H(rv1, address.encode())
            ledger.submit(address, "store", tp="cm", dat=(cm1, 1, 1))
            guess_pendings.append(
                {"informer": address, "rv1": rv1, "x": 1, "y": 1, "t": t_commit}
            )

    ledger.advance_period()
    for pending in pendings:
        reveal = report_reveal(campaign, pending)
        if reveal.status is TxStatus.OK:
            accepted[pending["x"]].append(pending["informer"])
            observed_reveals.append(pending)
    if shill_pending is not None:
        reveal = report_reveal(campaign, shill_pending)
        if reveal.status is TxStatus.OK:
            accepted[shill_pending["x"]].append("owner-shill")
    for pending in guess_pendings:
        depth = (
            tree_depth(config.m_licensees)
            + tree_depth(config.n_versions)
            + tree_depth(config.k_periods)
        )
        fake_path = MerklePath(
            H(pending["rv1"], be32(1), be32(1)),
            composite_leaf_position(
                config.m_licensees, config.n_versions, config.k_periods, 1, 1, pending["t"]
            ),
            tuple(rng.randbytes(32) for _ in range(depth)),
        )
        ledger.submit(
            pending["informer"],
            "verify_report",
            rv1=pending["rv1"],
            path=fake_path,
            rv3=pending["informer"],
        )

    # appeal phase (inside the window): honest accused licensees appeal;
    # guilty appealers try and fail on chain
    for x, strat in enumerate(assignment.licensees, start=1):
        slot = contract.state.slots[x - 1]
        if slot.status is not Status.ACCUSED:
            continue
        if strat in (LicenseeStrategy.HONEST, LicenseeStrategy.GUILTY_APPEALER):
            run_appeal(campaign, x)

    # replay wave: replayers copy the first observed reveal
    replayer_specs = [
        (i, s)
        for i, s in enumerate(assignment.informers)
        if s.strategy is InformerStrategy.REPLAYER
    ]
    if replayer_specs and observed_reveals:
        stolen = observed_reveals[0]
        for i, _spec in replayer_specs:
            address = f"inf-{i + 1}"
            cm1 = H(stolen["rv1"], address.encode())
            ledger.submit(address, "store", tp="cm", dat=(cm1, stolen["x"], stolen["y"]))
        ledger.advance_period()
        for i, _spec in replayer_specs:
            address = f"inf-{i + 1}"
            path = campaign.owner.id_tree.query(
                stolen["x"], stolen["y"], stolen["t"], stolen["id"]
            )
            ledger.submit(
                address, "verify_report", rv1=stolen["rv1"], path=path, rv3=address
            )

    # conviction after the appeal window
    for _ in range(config.timeout + 1):
        ledger.advance_period()
    confirm_infringers(campaign)

    # campaign end: deferred payouts
    while ledger.time() < config.k_periods:
        ledger.advance_period()
    claim_bounties(campaign)

    statuses = {
        x: contract.state.slots[x - 1].status for x in range(1, config.m_licensees + 1)
    }
    numbers = {
        x: contract.state.slots[x - 1].report_number
        for x in range(1, config.m_licensees + 1)
    }
    payouts: Dict[str, Fraction] = {}
    for r in ledger.receipts:
        if r.status is TxStatus.OK:
            for e in r.events:
                if e.kind == "BountyPaid":
                    pk = e.get("pk")
                    payouts[pk] = payouts.get(pk, Fraction(0)) + e.get("amount")

    hit = False
    if assignment.owner is OwnerStrategy.FALSE_ACCUSER and shill_pending is not None:
        hit = campaign.licensees[shill_target - 1].record.l == shill_guess

    bandwidth = [
        (lic.address, phase, party, nbytes)
        for lic in campaign.licensees
        if lic.bandwidth is not None
        for phase, party, nbytes in lic.bandwidth.rows()
    ]
    outcome = Outcome(
        statuses,
        numbers,
        payouts,
        list(ledger.receipts),
        [],
        false_accusation_hit=hit,
        accepted_reports=accepted,
        bandwidth=bandwidth,
    )
    outcome.assertions = _evaluate_assertions(assignment, config, campaign, outcome)
    return outcome


def _evaluate_assertions(
    assignment: Assignment, config: CampaignConfig, campaign: Campaign, outcome: Outcome
) -> List[AssertionResult]:
    results: List[AssertionResult] = []
    sched = campaign.schedule
    leakers = set(_leaks(assignment))

    if assignment.owner is OwnerStrategy.HONEST:
        for x in range(1, config.m_licensees + 1):
            status = outcome.statuses[x]
            if x in leakers and outcome.accepted_reports[x]:
                ok = status is Status.GUILTY
                results.append(
                    AssertionResult(
                        f"owner: leaker {x} convicted", ok, f"status={status.value}"
                    )
                )
            if x not in leakers:
                ok = status in (Status.NORMAL, Status.EXONERATED)
                results.append(
                    AssertionResult(
                        f"owner: innocent {x} not convicted", ok, f"status={status.value}"
                    )
                )
        for x in leakers:
            distinct = len(set(outcome.accepted_reports[x]))
            ok = outcome.report_numbers[x] >= (1 if outcome.accepted_reports[x] else 0)
            results.append(
                AssertionResult(
                    f"owner: report count for {x} covers the leak",
                    ok,
                    f"count={outcome.report_numbers[x]} accepted={distinct}",
                )
            )
        # replayers and guessers never inflate the counters
        total_counted = sum(outcome.report_numbers.values())
        total_accepted = sum(len(v) for v in outcome.accepted_reports.values())
        results.append(
            AssertionResult(
                "owner: counters match accepted reports",
                total_counted == total_accepted,
                f"counted={total_counted} accepted={total_accepted}",
            )
        )

    for x, strat in enumerate(assignment.licensees, start=1):
        if strat is LicenseeStrategy.HONEST:
            status = outcome.statuses[x]
            if status is Status.GUILTY:
                ok = outcome.false_accusation_hit
                detail = "guilty only through the 1/N accusation lottery"
            else:
                ok = True
                detail = f"status={status.value}"
            results.append(AssertionResult(f"licensee {x}: interest preserved", ok, detail))

    for i, spec in enumerate(assignment.informers):
        base = f"inf-{i + 1}"
        if spec.strategy is InformerStrategy.HONEST:
            engaged = [
                (x, idx)
                for x in outcome.accepted_reports
                for idx, addr in enumerate(outcome.accepted_reports[x], start=1)
                if addr == base
            ]
            expected = Fraction(0)
            for x, idx in engaged:
                expected += incentive.immediate(sched, idx)
            per_licensee = {x for x, _ in engaged}
            for x in per_licensee:
                expected += incentive.deferred(sched, outcome.report_numbers[x])
            got = outcome.payouts.get(base, Fraction(0))
            results.append(
                AssertionResult(
                    f"informer {base}: paid per schedule",
                    got == expected,
                    f"got={got} expected={expected}",
                )
            )
            if leakers:
                results.append(
                    AssertionResult(
                        f"informer {base}: reports accepted",
                        len(engaged) == len(leakers),
                        f"accepted={len(engaged)} leaks={len(leakers)}",
                    )
                )
        elif spec.strategy is InformerStrategy.SYBIL:
            addresses = [f"{base}-sybil{s + 1}" for s in range(spec.sybil_count)]
            got = sum(
                (outcome.payouts.get(a, Fraction(0)) for a in addresses), Fraction(0)
            )
            # counterfactual: one report instead of sybil_count duplicates
            for x in outcome.accepted_reports:
                idxs = [
                    idx
                    for idx, addr in enumerate(outcome.accepted_reports[x], start=1)
                    if addr in addresses
                ]
                if not idxs:
                    continue
                n_final = outcome.report_numbers[x]
                single = incentive.reward(sched, idxs[0], n_final - len(idxs) + 1)
                actual = sum(
                    (incentive.reward(sched, idx, n_final) for idx in idxs), Fraction(0)
                )
                results.append(
                    AssertionResult(
                        f"informer {base}: sybil duplication unprofitable",
                        actual <= single,
                        f"duplicated={actual} single={single}",
                    )
                )
        elif spec.strategy in (InformerStrategy.REPLAYER, InformerStrategy.GUESSER):
            got = outcome.payouts.get(base, Fraction(0))
            results.append(
                AssertionResult(
                    f"informer {base}: attack earned nothing", got == 0, f"got={got}"
                )
            )
    return results


# -- focused Monte Carlo helpers -------------------------------------------------


def false_accusation_trial(template: "FalseAccusationTemplate", seed: int) -> Tuple[bool, bool]:
    """One accusation lottery round. Returns (exonerated, hit)."""
    return template.trial(seed)


class FalseAccusationTemplate:
    """Shared heavy state for repeated false-accusation trials: the OT
    parameters and identity tree are campaign constants; each trial draws a
    fresh licensee choice and a fresh owner guess."""

    def __init__(self, n_versions: int = 100, k_periods: int = 4, seed: int = 0):
        self.config = CampaignConfig(
            n_versions=n_versions,
            k_periods=k_periods,
            m_licensees=1,
            guarantee_len=4,
            bounty_c=1000,
            timeout=1,
            seed=seed,
            data_transfer=False,
        )
        self.base = run_initiate(self.config)

    def trial(self, seed: int) -> Tuple[bool, bool]:
        rng = random.Random(seed)
        base = self.base
        config = self.config
        group = base.owner.ot_params.group
        # fresh ledger/contract over the shared campaign constants
        contract = ArgusContract(
            group,
            base.contract.config,
            "owner",
            base.owner.keypair.public,
            [("lic1", base.licensees[0].keypair.public)],
        )
        contract.state.plist = list(base.contract.state.plist)
        contract.state.rt = base.contract.state.rt
        ledger = Ledger()
        ledger.register_contract(contract)
        ledger.mint("owner", base.schedule.total_bounty)
        ledger.transfer("owner", ledger.contract_address, base.schedule.total_bounty)
        campaign = Campaign(
            config, rng, ledger, contract, base.owner, base.licensees
        )
        params = base.owner.ot_params
        choice = rng.randrange(1, params.n + 1)
        record = ot.new_record(params, choice, rng)
        evidence = ot.generate_evidence(
            params, record, base.licensees[0].keypair, base.owner.keypair
        )
        # owner accuses a uniformly random version through a shill report
        guess = rng.randrange(1, params.n + 1)
        fake_copy = watermark.embed(
            watermark.Asset(bytes(256)), base.owner.version_id(1, guess)
        )
        _rcpt, pending = report_commit(campaign, "owner-shill", fake_copy)
        ledger.advance_period()
        reveal = report_reveal(campaign, pending, truncate=False)
        if reveal.status is not TxStatus.OK:
            raise RuntimeError("shill report unexpectedly rejected")
        sub = ot.AppealSubmission(record, evidence)
        rcpt = ledger.submit("lic1", "verify_appeal", submission=sub)
        exonerated = rcpt.status is TxStatus.OK
        return exonerated, guess == choice


def guess_attack_hits(campaign: Campaign, trials: int, rng: random.Random) -> int:
    """Necessary condition for a fabricated report: the guessed id must
    collide with a registered one. Counts collisions over random guesses."""
    idmap = campaign.owner.id_tree.idmap
    hits = 0
    for _ in range(trials):
        guess = rng.randbytes(watermark.ID_LEN)
        if H(guess) in idmap:
            hits += 1
    return hits
