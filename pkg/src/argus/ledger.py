"""Deterministic single-chain ledger simulator with gas metering.

Transactions apply strictly in submission order inside the current
period; the period clock only moves through :meth:`Ledger.advance_period`.
A registered contract handles calls through ``encode_calldata`` (canonical
wire size, charged per byte) and ``handle`` (the state transition, which
meters its primitive operations through the environment). A handler
exception reverts the state snapshot but still charges the gas spent.

Costs are configurable; the defaults are loosely Ethereum-flavored and
absolute numbers carry no meaning beyond ordering and ratios.
"""

from __future__ import annotations

import copy
import enum
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Tuple


class LedgerError(Exception):
    pass


class HandlerRevert(Exception):
    """Raised by contract handlers to reject a transaction."""


@dataclass(frozen=True)
class GasSchedule:
    base_tx: int = 21_000
    per_calldata_byte: int = 16
    per_hash: int = 36
    per_hash_word: int = 6  # per 32-byte word of hash input
    storage_write_new: int = 20_000
    storage_write_update: int = 5_000
    storage_read: int = 800
    sig_verify: int = 3_000
    group_op: int = 6_000

    def with_overrides(self, overrides: Dict[str, int]) -> "GasSchedule":
        unknown = set(overrides) - set(self.__dataclass_fields__)
        if unknown:
            raise LedgerError(f"unknown gas schedule fields: {sorted(unknown)}")
        return replace(self, **overrides)


class GasMeter:
    """Primitive-operation counter for one transaction."""

    def __init__(self, schedule: GasSchedule):
        self.schedule = schedule
        self.hash_ops = 0
        self.hash_words = 0
        self.sreads = 0
        self.swrites_new = 0
        self.swrites_update = 0
        self.sig_verifies = 0
        self.group_ops = 0

    def hash_bytes(self, nbytes: int, ops: int = 1) -> None:
        self.hash_ops += ops
        self.hash_words += ops * ((nbytes + 31) // 32)

    def sread(self, n: int = 1) -> None:
        self.sreads += n

    def swrite_new(self, n: int = 1) -> None:
        self.swrites_new += n

    def swrite_update(self, n: int = 1) -> None:
        self.swrites_update += n

    def sig_verify(self, n: int = 1) -> None:
        self.sig_verifies += n

    def group_op(self, n: int = 1) -> None:
        self.group_ops += n

    def total(self) -> int:
        s = self.schedule
        return (
            self.hash_ops * s.per_hash
            + self.hash_words * s.per_hash_word
            + self.sreads * s.storage_read
            + self.swrites_new * s.storage_write_new
            + self.swrites_update * s.storage_write_update
            + self.sig_verifies * s.sig_verify
            + self.group_ops * s.group_op
        )


class TxStatus(enum.Enum):
    OK = "ok"
    REVERTED = "reverted"


@dataclass(frozen=True)
class Event:
    kind: str
    data: tuple  # sorted (key, value) pairs, hashable and deterministic

    @staticmethod
    def make(kind: str, /, **fields) -> "Event":
        return Event(kind, tuple(sorted(fields.items())))

    def get(self, key: str):
        return dict(self.data).get(key)


@dataclass(frozen=True)
class Receipt:
    tx_id: int
    caller: str
    method: str
    period: int
    status: TxStatus
    gas_used: int
    calldata_bytes: int
    events: Tuple[Event, ...]
    error: Optional[str] = None
    result: object = None


class Env:
    """Execution environment handed to contract handlers."""

    def __init__(self, ledger: "Ledger", caller: str, contract_address: str):
        self.ledger = ledger
        self.caller = caller
        self.contract_address = contract_address
        self.meter = GasMeter(ledger.schedule)
        self.events: List[Event] = []

    @property
    def period(self) -> int:
        return self.ledger.time()

    def emit(self, kind: str, /, **fields) -> None:
        self.events.append(Event.make(kind, **fields))

    def pay(self, to: str, amount: Fraction) -> None:
        self.ledger._move(self.contract_address, to, amount)

    def balance(self, address: str) -> Fraction:
        return self.ledger.balances.get(address, Fraction(0))


class Ledger:
    """Ordered transaction log, balances and the period clock."""

    def __init__(self, schedule: GasSchedule = None):
        self.schedule = schedule or GasSchedule()
        self._period = 1
        self.receipts: List[Receipt] = []
        self.balances: Dict[str, Fraction] = {}
        self.contract = None
        self.contract_address = "contract"

    # -- clock

    def time(self) -> int:
        return self._period

    def advance_period(self) -> int:
        self._period += 1
        return self._period

    # -- balances

    def mint(self, address: str, amount) -> None:
        """Create supply out of thin air (scenario setup only)."""
        amount = Fraction(amount)
        if amount < 0:
            raise LedgerError("cannot mint a negative amount")
        self.balances[address] = self.balances.get(address, Fraction(0)) + amount

    def _move(self, frm: str, to: str, amount: Fraction) -> None:
        amount = Fraction(amount)
        if amount < 0:
            raise LedgerError("negative transfer")
        if self.balances.get(frm, Fraction(0)) < amount:
            raise HandlerRevert(f"insufficient balance at {frm}")
        self.balances[frm] = self.balances.get(frm, Fraction(0)) - amount
        self.balances[to] = self.balances.get(to, Fraction(0)) + amount

    def transfer(self, frm: str, to: str, amount) -> bool:
        """Plain value transfer; False (and no change) when underfunded."""
        try:
            self._move(frm, to, amount)
            return True
        except HandlerRevert:
            return False

    def total_supply(self) -> Fraction:
        return sum(self.balances.values(), Fraction(0))

    # -- contract dispatch

    def register_contract(self, contract, address: str = "contract") -> None:
        if self.contract is not None:
            raise LedgerError("a contract is already registered")
        self.contract = contract
        self.contract_address = address
        self.balances.setdefault(address, Fraction(0))

    def submit(self, caller: str, method: str, **params) -> Receipt:
        if self.contract is None:
            raise LedgerError("no contract registered")
        env = Env(self, caller, self.contract_address)
        calldata = self.contract.encode_calldata(method, params)
        snapshot_state = copy.deepcopy(self.contract.state)
        snapshot_balances = dict(self.balances)
        status = TxStatus.OK
        error = None
        result = None
        try:
            result = self.contract.handle(env, method, params)
        except HandlerRevert as exc:
            self.contract.state = snapshot_state
            self.balances = snapshot_balances
            status = TxStatus.REVERTED
            error = str(exc)
            env.events.clear()
        gas = (
            self.schedule.base_tx
            + len(calldata) * self.schedule.per_calldata_byte
            + env.meter.total()
        )
        receipt = Receipt(
            tx_id=len(self.receipts),
            caller=caller,
            method=method,
            period=self._period,
            status=status,
            gas_used=gas,
            calldata_bytes=len(calldata),
            events=tuple(env.events),
            error=error,
            result=result,
        )
        self.receipts.append(receipt)
        return receipt


RECEIPT_CSV_HEADER = "tx_id,caller,method,period,status,gas_used,calldata_bytes,events"


def receipt_csv_rows(receipts) -> List[str]:
    rows = [RECEIPT_CSV_HEADER]
    for r in receipts:
        events = ";".join(
            e.kind + "(" + ",".join(f"{k}={v}" for k, v in e.data) + ")" for e in r.events
        )
        rows.append(
            f"{r.tx_id},{r.caller},{r.method},{r.period},{r.status.value},"
            f"{r.gas_used},{r.calldata_bytes},{events}"
        )
    return rows
