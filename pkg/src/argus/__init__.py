"""Argus anti-piracy protocol simulator.

Subpackages cover the protocol stack bottom-up: group arithmetic and
signatures, the Sybil-proof reward schedule, multi-period commitments,
Merkle identity trees, toy watermarking, the 1-of-N transfer with
constant-size appeals, PIR-assisted delivery, a gas-metered ledger
simulator, the on-ledger contract, and the actor/scenario harness.
"""

from .group import get_group

__all__ = ["get_group"]
__version__ = "0.1.0"
