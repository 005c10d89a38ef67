"""Prime-order cyclic group backends.

Two interchangeable backends sit behind one interface:

* ``tiny``   -- the additive group Z_q for a small prime q (default 101).
  Discrete logs are trivial, which is exactly what the brute-force test
  oracles need.
* ``secure`` -- secp256k1, a standard prime-order elliptic-curve group at
  the ~128-bit level.

Points are wrapped in :class:`Point` so protocol code reads like the
algebra it implements: ``R = P[l] - r * G``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass


class GroupError(Exception):
    pass


class DecodeError(GroupError):
    """Raised when a byte string is not a valid point encoding."""


@dataclass(frozen=True)
class Point:
    """Element of a cyclic group, tied to its backend."""

    group: "Group"
    raw: object

    def __add__(self, other: "Point") -> "Point":
        self._check(other)
        return Point(self.group, self.group.raw_add(self.raw, other.raw))

    def __sub__(self, other: "Point") -> "Point":
        self._check(other)
        return Point(self.group, self.group.raw_sub(self.raw, other.raw))

    def __rmul__(self, k: int) -> "Point":
        if not isinstance(k, int):
            return NotImplemented
        return Point(self.group, self.group.raw_mul(k % self.group.order, self.raw))

    def __neg__(self) -> "Point":
        return Point(self.group, self.group.raw_neg(self.raw))

    def encode(self) -> bytes:
        return self.group.raw_encode(self.raw)

    def is_identity(self) -> bool:
        return self.raw == self.group.raw_identity()

    def _check(self, other: "Point") -> None:
        if self.group is not other.group:
            raise GroupError("points from different group backends")

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Point({self.group.name}, {self.encode().hex()})"


class Group:
    """Backend interface. Subclasses implement the raw_* primitives."""

    name: str
    order: int
    scalar_bytes: int
    point_bytes: int

    # -- wrapped API ------------------------------------------------------

    @property
    def generator(self) -> Point:
        return Point(self, self.raw_generator())

    def identity(self) -> Point:
        return Point(self, self.raw_identity())

    def base_mul(self, k: int) -> Point:
        return Point(self, self.raw_mul(k % self.order, self.raw_generator()))

    def decode(self, data: bytes) -> Point:
        return Point(self, self.raw_decode(data))

    def rand_scalar(self, rng: random.Random) -> int:
        """Nonzero scalar, for keys."""
        return rng.randrange(1, self.order)

    def rand_field(self, rng: random.Random) -> int:
        """Uniform over the whole field, zero included. Blinding values
        must use this: excluding zero would skew R = P_l - r*G away from
        P_l and make the evidence distribution depend on the choice."""
        return rng.randrange(0, self.order)

    def rand_point(self, rng: random.Random) -> Point:
        # Uniform over the whole group: the group is cyclic of prime order.
        return self.base_mul(rng.randrange(0, self.order))

    def scalar_encode(self, k: int) -> bytes:
        return (k % self.order).to_bytes(self.scalar_bytes, "big")

    def scalar_decode(self, data: bytes) -> int:
        if len(data) != self.scalar_bytes:
            raise DecodeError(f"scalar must be {self.scalar_bytes} bytes")
        value = int.from_bytes(data, "big")
        if value >= self.order:
            raise DecodeError("scalar out of range")
        return value

    def dlog(self, point: Point) -> int:
        """Discrete log base G. Only the tiny backend supports this."""
        raise NotImplementedError(f"{self.name} backend does not expose discrete logs")

    # -- raw primitives ---------------------------------------------------

    def raw_generator(self):
        raise NotImplementedError

    def raw_identity(self):
        raise NotImplementedError

    def raw_add(self, a, b):
        raise NotImplementedError

    def raw_neg(self, a):
        raise NotImplementedError

    def raw_sub(self, a, b):
        return self.raw_add(a, self.raw_neg(b))

    def raw_mul(self, k: int, a):
        raise NotImplementedError

    def raw_encode(self, a) -> bytes:
        raise NotImplementedError

    def raw_decode(self, data: bytes):
        raise NotImplementedError


class TinyGroup(Group):
    """Additive group Z_q for a small prime q. G = 1, k*G = k mod q.

    Security-free by design: ``dlog`` is the identity map, so tests can
    play the adversary with a discrete-log oracle.
    """

    def __init__(self, q: int = 101):
        if q < 3 or any(q % d == 0 for d in range(2, int(q**0.5) + 1)):
            raise GroupError("tiny group modulus must be a small odd prime")
        self.name = f"tiny-{q}"
        self.order = q
        self.scalar_bytes = 4
        self.point_bytes = 4

    def raw_generator(self):
        return 1

    def raw_identity(self):
        return 0

    def raw_add(self, a, b):
        return (a + b) % self.order

    def raw_neg(self, a):
        return (-a) % self.order

    def raw_mul(self, k, a):
        return (k * a) % self.order

    def raw_encode(self, a):
        return a.to_bytes(4, "big")

    def raw_decode(self, data):
        if len(data) != 4:
            raise DecodeError("tiny point must be 4 bytes")
        value = int.from_bytes(data, "big")
        if value >= self.order:
            raise DecodeError("tiny point out of range")
        return value

    def dlog(self, point: Point) -> int:
        return point.raw


# secp256k1 parameters
_P = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEFFFFFC2F
_N = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141
_GX = 0x79BE667EF9DCBBAC55A06295CE870B07029BFCDB2DCE28D959F2815B16F81798
_GY = 0x483ADA7726A3C4655DA4FBFC0E1108A8FD17B448A68554199C47D08FFB10D4B8


def _jac_double(x, y, z):
    if y == 0 or z == 0:
        return (0, 1, 0)
    ysq = y * y % _P
    s = 4 * x * ysq % _P
    m = 3 * x * x % _P
    nx = (m * m - 2 * s) % _P
    ny = (m * (s - nx) - 8 * ysq * ysq) % _P
    nz = 2 * y * z % _P
    return (nx, ny, nz)


def _jac_add(x1, y1, z1, x2, y2, z2):
    z1sq = z1 * z1 % _P
    z2sq = z2 * z2 % _P
    u1 = x1 * z2sq % _P
    u2 = x2 * z1sq % _P
    s1 = y1 * z2sq * z2 % _P
    s2 = y2 * z1sq * z1 % _P
    if u1 == u2:
        if s1 != s2:
            return (0, 1, 0)
        return _jac_double(x1, y1, z1)
    h = (u2 - u1) % _P
    r = (s2 - s1) % _P
    hsq = h * h % _P
    hcu = hsq * h % _P
    nx = (r * r - hcu - 2 * u1 * hsq) % _P
    ny = (r * (u1 * hsq - nx) - s1 * hcu) % _P
    nz = h * z1 * z2 % _P
    return (nx, ny, nz)


class SecpGroup(Group):
    """secp256k1 with affine arithmetic. Plenty fast at desk scale."""

    def __init__(self):
        self.name = "secp256k1"
        self.order = _N
        self.scalar_bytes = 32
        self.point_bytes = 33  # compressed SEC encoding

    def raw_generator(self):
        return (_GX, _GY)

    def raw_identity(self):
        return None

    def raw_add(self, a, b):
        if a is None:
            return b
        if b is None:
            return a
        x1, y1 = a
        x2, y2 = b
        if x1 == x2:
            if (y1 + y2) % _P == 0:
                return None
            # point doubling
            lam = (3 * x1 * x1) * pow(2 * y1, -1, _P) % _P
        else:
            lam = (y2 - y1) * pow(x2 - x1, -1, _P) % _P
        x3 = (lam * lam - x1 - x2) % _P
        y3 = (lam * (x1 - x3) - y1) % _P
        return (x3, y3)

    def raw_neg(self, a):
        if a is None:
            return None
        x, y = a
        return (x, (-y) % _P)

    def raw_mul(self, k, a):
        # Jacobian double-and-add: one field inversion total.
        if a is None or k == 0:
            return None
        rx, ry, rz = None, None, 0  # identity
        ax, ay, az = a[0], a[1], 1
        while k:
            if k & 1:
                if rz == 0:
                    rx, ry, rz = ax, ay, az
                else:
                    rx, ry, rz = _jac_add(rx, ry, rz, ax, ay, az)
            ax, ay, az = _jac_double(ax, ay, az)
            k >>= 1
        if rz == 0:
            return None
        z_inv = pow(rz, -1, _P)
        z2 = z_inv * z_inv % _P
        return (rx * z2 % _P, ry * z2 * z_inv % _P)

    def raw_encode(self, a):
        if a is None:
            return b"\x00" * 33
        x, y = a
        return bytes([2 + (y & 1)]) + x.to_bytes(32, "big")

    def raw_decode(self, data):
        if len(data) != 33:
            raise DecodeError("secp256k1 point must be 33 bytes")
        if data == b"\x00" * 33:
            return None
        prefix = data[0]
        if prefix not in (2, 3):
            raise DecodeError("bad point prefix")
        x = int.from_bytes(data[1:], "big")
        if x >= _P:
            raise DecodeError("x out of field range")
        y_sq = (pow(x, 3, _P) + 7) % _P
        y = pow(y_sq, (_P + 1) // 4, _P)
        if y * y % _P != y_sq:
            raise DecodeError("x not on curve")
        if (y & 1) != (prefix & 1):
            y = _P - y
        return (x, y)


_BACKENDS = {}


def get_group(name: str = "tiny") -> Group:
    """Return a shared backend instance: 'tiny' or 'secure'."""
    if name not in _BACKENDS:
        if name == "tiny":
            _BACKENDS[name] = TinyGroup()
        elif name == "secure":
            _BACKENDS[name] = SecpGroup()
        else:
            raise GroupError(f"unknown group backend {name!r}")
    return _BACKENDS[name]
