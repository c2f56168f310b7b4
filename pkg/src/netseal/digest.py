"""Canonical text form of a centrality table and a pure-Python SHA-1."""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal

from netseal.centrality import CentralityRecord, CentralityTable

PRECISION = 6

_MASK = 0xFFFFFFFF
_H_INIT = (0x67452301, 0xEFCDAB89, 0x98BADCFE, 0x10325476, 0xC3D2E1F0)


class NonFiniteValue(ValueError):
    pass


@dataclass(frozen=True)
class Digest160:
    words: tuple[int, int, int, int, int]

    @property
    def hex(self) -> str:
        return "".join(f"{w:08x}" for w in self.words)

    @classmethod
    def from_hex(cls, text: str) -> Digest160:
        if len(text) != 40 or text != text.lower():
            raise ValueError(f"not a 40-char lowercase hex digest: {text!r}")
        int(text, 16)
        return cls(tuple(int(text[i:i + 8], 16) for i in range(0, 40, 8)))

    def __str__(self) -> str:
        return self.hex


def _rotl(x: int, n: int) -> int:
    return ((x << n) | (x >> (32 - n))) & _MASK


def _pad(message: bytes) -> bytes:
    bit_len = len(message) * 8
    if bit_len >= 1 << 64:
        raise ValueError("message too long for SHA-1")
    # a single 1 bit, zeros up to 448 mod 512, then the 64-bit big-endian length
    zeros = (55 - len(message)) % 64
    return message + b"\x80" + b"\x00" * zeros + struct.pack(">Q", bit_len)


def _compress(h: list[int], block: bytes) -> None:
    w = list(struct.unpack(">16I", block))
    for t in range(16, 80):
        x = w[t - 3] ^ w[t - 8] ^ w[t - 14] ^ w[t - 16]
        w.append(((x << 1) | (x >> 31)) & _MASK)

    a, b, c, d, e = h
    for t in range(80):
        if t < 20:
            f = (b & c) | (~b & d)
            k = 0x5A827999
        elif t < 40:
            f = b ^ c ^ d
            k = 0x6ED9EBA1
        elif t < 60:
            f = (b & c) | (b & d) | (c & d)
            k = 0x8F1BBCDC
        else:
            f = b ^ c ^ d
            k = 0xCA62C1D6
        temp = (((a << 5) | (a >> 27)) + f + e + w[t] + k) & _MASK
        e = d
        d = c
        c = ((b << 30) | (b >> 2)) & _MASK
        b = a
        a = temp

    h[0] = (h[0] + a) & _MASK
    h[1] = (h[1] + b) & _MASK
    h[2] = (h[2] + c) & _MASK
    h[3] = (h[3] + d) & _MASK
    h[4] = (h[4] + e) & _MASK


def sha1(message: bytes) -> Digest160:
    h = list(_H_INIT)
    padded = _pad(bytes(message))
    for i in range(0, len(padded), 64):
        _compress(h, padded[i:i + 64])
    return Digest160(tuple(h))


def format_value(x: float, precision: int = PRECISION) -> str:
    """Fixed-point rendering, round-half-even on the shortest decimal repr."""
    if not math.isfinite(x):
        raise NonFiniteValue(f"cannot serialize {x!r}")
    q = Decimal(repr(float(x))).quantize(Decimal(1).scaleb(-precision), rounding=ROUND_HALF_EVEN)
    if q.is_zero():
        q = abs(q)
    return f"{q:f}"


def serialize_row(r: CentralityRecord, precision: int = PRECISION) -> str:
    return ":".join([str(r.node)] + [format_value(x, precision) for x in r.values()])


def textual_merge(t: CentralityTable, precision: int = PRECISION) -> str:
    rows = sorted(t.records, key=lambda r: r.node)
    if not rows:
        return ""
    return "\n".join(serialize_row(r, precision) for r in rows) + "\n"


def fingerprint(t: CentralityTable) -> Digest160:
    return sha1(textual_merge(t).encode("utf-8"))
