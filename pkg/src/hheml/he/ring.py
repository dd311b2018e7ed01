"""Arithmetic in Z[X]/(X^n + 1), optionally reduced mod q.

Polynomials are tuples/lists of Python ints, lowest degree first.  Products
use Kronecker substitution: both operands are packed into one big integer
with fixed-width slots, multiplied once (GMP when available), then unpacked
and folded with the negacyclic sign.  ``negacyclic_mul_schoolbook`` is the
O(n^2) reference.
"""

from __future__ import annotations

from functools import lru_cache

try:
    from gmpy2 import mpz as _big
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    _big = int


def center(a, q: int) -> list[int]:
    """Representatives in (-q/2, q/2]."""
    half = q // 2
    return [x - q if x > half else x for x in (v % q for v in a)]


def reduce(a, q: int) -> list[int]:
    return [x % q for x in a]


def poly_add(a, b, q: int) -> list[int]:
    return [(x + y) % q for x, y in zip(a, b)]


def poly_sub(a, b, q: int) -> list[int]:
    return [(x - y) % q for x, y in zip(a, b)]


def poly_neg(a, q: int) -> list[int]:
    return [-x % q for x in a]


def poly_scale(a, k: int, q: int) -> list[int]:
    return [x * k % q for x in a]


def negacyclic_mul_schoolbook(a, b, q: int | None = None) -> list[int]:
    n = len(a)
    if len(b) != n:
        raise ValueError("operands must have the same degree bound")
    acc = [0] * n
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            k = i + j
            if k < n:
                acc[k] += x * y
            else:
                acc[k - n] -= x * y
    return acc if q is None else [v % q for v in acc]


# -- Kronecker substitution ----------------------------------------------------


def slot_bits(bound: int) -> int:
    """Slot width (multiple of 8) holding any signed value of magnitude <= bound."""
    return (bound.bit_length() + 1 + 7) // 8 * 8 + 8


def pack(a, bits: int):
    width = bits // 8
    pos = b"".join((x if x > 0 else 0).to_bytes(width, "little") for x in a)
    neg = b"".join((-x if x < 0 else 0).to_bytes(width, "little") for x in a)
    return _big(int.from_bytes(pos, "little")) - _big(int.from_bytes(neg, "little"))


@lru_cache(maxsize=64)
def _offset(slots: int, bits: int):
    return _big(int.from_bytes((1 << (bits - 1)).to_bytes(bits // 8, "little") * slots, "little"))


def unpack_negacyclic(value, n: int, bits: int) -> list[int]:
    """Split a packed product of two n-slot operands and fold X^n = -1."""
    width = bits // 8
    half = 1 << (bits - 1)
    raw = int(value + _offset(2 * n, bits)).to_bytes(2 * n * width, "little")
    coeffs = [int.from_bytes(raw[i:i + width], "little") - half for i in range(0, 2 * n * width, width)]
    return [coeffs[i] - coeffs[i + n] for i in range(n)]


def max_abs(a) -> int:
    return max((abs(x) for x in a), default=0)


def negacyclic_mul(a, b, q: int | None = None) -> list[int]:
    """Product in Z[X]/(X^n+1); reduced mod ``q`` when given."""
    n = len(a)
    if len(b) != n:
        raise ValueError("operands must have the same degree bound")
    bits = slot_bits(max(max_abs(a) * max_abs(b) * n, 1))
    out = unpack_negacyclic(pack(a, bits) * pack(b, bits), n, bits)
    return out if q is None else [v % q for v in out]
