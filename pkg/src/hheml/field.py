"""Prime-field arithmetic for word-sized primes and XOF-driven sampling.

Field elements are plain Python ints in ``[0, p)``; every operation takes
the modulus explicitly so tiny test fields and the deployment field share
one code path.
"""

from __future__ import annotations

from dataclasses import dataclass

MAX_REDRAWS = 1000


class FieldError(ValueError):
    pass


class ZeroInverse(FieldError, ZeroDivisionError):
    pass


class SamplingStall(FieldError):
    """Raised when rejection sampling keeps failing; the byte source is broken."""


def is_prime_u32(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for every n < 2**32."""
    if n < 2:
        return False
    for small in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % small == 0:
            return n == small
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # bases 2, 7, 61 are a proven witness set below 4,759,123,141
    for a in (2, 7, 61):
        if a % n == 0:
            continue
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimeModulus:
    p: int

    def __post_init__(self):
        p = self.p
        if not isinstance(p, int) or isinstance(p, bool):
            raise FieldError(f"modulus must be an int, got {type(p).__name__}")
        if not 3 < p < 2**32:
            raise FieldError(f"modulus must satisfy 3 < p < 2^32, got {p}")
        if not is_prime_u32(p):
            raise FieldError(f"modulus {p} is not prime")

    @property
    def mask_bits(self) -> int:
        # smallest k with p <= 2^k
        return (self.p - 1).bit_length()

    def __int__(self):
        return self.p

    def __index__(self):
        return self.p


def _mod(p) -> int:
    return p.p if isinstance(p, PrimeModulus) else p


def fe_add(a: int, b: int, p) -> int:
    return (a + b) % _mod(p)


def fe_sub(a: int, b: int, p) -> int:
    return (a - b) % _mod(p)


def fe_neg(a: int, p) -> int:
    return -a % _mod(p)


def fe_mul(a: int, b: int, p) -> int:
    return a * b % _mod(p)


def fe_pow(a: int, e: int, p) -> int:
    """Square-and-multiply exponentiation; ``e`` must be non-negative."""
    if e < 0:
        raise FieldError("negative exponent")
    p = _mod(p)
    result, base = 1 % p, a % p
    while e:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result


def fe_inv(a: int, p) -> int:
    p = _mod(p)
    a %= p
    if a == 0:
        raise ZeroInverse("0 has no multiplicative inverse")
    return fe_pow(a, p - 2, p)


def sample_field_element(stream, p) -> int:
    """Draw one uniform element of F_p from ``stream``.

    Each attempt reads 4 little-endian bytes, keeps the low ``k`` bits
    (``2^(k-1) < p <= 2^k``) and accepts the value if it is below ``p``.
    """
    p = _mod(p)
    mask = (1 << (p - 1).bit_length()) - 1
    for _ in range(MAX_REDRAWS + 1):
        u = int.from_bytes(stream.squeeze_bytes(4), "little") & mask
        if u < p:
            return u
    raise SamplingStall(f"no value below {p} after {MAX_REDRAWS} redraws")

