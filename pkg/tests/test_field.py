import hashlib

import pytest
from hypothesis import given, strategies as st

from hheml.field import (
    MAX_REDRAWS,
    FieldError,
    PrimeModulus,
    SamplingStall,
    ZeroInverse,
    fe_add,
    fe_inv,
    fe_mul,
    fe_neg,
    fe_pow,
    fe_sub,
    is_prime_u32,
    sample_field_element,
)
from hheml.xof import XofStream

PRIMES = [5, 17, 257, 65537, 4294967291]


def _naive_prime(n):
    return n > 1 and all(n % d for d in range(2, int(n**0.5) + 1))


def test_is_prime_matches_trial_division():
    for n in range(5000):
        assert is_prime_u32(n) == _naive_prime(n), n
    assert is_prime_u32(4294967291)
    assert not is_prime_u32(4294967295)


def test_modulus_validation():
    # smallest k with p <= 2**k
    assert PrimeModulus(65537).mask_bits == 17
    assert PrimeModulus(5).mask_bits == 3
    assert PrimeModulus(17).mask_bits == 5
    for bad in (3, 2, 1, 65536, 2**32 + 15):
        with pytest.raises(FieldError):
            PrimeModulus(bad)


def test_small_examples():
    assert fe_add(65536, 1, 65537) == 0
    assert fe_mul(2, 32769, 65537) == 1
    assert fe_inv(2, 65537) == 32769
    assert fe_neg(0, 17) == 0
    assert fe_sub(0, 1, 5) == 4
    assert fe_pow(3, 0, 17) == 1
    with pytest.raises(ZeroInverse):
        fe_inv(0, 65537)
    with pytest.raises(ZeroDivisionError):
        fe_inv(257, 257)


@given(st.sampled_from(PRIMES), st.integers(0, 2**32), st.integers(0, 2**32), st.integers(0, 2**32))
def test_field_axioms(p, a, b, c):
    a, b, c = a % p, b % p, c % p
    assert fe_add(a, b, p) == fe_add(b, a, p)
    assert fe_mul(a, fe_add(b, c, p), p) == fe_add(fe_mul(a, b, p), fe_mul(a, c, p), p)
    assert fe_add(a, fe_neg(a, p), p) == 0
    assert fe_sub(fe_add(a, b, p), b, p) == a
    if a:
        assert fe_mul(a, fe_inv(a, p), p) == 1


@given(st.sampled_from(PRIMES), st.integers(0, 2**32), st.integers(0, 300))
def test_pow_matches_builtin(p, a, e):
    assert fe_pow(a % p, e, p) == pow(a, e, p)


def test_fermat_exhaustive_small():
    for p in (5, 17, 257):
        for a in range(1, p):
            assert fe_pow(a, p - 1, p) == 1


def _stream(seed=b"x"):
    return XofStream(seed)


def test_sampler_follows_mask_and_reject():
    # replay the sampler by hand from the same SHAKE output
    p = 17
    raw = hashlib.shake_128(b"x").digest(4 * 200)
    expected = []
    for i in range(200):
        v = int.from_bytes(raw[4 * i:4 * i + 4], "little") & 0x1F
        if v < p:
            expected.append(v)
    s = _stream()
    got = [sample_field_element(s, p) for _ in range(len(expected))]
    assert got == expected


def test_sampler_range_and_coverage():
    s = _stream(b"cover")
    seen = {sample_field_element(s, 5) for _ in range(500)}
    assert seen == set(range(5))


class _ConstStream:
    def __init__(self, word):
        self.word = word

    def squeeze_bytes(self, n):
        return self.word.to_bytes(4, "little") * (n // 4)


def test_sampler_stalls_after_bounded_redraws():
    # 0x1f masked for p = 17 is always rejected
    with pytest.raises(SamplingStall):
        sample_field_element(_ConstStream(0xFFFFFFFF), 17)
    assert MAX_REDRAWS == 1000


class _ScriptedStream:
    def __init__(self, data):
        self.data = data

    def squeeze_bytes(self, n):
        out, self.data = self.data[:n], self.data[n:]
        return out


def test_sampler_hand_trace_rejects_then_accepts():
    # 0xFFFFFFFF masks to 0x1FFFF = 131071 >= 65537, so the next word decides
    s = _ScriptedStream(bytes.fromhex("ffffffff02000000"))
    assert sample_field_element(s, 65537) == 2
    assert s.data == b""
