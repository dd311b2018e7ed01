"""Toy BFV over R_q = Z_q[X]/(X^n + 1) with scalar (constant coefficient) encoding.

Insecure by construction: parameters are chosen so that the Pasta
transciphering circuit decrypts correctly, nothing more.
"""

from __future__ import annotations

import math
import random

from . import ring
from .base import (
    HeCiphertext,
    HeParams,
    HePublicMaterial,
    HeSecretKey,
    NoiseOverflow,
    NoiseReport,
    ParamsMismatch,
    check_same,
)


def _ternary(rng: random.Random, n: int) -> list[int]:
    return [rng.randrange(3) - 1 for _ in range(n)]


def _error(rng: random.Random, params: HeParams) -> list[int]:
    # rounded Gaussian, clipped to +-6 sigma
    bound, sigma = params.error_bound, params.error_stddev
    return [max(-bound, min(bound, round(rng.gauss(0.0, sigma)))) for _ in range(params.n)]


def _uniform(rng: random.Random, params: HeParams) -> list[int]:
    return [rng.randrange(params.q) for _ in range(params.n)]


def keygen(params: HeParams, seed) -> tuple[HeSecretKey, HePublicMaterial]:
    rng = random.Random(seed)
    q, n = params.q, params.n
    s = _ternary(rng, n)
    a = _uniform(rng, params)
    e = _error(rng, params)
    b = ring.poly_neg(ring.poly_add(ring.negacyclic_mul(a, s, q), e, q), q)
    s2 = ring.negacyclic_mul(s, s, q)
    relin = []
    w_i = 1
    for _ in range(params.decomp_len):
        a_i = _uniform(rng, params)
        e_i = _error(rng, params)
        mask = ring.poly_add(ring.negacyclic_mul(a_i, s, q), e_i, q)
        b_i = ring.poly_sub(ring.poly_scale(s2, w_i, q), mask, q)
        relin.append((tuple(b_i), tuple(a_i)))
        w_i *= params.decomp_base
    sk = HeSecretKey(params, tuple(s))
    pub = HePublicMaterial(params, tuple(b), tuple(a), tuple(relin))
    return sk, pub


def encrypt(pub: HePublicMaterial, m: int, rng: random.Random | None = None) -> HeCiphertext:
    params = pub.params
    if not 0 <= m < params.plaintext_modulus:
        raise ValueError(f"plaintext {m} not reduced mod {params.plaintext_modulus}")
    rng = rng or random.Random()
    q = params.q
    u = _ternary(rng, params.n)
    c0 = ring.poly_add(ring.negacyclic_mul(pub.b, u, q), _error(rng, params), q)
    c0[0] = (c0[0] + params.delta * m) % q
    c1 = ring.poly_add(ring.negacyclic_mul(pub.a, u, q), _error(rng, params), q)
    return HeCiphertext((tuple(c0), tuple(c1)), 0, params)


def _phase(sk: HeSecretKey, ct: HeCiphertext) -> list[int]:
    if ct.params != sk.params:
        raise ParamsMismatch("ciphertext and key parameters differ")
    q = ct.params.q
    c0, c1 = ct.parts
    return ring.center(ring.poly_add(c0, ring.negacyclic_mul(c1, sk.s, q), q), q)


def _round_scaled(x: int, p: int, q: int) -> int:
    return (p * x + q // 2) // q


def decrypt(sk: HeSecretKey, ct: HeCiphertext) -> int:
    """Round (p/q)(c0 + c1*s); any nonzero higher coefficient means the noise overflowed."""
    p, q = ct.params.plaintext_modulus, ct.params.q
    coeffs = [_round_scaled(x, p, q) % p for x in _phase(sk, ct)]
    if any(coeffs[1:]):
        raise NoiseOverflow("noise exceeded the decryption bound")
    return coeffs[0]


def noise_budget(sk: HeSecretKey, ct: HeCiphertext) -> NoiseReport:
    params = ct.params
    p, q = params.plaintext_modulus, params.q
    phase = _phase(sk, ct)
    m = _round_scaled(phase[0], p, q) % p
    phase[0] -= params.delta * m
    noise = ring.max_abs(ring.center(phase, q))
    budget = math.log2(q / (2 * p)) - math.log2(max(noise, 1))
    return NoiseReport(ct.depth, budget)


class BfvEvaluator:
    """Homomorphic operations; holds the public relinearization key."""

    def __init__(self, pub: HePublicMaterial):
        self.pub = pub
        self.params = params = pub.params
        n, q, w = params.n, params.q, params.decomp_base
        # one slot width covers the relin sum: L terms of (digit < w) * (coeff < q) * n
        self._relin_bits = ring.slot_bits(len(pub.relin) * w * q * n)
        self._relin_packed = [
            (ring.pack(rb, self._relin_bits), ring.pack(ra, self._relin_bits))
            for rb, ra in pub.relin
        ]

    def _check(self, *cts):
        params = check_same(*cts)
        if params != self.params:
            raise ParamsMismatch("ciphertext parameters differ from the evaluator's")

    def add(self, x: HeCiphertext, y: HeCiphertext) -> HeCiphertext:
        self._check(x, y)
        q = self.params.q
        parts = tuple(tuple(ring.poly_add(a, b, q)) for a, b in zip(x.parts, y.parts))
        return HeCiphertext(parts, max(x.depth, y.depth), self.params)

    def sub(self, x: HeCiphertext, y: HeCiphertext) -> HeCiphertext:
        self._check(x, y)
        q = self.params.q
        parts = tuple(tuple(ring.poly_sub(a, b, q)) for a, b in zip(x.parts, y.parts))
        return HeCiphertext(parts, max(x.depth, y.depth), self.params)

    def neg(self, x: HeCiphertext) -> HeCiphertext:
        self._check(x)
        q = self.params.q
        return HeCiphertext(tuple(tuple(ring.poly_neg(a, q)) for a in x.parts), x.depth, self.params)

    def add_plain(self, x: HeCiphertext, k: int) -> HeCiphertext:
        self._check(x)
        params = self.params
        c0 = list(x.parts[0])
        c0[0] = (c0[0] + params.delta * (k % params.plaintext_modulus)) % params.q
        return HeCiphertext((tuple(c0),) + x.parts[1:], x.depth, params)

    def mul_plain(self, x: HeCiphertext, k: int) -> HeCiphertext:
        self._check(x)
        p, q = self.params.plaintext_modulus, self.params.q
        k %= p
        if k > p // 2:
            k -= p  # centred scalar keeps noise growth at |k| <= p/2
        return HeCiphertext(tuple(tuple(ring.poly_scale(a, k, q)) for a in x.parts), x.depth, self.params)

    def linear_combination(self, cts, coeffs, constant: int = 0) -> HeCiphertext:
        """sum(k_j * ct_j) + constant, reducing mod q once at the end."""
        self._check(*cts)
        p, q = self.params.plaintext_modulus, self.params.q
        n = self.params.n
        acc0, acc1 = [0] * n, [0] * n
        for ct, k in zip(cts, coeffs):
            k %= p
            if k > p // 2:
                k -= p
            if k:
                c0, c1 = ct.parts
                acc0 = [a + k * c for a, c in zip(acc0, c0)]
                acc1 = [a + k * c for a, c in zip(acc1, c1)]
        depth = max(ct.depth for ct in cts)
        acc0[0] += self.params.delta * (constant % p)
        return HeCiphertext((tuple(ring.reduce(acc0, q)), tuple(ring.reduce(acc1, q))), depth, self.params)

    def mul(self, x: HeCiphertext, y: HeCiphertext) -> HeCiphertext:
        """Tensor, rescale by p/q with rounding, relinearize back to two parts."""
        self._check(x, y)
        params = self.params
        n, q, p = params.n, params.q, params.plaintext_modulus
        x0, x1 = (ring.center(c, q) for c in x.parts)
        y0, y1 = (ring.center(c, q) for c in y.parts)
        bits = ring.slot_bits(2 * n * (q // 2 + 1) ** 2)
        px0, px1, py0, py1 = (ring.pack(c, bits) for c in (x0, x1, y0, y1))
        d0 = ring.unpack_negacyclic(px0 * py0, n, bits)
        d1 = ring.unpack_negacyclic(px0 * py1 + px1 * py0, n, bits)
        d2 = ring.unpack_negacyclic(px1 * py1, n, bits)
        d0, d1, d2 = ([_round_scaled(v, p, q) % q for v in d] for d in (d0, d1, d2))
        c0, c1 = self._relinearize(d0, d1, d2)
        return HeCiphertext((tuple(c0), tuple(c1)), max(x.depth, y.depth) + 1, params)

    def _relinearize(self, d0, d1, d2):
        params = self.params
        n, q, w = params.n, params.q, params.decomp_base
        shift = w.bit_length() - 1
        bits = self._relin_bits
        acc0 = acc1 = 0
        digits = list(d2)
        for rb, ra in self._relin_packed:
            digit_poly = [v & (w - 1) for v in digits]
            digits = [v >> shift for v in digits]
            packed = ring.pack(digit_poly, bits)
            acc0 += packed * rb
            acc1 += packed * ra
        c0 = ring.poly_add(d0, ring.unpack_negacyclic(acc0, n, bits), q)
        c1 = ring.poly_add(d1, ring.unpack_negacyclic(acc1, n, bits), q)
        return c0, c1
