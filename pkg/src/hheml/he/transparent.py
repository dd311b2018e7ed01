"""Depth-accounting stand-in for a real HE scheme.

Ciphertexts hold the plaintext in the clear.  It exists as a functional
oracle: any circuit must decrypt to the same values here and on bfv-toy.
"""

from __future__ import annotations

import math

from .base import (
    HeCiphertext,
    HeParams,
    HePublicMaterial,
    HeSecretKey,
    NoiseReport,
    ParamsMismatch,
    check_same,
)


def keygen(params: HeParams, seed) -> tuple[HeSecretKey, HePublicMaterial]:
    return HeSecretKey(params), HePublicMaterial(params)


def encrypt(pub: HePublicMaterial, m: int, rng=None) -> HeCiphertext:
    p = pub.params.plaintext_modulus
    if not 0 <= m < p:
        raise ValueError(f"plaintext {m} not reduced mod {p}")
    return HeCiphertext(((m,),), 0, pub.params)


def _value(ct: HeCiphertext) -> int:
    return ct.parts[0][0]


def decrypt(sk: HeSecretKey, ct: HeCiphertext) -> int:
    if ct.params != sk.params:
        raise ParamsMismatch("ciphertext and key parameters differ")
    return _value(ct)


def noise_budget(sk: HeSecretKey, ct: HeCiphertext) -> NoiseReport:
    return NoiseReport(ct.depth, math.inf)


class TransparentEvaluator:
    def __init__(self, pub: HePublicMaterial):
        self.pub = pub
        self.params = pub.params
        self._p = pub.params.plaintext_modulus

    def _check(self, *cts):
        if check_same(*cts) != self.params:
            raise ParamsMismatch("ciphertext parameters differ from the evaluator's")

    def _ct(self, value: int, depth: int) -> HeCiphertext:
        return HeCiphertext(((value % self._p,),), depth, self.params)

    def add(self, x, y):
        self._check(x, y)
        return self._ct(_value(x) + _value(y), max(x.depth, y.depth))

    def sub(self, x, y):
        self._check(x, y)
        return self._ct(_value(x) - _value(y), max(x.depth, y.depth))

    def neg(self, x):
        self._check(x)
        return self._ct(-_value(x), x.depth)

    def add_plain(self, x, k):
        self._check(x)
        return self._ct(_value(x) + k, x.depth)

    def mul_plain(self, x, k):
        self._check(x)
        return self._ct(_value(x) * k, x.depth)

    def linear_combination(self, cts, coeffs, constant=0):
        self._check(*cts)
        total = sum(_value(ct) * k for ct, k in zip(cts, coeffs)) + constant
        return self._ct(total, max(ct.depth for ct in cts))

    def mul(self, x, y):
        self._check(x, y)
        return self._ct(_value(x) * _value(y), max(x.depth, y.depth) + 1)
