"""Shared types for the leveled HE backends.

Both backends encrypt one field element per ciphertext (constant
coefficient encoding, no batching).  The parameters are sized for
correctness only; they provide no security.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

TRANSPARENT = "transparent"
BFV_TOY = "bfv-toy"
KINDS = (TRANSPARENT, BFV_TOY)


class HeError(ValueError):
    pass


class BadParams(HeError):
    pass


class ParamsMismatch(HeError):
    pass


class NoiseOverflow(HeError):
    pass


def _is_pow2(v: int) -> bool:
    return v > 0 and v & (v - 1) == 0


@dataclass(frozen=True)
class HeParams:
    kind: str
    plaintext_modulus: int
    n: int = 1024
    q: int = 2**180
    decomp_base: int = 2**20
    error_stddev: float = 3.2

    def __post_init__(self):
        if self.kind not in KINDS:
            raise BadParams(f"unknown backend {self.kind!r}")
        if self.plaintext_modulus < 2:
            raise BadParams("plaintext modulus must be at least 2")
        if not _is_pow2(self.n):
            raise BadParams(f"ring degree {self.n} is not a power of two")
        if not _is_pow2(self.decomp_base) or self.decomp_base < 2:
            raise BadParams("decomposition base must be a power of two >= 2")
        if self.q <= self.plaintext_modulus:
            raise BadParams("ciphertext modulus must exceed the plaintext modulus")
        if not self.error_stddev > 0:
            raise BadParams("error stddev must be positive")

    @property
    def delta(self) -> int:
        return self.q // self.plaintext_modulus

    @property
    def decomp_len(self) -> int:
        return -(-(self.q - 1).bit_length() // (self.decomp_base.bit_length() - 1))

    @property
    def error_bound(self) -> int:
        return math.floor(6 * self.error_stddev)


def default_params(kind: str, plaintext_modulus: int, **overrides) -> HeParams:
    return HeParams(kind=kind, plaintext_modulus=plaintext_modulus, **overrides)


def deep_params(kind: str, plaintext_modulus: int) -> HeParams:
    """Wide modulus for the full Pasta-4 circuit at p = 65537, t = 17.

    Each 17-term public affine layer scales the noise by about 2^18, so the
    Pasta-4 circuit needs roughly 260 bits; 2^360 leaves room for the
    linear model and a square activation.
    """
    return HeParams(kind=kind, plaintext_modulus=plaintext_modulus, q=2**360, decomp_base=2**60)


@dataclass(frozen=True)
class HeCiphertext:
    """``parts`` holds the components: (c0, c1) polynomials for bfv-toy,
    a single one-coefficient part for the transparent backend."""

    parts: tuple
    depth: int
    params: HeParams = field(compare=False)


@dataclass(frozen=True)
class HeSecretKey:
    params: HeParams
    s: tuple = ()


@dataclass(frozen=True)
class HePublicMaterial:
    params: HeParams
    b: tuple = ()
    a: tuple = ()
    relin: tuple = ()  # ((b_i, a_i), ...) encrypting decomp_base**i * s^2


@dataclass(frozen=True)
class NoiseReport:
    depth: int
    noise_budget_bits: float


def check_same(*cts: HeCiphertext) -> HeParams:
    params = cts[0].params
    for ct in cts[1:]:
        if ct.params != params:
            raise ParamsMismatch("ciphertexts were produced under different parameters")
    return params
