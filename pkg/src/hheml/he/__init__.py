"""Leveled HE with two interchangeable backends: ``transparent`` and ``bfv-toy``.

The contract is the same for both; pick one through ``HeParams.kind``.
"""

from __future__ import annotations

from . import bfv, transparent
from .base import (
    BFV_TOY,
    KINDS,
    TRANSPARENT,
    BadParams,
    HeCiphertext,
    HeError,
    HeParams,
    HePublicMaterial,
    HeSecretKey,
    NoiseOverflow,
    NoiseReport,
    ParamsMismatch,
    deep_params,
    default_params,
)

_BACKENDS = {TRANSPARENT: transparent, BFV_TOY: bfv}
_EVALUATORS = {TRANSPARENT: transparent.TransparentEvaluator, BFV_TOY: bfv.BfvEvaluator}


def _backend(params: HeParams):
    return _BACKENDS[params.kind]


def he_keygen(params: HeParams, rng_seed) -> tuple[HeSecretKey, HePublicMaterial]:
    """Deterministic under ``rng_seed``; bfv-toy also produces the relinearization key."""
    return _backend(params).keygen(params, rng_seed)


def he_encrypt(pub: HePublicMaterial, m: int, rng=None) -> HeCiphertext:
    return _backend(pub.params).encrypt(pub, m, rng)


def he_decrypt(sk: HeSecretKey, ct: HeCiphertext) -> int:
    return _backend(sk.params).decrypt(sk, ct)


def he_noise_budget(sk: HeSecretKey, ct: HeCiphertext) -> NoiseReport:
    """Exact remaining budget; needs the secret key, so test/diagnostic use only."""
    return _backend(sk.params).noise_budget(sk, ct)


def make_evaluator(pub: HePublicMaterial):
    return _EVALUATORS[pub.params.kind](pub)


__all__ = [
    "BFV_TOY",
    "KINDS",
    "TRANSPARENT",
    "BadParams",
    "HeCiphertext",
    "HeError",
    "HeParams",
    "HePublicMaterial",
    "HeSecretKey",
    "NoiseOverflow",
    "NoiseReport",
    "ParamsMismatch",
    "deep_params",
    "default_params",
    "he_decrypt",
    "he_encrypt",
    "he_keygen",
    "he_noise_budget",
    "make_evaluator",
]
