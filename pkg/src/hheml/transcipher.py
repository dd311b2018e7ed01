"""Server-side homomorphic evaluation of Pasta decryption and a linear model.

Everything here works from public material only: the HE evaluator (public
and relinearization keys), the HE-encrypted Pasta key, nonces, and
symmetric ciphertext words.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import List, Sequence

from .he import HeCiphertext, HeParams, HePublicMaterial, he_encrypt
from .pasta import (
    AffineLayer,
    DimensionMismatch,
    PastaParams,
    PastaSecretKey,
    SymCiphertext,
    derive_round_material,
    num_blocks,
)
from .xof import StreamPosition

EncryptedVector = List[HeCiphertext]


@dataclass(frozen=True)
class EncryptedPastaKey:
    words: tuple
    pasta_params: PastaParams
    he_params: HeParams

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(self.words))
        if len(self.words) != self.pasta_params.state_words:
            raise DimensionMismatch(
                f"encrypted key has {len(self.words)} words, expected {self.pasta_params.state_words}"
            )
        if self.he_params.plaintext_modulus != self.pasta_params.p:
            raise DimensionMismatch("HE plaintext modulus must equal the Pasta field prime")


def encrypt_pasta_key(
    pub: HePublicMaterial, key: PastaSecretKey, params: PastaParams, rng: random.Random | None = None
) -> EncryptedPastaKey:
    """Client side: HE-encrypt each Pasta key word for provisioning."""
    key.check(params)
    return EncryptedPastaKey(tuple(he_encrypt(pub, w, rng) for w in key.words), params, pub.params)


def he_affine(ev, layer: AffineLayer, st: Sequence[HeCiphertext], mix_halves: bool = True) -> EncryptedVector:
    """Public affine layer on an encrypted state; plaintext-scalar ops only."""
    t = layer.t
    if len(st) != 2 * t:
        raise DimensionMismatch(f"state has {len(st)} ciphertexts, layer expects {2 * t}")
    left, right = list(st[:t]), list(st[t:])
    y_left = [
        ev.linear_combination(left, row, int(c))
        for row, c in zip(layer.m_left.tolist(), layer.c_left.tolist())
    ]
    y_right = [
        ev.linear_combination(right, row, int(c))
        for row, c in zip(layer.m_right.tolist(), layer.c_right.tolist())
    ]
    if not mix_halves:
        return y_left + y_right
    u = [ev.add(a, b) for a, b in zip(y_left, y_right)]
    return [ev.add(a, b) for a, b in zip(y_left, u)] + [ev.add(b, c) for b, c in zip(y_right, u)]


def he_sbox_feistel(ev, st: Sequence[HeCiphertext]) -> EncryptedVector:
    out = [st[0]]
    for prev, cur in zip(st[:-1], st[1:]):
        out.append(ev.add(cur, ev.mul(prev, prev)))
    return out


def he_sbox_cube(ev, st: Sequence[HeCiphertext]) -> EncryptedVector:
    return [ev.mul(ev.mul(x, x), x) for x in st]


def he_keystream(ev, ek: EncryptedPastaKey, pos: StreamPosition, params: PastaParams) -> EncryptedVector:
    """Encrypted left half of the permutation; depth grows by r + 1."""
    layers = derive_round_material(params, pos).layers
    mix = params.mix_halves
    st = he_affine(ev, layers[0], ek.words, mix)
    for j in range(1, params.r):
        st = he_affine(ev, layers[j], he_sbox_feistel(ev, st), mix)
    st = he_affine(ev, layers[params.r], he_sbox_cube(ev, st), mix)
    return st[: params.t]


def transcipher_block(
    ev, ek: EncryptedPastaKey, pos: StreamPosition, c_block: Sequence[int]
) -> EncryptedVector:
    params = ek.pasta_params
    if len(c_block) > params.t:
        raise DimensionMismatch(f"block has {len(c_block)} words, at most {params.t} allowed")
    ks = he_keystream(ev, ek, pos, params)
    return [ev.add_plain(ev.neg(k), c) for k, c in zip(ks, c_block)]


def transcipher(ev, ek: EncryptedPastaKey, ct: SymCiphertext, blocks: Sequence[int] | None = None) -> EncryptedVector:
    """Transcipher a whole symmetric ciphertext, or just the listed block indices."""
    t = ek.pasta_params.t
    indices = range(num_blocks(ct.word_count, t)) if blocks is None else blocks
    out: EncryptedVector = []
    for i in indices:
        block = ct.words[i * t:(i + 1) * t]
        out.extend(transcipher_block(ev, ek, StreamPosition(ct.nonce, i), block))
    return out


@dataclass(frozen=True)
class LinearModel:
    """Integer linear classifier over F_p: ``scores = W x + b`` (optionally squared)."""

    weights: tuple
    bias: tuple
    square: bool = False

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(tuple(int(v) for v in row) for row in self.weights))
        object.__setattr__(self, "bias", tuple(int(v) for v in self.bias))
        if len(self.weights) != len(self.bias):
            raise DimensionMismatch("one bias per class required")
        if len({len(row) for row in self.weights}) > 1:
            raise DimensionMismatch("weight rows differ in length")

    @property
    def n_features(self) -> int:
        return len(self.weights[0]) if self.weights else 0

    @property
    def n_classes(self) -> int:
        return len(self.bias)

    def to_json(self) -> dict:
        return {"weights": [list(r) for r in self.weights], "bias": list(self.bias), "square": self.square}

    @classmethod
    def from_json(cls, obj: dict) -> "LinearModel":
        return cls(obj["weights"], obj["bias"], bool(obj.get("square", False)))


def demo_model(p: int, n_features: int = 784, n_classes: int = 10, seed: int = 0, square: bool = False) -> LinearModel:
    rng = random.Random(seed)
    weights = [[rng.randrange(p) for _ in range(n_features)] for _ in range(n_classes)]
    return LinearModel(weights, [rng.randrange(p) for _ in range(n_classes)], square)


def he_linear_model(
    ev, features: Sequence[HeCiphertext], weights, bias, square: bool = False
) -> EncryptedVector:
    if len(weights) != len(bias) or any(len(row) != len(features) for row in weights):
        raise DimensionMismatch(
            f"model expects {len(weights[0]) if weights else 0} features, got {len(features)}"
        )
    scores = [ev.linear_combination(list(features), row, b) for row, b in zip(weights, bias)]
    if square:
        scores = [ev.mul(s, s) for s in scores]
    return scores


def plain_linear_model(features: Sequence[int], weights, bias, p: int, square: bool = False) -> list[int]:
    if any(len(row) != len(features) for row in weights):
        raise DimensionMismatch("feature count does not match the model")
    scores = [(sum(w * x for w, x in zip(row, features)) + b) % p for row, b in zip(weights, bias)]
    if square:
        scores = [s * s % p for s in scores]
    return scores
