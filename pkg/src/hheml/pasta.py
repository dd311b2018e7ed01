"""The Pasta stream cipher over F_p with XOF-derived affine layers.

State layout is ``x = x_L || x_R`` with ``t`` words per half.  The core
permutation is

    A_r . S . A_{r-1} . S' . ... . A_1 . S' . A_0

with ``S'`` the Feistel squaring layer and ``S`` the cube layer.  Round
material comes from SHAKE128 seeded with the public (nonce, counter) pair
only, so a server can rebuild it without the key.

Internally vectors are ``uint64`` numpy arrays; public functions accept and
return plain ints.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .field import PrimeModulus, SamplingStall, MAX_REDRAWS
from .xof import ROUND_MATERIAL_TAG, StreamPosition, XofStream, xof_init


class PastaError(ValueError):
    pass


class DimensionMismatch(PastaError):
    pass


class UnreducedWord(PastaError):
    pass


@dataclass(frozen=True)
class PastaParams:
    p: int
    t: int
    r: int
    mix_halves: bool = True

    def __post_init__(self):
        PrimeModulus(self.p)
        if self.t < 1 or self.r < 1:
            raise PastaError(f"need t >= 1 and r >= 1, got t={self.t}, r={self.r}")
        if math.gcd(3, self.p - 1) != 1:
            raise PastaError(f"cube map is not a bijection mod {self.p}")

    @property
    def state_words(self) -> int:
        return 2 * self.t


PROFILES = {
    "pasta4-edge": PastaParams(p=65537, t=17, r=4),
    "pasta3-edge": PastaParams(p=65537, t=17, r=3),
}


def get_profile(name: str) -> PastaParams:
    try:
        return PROFILES[name]
    except KeyError:
        raise PastaError(f"unknown profile {name!r}; known: {', '.join(PROFILES)}") from None


@dataclass(frozen=True)
class PastaSecretKey:
    words: tuple

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(int(w) for w in self.words))

    def check(self, params: PastaParams) -> None:
        if len(self.words) != params.state_words:
            raise DimensionMismatch(
                f"key has {len(self.words)} words, expected {params.state_words}"
            )
        _check_reduced(self.words, params.p)


def generate_key(params: PastaParams, rng: random.Random | None = None) -> PastaSecretKey:
    rng = rng or random.SystemRandom()
    return PastaSecretKey(tuple(rng.randrange(params.p) for _ in range(params.state_words)))


@dataclass(frozen=True)
class PastaState:
    left: tuple
    right: tuple

    def __post_init__(self):
        object.__setattr__(self, "left", tuple(int(w) for w in self.left))
        object.__setattr__(self, "right", tuple(int(w) for w in self.right))
        if len(self.left) != len(self.right):
            raise DimensionMismatch("state halves differ in length")

    @classmethod
    def from_words(cls, words) -> "PastaState":
        words = list(words)
        if len(words) % 2:
            raise DimensionMismatch("state needs an even number of words")
        t = len(words) // 2
        return cls(words[:t], words[t:])

    @property
    def words(self) -> tuple:
        return self.left + self.right


@dataclass(frozen=True, eq=False)
class AffineLayer:
    m_left: np.ndarray
    m_right: np.ndarray
    c_left: np.ndarray
    c_right: np.ndarray

    def __post_init__(self):
        for name in ("m_left", "m_right", "c_left", "c_right"):
            arr = np.array(getattr(self, name), dtype=np.uint64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        t = len(self.c_left)
        if (
            self.m_left.shape != (t, t)
            or self.m_right.shape != (t, t)
            or self.c_right.shape != (t,)
        ):
            raise DimensionMismatch("affine layer blocks have inconsistent shapes")

    @property
    def t(self) -> int:
        return len(self.c_left)

    def __eq__(self, other):
        if not isinstance(other, AffineLayer):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, k), getattr(other, k))
            for k in ("m_left", "m_right", "c_left", "c_right")
        )


@dataclass(frozen=True)
class RoundMaterial:
    layers: tuple = field(default_factory=tuple)


@dataclass(frozen=True)
class SymCiphertext:
    nonce: int
    words: tuple

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(int(w) for w in self.words))

    @property
    def word_count(self) -> int:
        return len(self.words)


# -- vector arithmetic -------------------------------------------------------


def mulmod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Elementwise ``a*b mod p`` for reduced uint64 operands, exact for p < 2^32."""
    if p < 2**31:
        return (a * b) % np.uint64(p)
    pp = np.uint64(p)
    hi = (a * (b >> np.uint64(16))) % pp
    return ((hi << np.uint64(16)) + a * (b & np.uint64(0xFFFF))) % pp


def matvec(m: np.ndarray, x: np.ndarray, p: int) -> np.ndarray:
    return mulmod(m, x[None, :], p).sum(axis=1, dtype=np.uint64) % np.uint64(p)


def invertible_mask(mats: np.ndarray, p: int) -> np.ndarray:
    """Nonsingularity of each matrix in a ``(batch, n, n)`` stack over F_p.

    Gaussian elimination run in lockstep across the batch; each matrix
    pivots on its own first nonzero entry.
    """
    a = np.array(mats, dtype=np.uint64)
    batch, n, _ = a.shape
    if n == 1:
        return a[:, 0, 0] != 0
    pp = np.uint64(p)
    ok = np.ones(batch, dtype=bool)
    rows = np.arange(batch)
    for col in range(n):
        nonzero = a[:, col:, col] != 0
        ok &= nonzero.any(axis=1)
        piv = col + nonzero.argmax(axis=1)
        pivot_rows = a[rows, piv].copy()
        a[rows, piv] = a[:, col]
        a[:, col] = pivot_rows
        if col == n - 1:
            break
        inv = np.array([pow(int(v), p - 2, p) if v else 0 for v in a[:, col, col]], dtype=np.uint64)
        factors = mulmod(a[:, col + 1:, col], inv[:, None], p)
        sub = mulmod(factors[:, :, None], a[:, col:col + 1, col:], p)
        a[:, col + 1:, col:] = (a[:, col + 1:, col:] + pp - sub) % pp
    return ok


def is_invertible(m: np.ndarray, p: int) -> bool:
    return bool(invertible_mask(np.asarray(m)[None], p)[0])


def _sample_array(stream: XofStream, p: int, count: int) -> np.ndarray:
    """Vectorised twin of repeated ``sample_field_element`` calls."""
    mask = np.uint32((1 << (p - 1).bit_length()) - 1)
    out = np.empty(count, dtype=np.uint64)
    filled = 0
    run = 0  # rejections carried over from the previous chunk
    while filled < count:
        need = count - filled
        chunk = stream.peek_bytes(8 * need + 64)
        words = np.frombuffer(chunk, dtype="<u4") & mask
        take = np.flatnonzero(words < p)[:need]
        if take.size == 0:
            run += words.size
            if run > MAX_REDRAWS:
                raise SamplingStall(f"no value below {p} after {MAX_REDRAWS} redraws")
            stream.skip(4 * words.size)
            continue
        gaps = np.diff(take, prepend=-1) - 1
        gaps[0] += run
        if (gaps > MAX_REDRAWS).any():
            raise SamplingStall(f"no value below {p} after {MAX_REDRAWS} redraws")
        run = 0
        out[filled:filled + take.size] = words[take]
        filled += take.size
        stream.skip(4 * (int(take[-1]) + 1))
    return out


def _sample_invertible(stream: XofStream, p: int, t: int) -> np.ndarray:
    while True:
        m = _sample_array(stream, p, t * t).reshape(t, t)
        if is_invertible(m, p):
            return m


# -- cipher ------------------------------------------------------------------


@lru_cache(maxsize=256)
def derive_round_material(params: PastaParams, pos: StreamPosition) -> RoundMaterial:
    """Sample ``r + 1`` affine layers for ``pos``.

    Per layer, in stream order: m_left (row-major), m_right, c_left,
    c_right.  A singular matrix is resampled whole from the continuing
    stream.
    """
    material = _derive_fast(params, pos)
    if material is None:
        material = _derive_buffered(params, pos)
    return material


def _derive_sequential(params: PastaParams, pos: StreamPosition) -> RoundMaterial:
    stream = xof_init(ROUND_MATERIAL_TAG, pos)
    p, t = params.p, params.t
    layers = []
    for _ in range(params.r + 1):
        m_left = _sample_invertible(stream, p, t)
        m_right = _sample_invertible(stream, p, t)
        c_left = _sample_array(stream, p, t)
        c_right = _sample_array(stream, p, t)
        layers.append(AffineLayer(m_left, m_right, c_left, c_right))
    return RoundMaterial(tuple(layers))


class _ElementBuffer:
    """The stream's accepted field elements, drawn in bulk and consumed in order."""

    def __init__(self, stream: XofStream, p: int, size: int):
        self.stream, self.p = stream, p
        self.buf = _sample_array(stream, p, size)
        self.pos = 0

    def take(self, n: int) -> np.ndarray:
        while self.pos + n > len(self.buf):
            more = _sample_array(self.stream, self.p, max(n, len(self.buf)))
            self.buf = np.concatenate([self.buf, more])
        out = self.buf[self.pos:self.pos + n]
        self.pos += n
        return out


def _derive_buffered(params: PastaParams, pos: StreamPosition) -> RoundMaterial:
    # same element order as _derive_sequential, without a stream call per draw
    p, t = params.p, params.t
    tt = t * t
    elems = _ElementBuffer(xof_init(ROUND_MATERIAL_TAG, pos), p, 2 * (params.r + 1) * (tt + t) + 4 * tt)

    def matrix():
        while True:
            m = elems.take(tt).reshape(t, t)
            if is_invertible(m, p):
                return m

    layers = []
    for _ in range(params.r + 1):
        m_left, m_right = matrix(), matrix()
        layers.append(AffineLayer(m_left, m_right, elems.take(t), elems.take(t)))
    return RoundMaterial(tuple(layers))


def _derive_fast(params: PastaParams, pos: StreamPosition) -> RoundMaterial | None:
    # Draws everything assuming no resampling; gives up (returns None) if
    # any matrix is singular, since the stream layout then shifts.
    p, t, r = params.p, params.t, params.r
    tt = t * t
    per_layer = 2 * tt + 2 * t
    flat = _sample_array(xof_init(ROUND_MATERIAL_TAG, pos), p, (r + 1) * per_layer)
    flat = flat.reshape(r + 1, per_layer)
    mats = flat[:, : 2 * tt].reshape(2 * (r + 1), t, t)
    if not invertible_mask(mats, p).all():
        return None
    layers = tuple(
        AffineLayer(mats[2 * j], mats[2 * j + 1], flat[j, 2 * tt:2 * tt + t], flat[j, 2 * tt + t:])
        for j in range(r + 1)
    )
    return RoundMaterial(layers)


def _affine(layer: AffineLayer, x: np.ndarray, p: int, mix: bool) -> np.ndarray:
    t = layer.t
    pp = np.uint64(p)
    yl = (matvec(layer.m_left, x[:t], p) + layer.c_left) % pp
    yr = (matvec(layer.m_right, x[t:], p) + layer.c_right) % pp
    if mix:
        u = (yl + yr) % pp
        yl, yr = (yl + u) % pp, (yr + u) % pp
    return np.concatenate((yl, yr))


def _feistel(x: np.ndarray, p: int) -> np.ndarray:
    out = x.copy()
    out[1:] = (x[1:] + mulmod(x[:-1], x[:-1], p)) % np.uint64(p)
    return out


def _cube(x: np.ndarray, p: int) -> np.ndarray:
    return mulmod(mulmod(x, x, p), x, p)


def _as_vec(state: PastaState, p: int) -> np.ndarray:
    words = state.words
    _check_reduced(words, p)
    return np.array(words, dtype=np.uint64)


def _to_state(x: np.ndarray) -> PastaState:
    return PastaState.from_words(x.tolist())


def affine_apply(layer: AffineLayer, s: PastaState, p: int, mix_halves: bool = True) -> PastaState:
    if len(s.left) != layer.t:
        raise DimensionMismatch(f"state half has {len(s.left)} words, layer expects {layer.t}")
    return _to_state(_affine(layer, _as_vec(s, p), p, mix_halves))


def sbox_feistel(s: PastaState, p: int) -> PastaState:
    return _to_state(_feistel(_as_vec(s, p), p))


def sbox_cube(s: PastaState, p: int) -> PastaState:
    return _to_state(_cube(_as_vec(s, p), p))


def _permute(x: np.ndarray, material: RoundMaterial, params: PastaParams) -> np.ndarray:
    p, mix = params.p, params.mix_halves
    layers = material.layers
    x = _affine(layers[0], x, p, mix)
    for j in range(1, params.r):
        x = _affine(layers[j], _feistel(x, p), p, mix)
    return _affine(layers[params.r], _cube(x, p), p, mix)


def pasta_permutation(key: PastaSecretKey, pos: StreamPosition, params: PastaParams) -> PastaState:
    key.check(params)
    x = np.array(key.words, dtype=np.uint64)
    return _to_state(_permute(x, derive_round_material(params, pos), params))


def keystream_block(key: PastaSecretKey, pos: StreamPosition, params: PastaParams) -> list[int]:
    return list(pasta_permutation(key, pos, params).left)


def _check_reduced(words, p: int) -> None:
    for w in words:
        if not 0 <= w < p:
            raise UnreducedWord(f"word {w} is not reduced mod {p}")


def num_blocks(word_count: int, t: int) -> int:
    return -(-word_count // t)


def _apply_keystream(key, nonce, words, params, sign):
    key.check(params)
    _check_reduced(words, params.p)
    p, t = params.p, params.t
    x0 = np.array(key.words, dtype=np.uint64)
    out = []
    for i in range(num_blocks(len(words), t)):
        material = derive_round_material(params, StreamPosition(nonce, i))
        ks = _permute(x0, material, params)[:t].tolist()
        block = words[i * t:(i + 1) * t]
        out.extend((m + sign * k) % p for m, k in zip(block, ks))
    return out


def encrypt(key: PastaSecretKey, nonce: int, message, params: PastaParams) -> SymCiphertext:
    """Mask each t-word block ``i`` with the keystream at ``(nonce, i)``.

    A short final block uses a prefix of its keystream; there is no padding.
    """
    return SymCiphertext(nonce, _apply_keystream(key, nonce, list(message), params, 1))


def decrypt(key: PastaSecretKey, ct: SymCiphertext, params: PastaParams) -> list[int]:
    return _apply_keystream(key, ct.nonce, list(ct.words), params, -1)


# -- cross-implementation test vectors ---------------------------------------


def format_vector_line(params: PastaParams, pos: StreamPosition, key: PastaSecretKey, ks) -> str:
    head = [params.p, params.t, params.r, pos.nonce, pos.counter, *key.words]
    return " ".join(map(str, head)) + " -> " + " ".join(map(str, ks))


def parse_vector_line(line: str):
    """Inverse of :func:`format_vector_line`; returns (params, pos, key, keystream)."""
    lhs, rhs = line.split("->")
    head = [int(v) for v in lhs.split()]
    params = PastaParams(p=head[0], t=head[1], r=head[2])
    pos = StreamPosition(head[3], head[4])
    key = PastaSecretKey(tuple(head[5:]))
    if len(key.words) != params.state_words:
        raise DimensionMismatch("vector line carries a key of the wrong length")
    return params, pos, key, [int(v) for v in rhs.split()]


def emit_vectors(params: PastaParams, count: int, seed: int) -> list[str]:
    rng = random.Random(seed)
    lines = []
    for _ in range(count):
        key = generate_key(params, rng)
        pos = StreamPosition(rng.getrandbits(64), rng.getrandbits(16))
        lines.append(format_vector_line(params, pos, key, keystream_block(key, pos, params)))
    return lines
