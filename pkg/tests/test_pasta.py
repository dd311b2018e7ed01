import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hheml import pasta
from hheml.field import PrimeModulus
from hheml.pasta import (
    AffineLayer,
    DimensionMismatch,
    PastaError,
    PastaParams,
    PastaSecretKey,
    PastaState,
    SymCiphertext,
    UnreducedWord,
    affine_apply,
    decrypt,
    derive_round_material,
    encrypt,
    keystream_block,
    num_blocks,
    pasta_permutation,
    sbox_cube,
    sbox_feistel,
)
from hheml.xof import StreamPosition
from oracles import det_mod_p, pasta_keystream_reference

P4 = pasta.get_profile("pasta4-edge")
P3 = pasta.get_profile("pasta3-edge")

# frozen from the straight-line oracle in tests/oracles.py, key = 0..33, pos = (1, 2)
PASTA4_KS = [16303, 32925, 32842, 34861, 27636, 35030, 48631, 56734, 64222, 33430, 25984,
             43414, 4427, 41752, 16549, 57990, 44934]
PASTA3_KS = [40086, 57160, 29855, 63727, 56398, 7172, 27987, 62461, 63557, 15366, 35281,
             8583, 11958, 43384, 43121, 25053, 48322]
PASTA4_NOMIX_KS = [30139, 33640, 35049, 33711, 14460, 51592, 39122, 45040, 53196, 12971, 55147,
                   14755, 47813, 48180, 21926, 56044, 11952]


def test_params_validation():
    assert P4 == PastaParams(65537, 17, 4)
    assert P4.state_words == 34
    with pytest.raises(PastaError):
        PastaParams(7, 1, 3)  # gcd(3, 6) = 3
    with pytest.raises(PastaError):
        PastaParams(17, 0, 3)
    with pytest.raises(PastaError):
        PastaParams(17, 1, 0)
    with pytest.raises(ValueError):
        PastaParams(15, 1, 3)
    with pytest.raises(PastaError):
        pasta.get_profile("pasta9")


def test_frozen_vectors():
    key = PastaSecretKey(range(34))
    pos = StreamPosition(1, 2)
    assert keystream_block(key, pos, P4) == PASTA4_KS
    assert keystream_block(key, pos, P3) == PASTA3_KS
    nomix = PastaParams(65537, 17, 4, mix_halves=False)
    assert keystream_block(key, pos, nomix) == PASTA4_NOMIX_KS


def test_tiny_vector_matches_oracle():
    params = PastaParams(5, 1, 3)
    assert keystream_block(PastaSecretKey((0, 0)), StreamPosition(0, 0), params) == [1]
    assert keystream_block(PastaSecretKey((0, 0)), StreamPosition(0, 0), PastaParams(5, 1, 4)) == [0]


@pytest.mark.parametrize("p,t,r", [(5, 1, 3), (5, 2, 3), (17, 2, 4), (257, 3, 3), (65537, 4, 2), (65537, 17, 4)])
def test_keystream_matches_straight_line_oracle(p, t, r):
    params = PastaParams(p, t, r)
    rng = random.Random(p * 100 + t * 10 + r)
    for _ in range(3):
        key = pasta.generate_key(params, rng)
        pos = StreamPosition(rng.getrandbits(64), rng.randrange(100))
        assert keystream_block(key, pos, params) == pasta_keystream_reference(p, t, r, pos.nonce, pos.counter, list(key.words))


def test_round_material_shape_and_invertibility():
    mat = derive_round_material(P4, StreamPosition(11, 3))
    assert len(mat.layers) == 5
    for layer in mat.layers:
        assert layer.m_left.shape == (17, 17) and layer.m_right.shape == (17, 17)
        assert int(layer.m_left.max()) < 65537 and int(layer.c_right.max()) < 65537
        assert pasta.is_invertible(layer.m_left, 65537) and pasta.is_invertible(layer.m_right, 65537)


def test_round_material_tiny_field_determinants():
    params = PastaParams(5, 2, 3)
    mat = derive_round_material(params, StreamPosition(0, 0))
    assert len(mat.layers) == 4
    for layer in mat.layers:
        for m in (layer.m_left, layer.m_right):
            assert det_mod_p(m.tolist(), 5) != 0


def test_round_material_is_public_and_deterministic():
    pos = StreamPosition(99, 1)
    derive_round_material.cache_clear()
    a = derive_round_material(P3, pos)
    derive_round_material.cache_clear()
    assert derive_round_material(P3, pos) == a
    assert derive_round_material(P3, StreamPosition(99, 2)) != a


def test_fast_and_sequential_paths_agree():
    # p = 5 hits singular matrices often, exercising the resampling path
    for params in (PastaParams(5, 3, 3), PastaParams(17, 4, 4), PastaParams(65537, 17, 3)):
        for c in range(30):
            pos = StreamPosition(c, c)
            seq = pasta._derive_sequential(params, pos)
            assert pasta._derive_buffered(params, pos) == seq
            fast = pasta._derive_fast(params, pos)
            if fast is not None:
                assert fast == seq


def test_invertible_mask_against_sympy():
    rng = np.random.default_rng(0)
    mats = rng.integers(0, 5, size=(60, 3, 3), dtype=np.uint64)
    mask = pasta.invertible_mask(mats, 5)
    for m, ok in zip(mats, mask):
        assert bool(ok) == (det_mod_p(m.tolist(), 5) != 0)
    assert not pasta.is_invertible(np.zeros((2, 2), dtype=np.uint64), 17)


def test_mulmod_wide_prime():
    p = 4294967291
    rng = np.random.default_rng(1)
    a = rng.integers(0, p, size=200, dtype=np.uint64)
    b = rng.integers(0, p, size=200, dtype=np.uint64)
    got = pasta.mulmod(a, b, p)
    assert [int(v) for v in got] == [int(x) * int(y) % p for x, y in zip(a, b)]


def _layer(ml, mr, cl, cr):
    return AffineLayer(np.array(ml), np.array(mr), np.array(cl), np.array(cr))


def test_affine_examples():
    eye = np.eye(2, dtype=np.uint64)
    layer = _layer(eye, eye, [0, 0], [0, 0])
    out = affine_apply(layer, PastaState((1, 2), (1, 2)), 17)
    assert out == PastaState((3, 6), (3, 6))
    layer = _layer([[2]], [[3]], [0], [0])
    assert affine_apply(layer, PastaState((1,), (1,)), 5) == PastaState((2,), (3,))
    assert affine_apply(layer, PastaState((1,), (1,)), 5, mix_halves=False) == PastaState((2,), (3,))
    layer = _layer([[1]], [[1]], [0], [0])
    assert affine_apply(layer, PastaState((1,), (2,)), 17, mix_halves=False) == PastaState((1,), (2,))
    with pytest.raises(DimensionMismatch):
        affine_apply(layer, PastaState((1, 2), (3, 4)), 17)


def test_affine_inverse_recovers_state():
    import sympy

    p, t = 257, 3
    layer = derive_round_material(PastaParams(p, t, 2), StreamPosition(4, 4)).layers[1]
    rng = random.Random(3)
    x = [rng.randrange(p) for _ in range(2 * t)]
    y = affine_apply(layer, PastaState.from_words(x), p).words
    inv3 = pow(3, -1, p)
    # undo the mix: y_L = 2a + b, y_R = a + 2b  =>  a = (2 y_L - y_R) / 3
    a = [(2 * yl - yr) * inv3 % p for yl, yr in zip(y[:t], y[t:])]
    b = [(2 * yr - yl) * inv3 % p for yl, yr in zip(y[:t], y[t:])]
    ml_inv = sympy.Matrix(layer.m_left.tolist()).inv_mod(p)
    mr_inv = sympy.Matrix(layer.m_right.tolist()).inv_mod(p)
    xl = ml_inv * sympy.Matrix([(v - int(c)) % p for v, c in zip(a, layer.c_left)])
    xr = mr_inv * sympy.Matrix([(v - int(c)) % p for v, c in zip(b, layer.c_right)])
    assert [int(v) % p for v in list(xl) + list(xr)] == x


def test_sbox_examples():
    assert sbox_feistel(PastaState((0, 0), (0, 0)), 17).words == (0, 0, 0, 0)
    assert sbox_feistel(PastaState((2,), (3,)), 17).words == (2, 7)
    # odd length is not a valid state; check the 3-word formula on the raw helper
    assert [int(v) for v in pasta._feistel(np.array([2, 3, 5], dtype=np.uint64), 17)] == [2, 7, 14]
    assert sbox_cube(PastaState((0, 1), (2, 16)), 17).words == (0, 1, 8, 16)


def test_cube_bijective_on_sample():
    p = 65537
    xs = np.array(random.Random(0).sample(range(p), 10_000), dtype=np.uint64)
    cubes = pasta._cube(xs, p)
    assert len(set(int(v) for v in cubes)) == 10_000


@pytest.mark.parametrize("r", [3, 4])
def test_permutation_bijective_tiny(r):
    params = PastaParams(5, 1, r)
    rng = random.Random(r)
    for _ in range(20):
        pos = StreamPosition(rng.getrandbits(64), rng.getrandbits(64))
        outs = {pasta_permutation(PastaSecretKey(s), pos, params).words for s in itertools.product(range(5), repeat=2)}
        assert len(outs) == 25


def test_permutation_r1_is_affine_cube_affine():
    params = PastaParams(17, 2, 1)
    pos = StreamPosition(1, 1)
    key = PastaSecretKey((1, 2, 3, 4))
    a0, a1 = derive_round_material(params, pos).layers
    manual = affine_apply(a1, sbox_cube(affine_apply(a0, PastaState.from_words(key.words), 17), 17), 17)
    assert pasta_permutation(key, pos, params) == manual


def test_keystream_length_and_counter_sensitivity():
    key = pasta.generate_key(P4, random.Random(1))
    a = keystream_block(key, StreamPosition(5, 0), P4)
    b = keystream_block(key, StreamPosition(5, 1), P4)
    assert len(a) == len(b) == 17 and a != b


def test_empty_message():
    key = pasta.generate_key(P4, random.Random(1))
    ct = encrypt(key, 3, [], P4)
    assert ct.word_count == 0 and decrypt(key, ct, P4) == []


def test_encrypt_zero_reveals_keystream_with_short_tail():
    key = pasta.generate_key(P4, random.Random(2))
    ct = encrypt(key, 8, [0] * 40, P4)
    expected = []
    for i in range(3):
        expected += keystream_block(key, StreamPosition(8, i), P4)
    assert list(ct.words) == expected[:40]


def test_mnist_block_count():
    assert num_blocks(784, 17) == 47
    assert num_blocks(0, 17) == 0
    assert num_blocks(17, 17) == 1
    assert num_blocks(18, 17) == 2


def test_unreduced_words_rejected():
    key = pasta.generate_key(P3, random.Random(1))
    with pytest.raises(UnreducedWord):
        encrypt(key, 0, [65537], P3)
    with pytest.raises(UnreducedWord):
        decrypt(key, SymCiphertext(0, (70000,)), P3)
    with pytest.raises(UnreducedWord):
        PastaSecretKey((65537,) * 34).check(P3)
    with pytest.raises(DimensionMismatch):
        PastaSecretKey((1,) * 33).check(P3)


SMALL = [PastaParams(5, 1, 3), PastaParams(17, 2, 3), PastaParams(5, 2, 4), PastaParams(17, 1, 4)]


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(SMALL), st.data())
def test_roundtrip_property(params, data):
    words = data.draw(st.lists(st.integers(0, params.p - 1), max_size=40))
    key = PastaSecretKey(data.draw(st.lists(st.integers(0, params.p - 1), min_size=2 * params.t, max_size=2 * params.t)))
    nonce = data.draw(st.integers(0, 2**64 - 1))
    assert decrypt(key, encrypt(key, nonce, words, params), params) == words


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(SMALL), st.data())
def test_additive_stream_property(params, data):
    n = data.draw(st.integers(0, 30))
    m1 = data.draw(st.lists(st.integers(0, params.p - 1), min_size=n, max_size=n))
    m2 = data.draw(st.lists(st.integers(0, params.p - 1), min_size=n, max_size=n))
    key = pasta.generate_key(params, random.Random(data.draw(st.integers(0, 1000))))
    c1, c2 = encrypt(key, 1, m1, params), encrypt(key, 1, m2, params)
    p = params.p
    assert [(c - m) % p for c, m in zip(c1.words, m1)] == [(c - m) % p for c, m in zip(c2.words, m2)]


def test_vector_lines_roundtrip_and_oracle():
    lines = pasta.emit_vectors(PastaParams(257, 2, 3), 5, seed=4)
    assert lines == pasta.emit_vectors(PastaParams(257, 2, 3), 5, seed=4)
    for line in lines:
        params, pos, key, ks = pasta.parse_vector_line(line)
        assert pasta.format_vector_line(params, pos, key, ks) == line
        assert ks == pasta_keystream_reference(params.p, params.t, params.r, pos.nonce, pos.counter, list(key.words))


def test_state_helpers():
    s = PastaState.from_words([1, 2, 3, 4])
    assert s.left == (1, 2) and s.right == (3, 4)
    with pytest.raises(DimensionMismatch):
        PastaState.from_words([1, 2, 3])
    with pytest.raises(DimensionMismatch):
        PastaState((1,), (2, 3))
    assert PrimeModulus(P4.p).p == 65537
