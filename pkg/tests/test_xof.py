import random

import pytest
from hypothesis import given, strategies as st

from hheml.xof import ROUND_MATERIAL_TAG, BadTag, StreamPosition, XofStream, seed_bytes, squeeze_bytes, xof_init
from oracles import shake128_reference


def test_seed_layout():
    seed = seed_bytes(ROUND_MATERIAL_TAG, StreamPosition(1, 2))
    assert seed == b"HHEML-PASTA-RM" + bytes.fromhex("00" "0100000000000000" "0200000000000000")


def test_seed_never_depends_on_anything_but_position():
    a = xof_init(ROUND_MATERIAL_TAG, StreamPosition(5, 9))
    b = xof_init(ROUND_MATERIAL_TAG, StreamPosition(5, 9))
    assert a.squeeze_bytes(100) == b.squeeze_bytes(100)


@pytest.mark.parametrize("tag", [b"", b"x" * 17])
def test_bad_tags(tag):
    with pytest.raises(BadTag):
        xof_init(tag, StreamPosition(0, 0))


def test_tag_length_limits():
    xof_init(b"x", StreamPosition(0, 0))
    xof_init(b"x" * 16, StreamPosition(0, 0))


@pytest.mark.parametrize("nonce,counter", [(-1, 0), (0, 2**64), (0.5, 0)])
def test_position_bounds(nonce, counter):
    with pytest.raises(ValueError):
        StreamPosition(nonce, counter)


def test_matches_independent_shake128():
    seed = ROUND_MATERIAL_TAG + b"\x00" + bytes(16)
    s = xof_init(ROUND_MATERIAL_TAG, StreamPosition(0, 0))
    assert squeeze_bytes(s, 32) == shake128_reference(seed, 32)
    # well past one rate block, and across the internal buffer growth
    s = xof_init(ROUND_MATERIAL_TAG, StreamPosition(3, 7))
    out = s.squeeze_bytes(10) + s.squeeze_bytes(1500) + s.squeeze_bytes(700)
    assert out == shake128_reference(seed_bytes(ROUND_MATERIAL_TAG, StreamPosition(3, 7)), 2210)


def test_counter_changes_output():
    a = xof_init(ROUND_MATERIAL_TAG, StreamPosition(0, 0)).squeeze_bytes(64)
    b = xof_init(ROUND_MATERIAL_TAG, StreamPosition(0, 1)).squeeze_bytes(64)
    assert a != b


def test_zero_squeeze_and_negative():
    s = XofStream(b"seed")
    assert s.squeeze_bytes(0) == b""
    assert s.offset == 0
    with pytest.raises(ValueError):
        s.squeeze_bytes(-1)


def test_peek_and_skip():
    s = XofStream(b"seed")
    head = s.peek_bytes(8)
    assert s.offset == 0
    s.skip(4)
    assert s.squeeze_bytes(4) == head[4:]


@given(st.lists(st.integers(0, 400), max_size=12))
def test_split_invariance(parts):
    whole = XofStream(b"split").squeeze_bytes(sum(parts))
    s = XofStream(b"split")
    assert b"".join(s.squeeze_bytes(n) for n in parts) == whole


def test_distinct_positions_distinct_prefixes():
    rng = random.Random(7)
    positions = {(rng.getrandbits(64), rng.getrandbits(64)) for _ in range(10_000)}
    prefixes = {xof_init(ROUND_MATERIAL_TAG, StreamPosition(n, c)).squeeze_bytes(64) for n, c in positions}
    assert len(prefixes) == len(positions)
