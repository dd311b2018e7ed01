"""SHAKE128 byte streams seeded from public (nonce, counter) positions.

The seed never contains key material: the server has to re-derive the same
round material from public data alone.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

ROUND_MATERIAL_TAG = b"HHEML-PASTA-RM"
MAX_TAG_LEN = 16
U64_MAX = 2**64 - 1


class BadTag(ValueError):
    pass


@dataclass(frozen=True)
class StreamPosition:
    nonce: int
    counter: int

    def __post_init__(self):
        for name in ("nonce", "counter"):
            v = getattr(self, name)
            if not isinstance(v, int) or not 0 <= v <= U64_MAX:
                raise ValueError(f"{name} must be a 64-bit unsigned int, got {v!r}")


def seed_bytes(domain_tag: bytes, pos: StreamPosition) -> bytes:
    if isinstance(domain_tag, str):
        domain_tag = domain_tag.encode()
    if not 0 < len(domain_tag) <= MAX_TAG_LEN:
        raise BadTag(f"domain tag must be 1..{MAX_TAG_LEN} bytes, got {len(domain_tag)}")
    return (
        domain_tag
        + b"\x00"
        + pos.nonce.to_bytes(8, "little")
        + pos.counter.to_bytes(8, "little")
    )


class XofStream:
    """Squeeze-only SHAKE128 reader.

    hashlib cannot squeeze incrementally, so output is materialised in a
    buffer that doubles on demand; bytes at a given offset never change.
    """

    def __init__(self, seed: bytes):
        self.seed = bytes(seed)
        self.offset = 0
        self._buf = b""

    def _ensure(self, end: int) -> None:
        if end > len(self._buf):
            size = max(end, 2 * len(self._buf), 1024)
            self._buf = hashlib.shake_128(self.seed).digest(size)

    def squeeze_bytes(self, n: int) -> bytes:
        if n < 0:
            raise ValueError("cannot squeeze a negative byte count")
        out = self.peek_bytes(n)
        self.offset += n
        return out

    def peek_bytes(self, n: int) -> bytes:
        end = self.offset + n
        self._ensure(end)
        return self._buf[self.offset:end]

    def skip(self, n: int) -> None:
        self.offset += n


def xof_init(domain_tag: bytes, pos: StreamPosition) -> XofStream:
    return XofStream(seed_bytes(domain_tag, pos))


def squeeze_bytes(stream: XofStream, n: int) -> bytes:
    return stream.squeeze_bytes(n)
