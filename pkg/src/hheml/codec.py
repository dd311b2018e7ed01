"""Little-endian binary reader/writer shared by key files and wire frames."""

from __future__ import annotations

import struct


class DecodeError(ValueError):
    """Base for every malformed-input failure while decoding bytes."""


class Truncated(DecodeError):
    pass


class Malformed(DecodeError):
    pass


class Writer:
    def __init__(self):
        self._parts: list[bytes] = []

    def u8(self, v: int) -> "Writer":
        self._parts.append(struct.pack("<B", v))
        return self

    def u16(self, v: int) -> "Writer":
        self._parts.append(struct.pack("<H", v))
        return self

    def u32(self, v: int) -> "Writer":
        self._parts.append(struct.pack("<I", v))
        return self

    def u64(self, v: int) -> "Writer":
        self._parts.append(struct.pack("<Q", v))
        return self

    def f64(self, v: float) -> "Writer":
        self._parts.append(struct.pack("<d", v))
        return self

    def raw(self, b: bytes) -> "Writer":
        self._parts.append(bytes(b))
        return self

    def blob(self, b: bytes) -> "Writer":
        return self.u32(len(b)).raw(b)

    def bigint(self, v: int) -> "Writer":
        if v < 0:
            raise ValueError("bigint fields are unsigned")
        return self.blob(v.to_bytes((v.bit_length() + 7) // 8, "little"))

    def words(self, ws) -> "Writer":
        ws = list(ws)
        self.u32(len(ws))
        self._parts.append(struct.pack(f"<{len(ws)}I", *ws))
        return self

    def getvalue(self) -> bytes:
        return b"".join(self._parts)


class Reader:
    def __init__(self, data: bytes):
        self._data = memoryview(data)
        self._pos = 0

    def take(self, n: int) -> bytes:
        if n < 0 or self._pos + n > len(self._data):
            raise Truncated(f"needed {n} bytes at offset {self._pos}, {self.remaining} left")
        out = bytes(self._data[self._pos:self._pos + n])
        self._pos += n
        return out

    @property
    def remaining(self) -> int:
        return len(self._data) - self._pos

    def _unpack(self, fmt: str, size: int):
        return struct.unpack(fmt, self.take(size))[0]

    def u8(self) -> int:
        return self._unpack("<B", 1)

    def u16(self) -> int:
        return self._unpack("<H", 2)

    def u32(self) -> int:
        return self._unpack("<I", 4)

    def u64(self) -> int:
        return self._unpack("<Q", 8)

    def f64(self) -> float:
        return self._unpack("<d", 8)

    def blob(self) -> bytes:
        return self.take(self.u32())

    def bigint(self) -> int:
        return int.from_bytes(self.blob(), "little")

    def words(self) -> list[int]:
        n = self.u32()
        return list(struct.unpack(f"<{n}I", self.take(4 * n)))

    def count(self, item_size: int) -> int:
        """Read a u32 element count, rejecting counts the buffer cannot hold."""
        n = self.u32()
        if n * item_size > self.remaining:
            raise Truncated(f"count {n} exceeds remaining payload")
        return n

    def done(self) -> None:
        if self.remaining:
            raise Malformed(f"{self.remaining} trailing bytes")
