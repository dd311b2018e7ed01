"""AES-128 block cipher (FIPS 197) and a CTR-mode wrapper.

Pure Python, byte-oriented, state stored column-major as in the standard.
Used as the non-HE-friendly baseline in benchmarks and for wrapping key
material; not constant time.
"""

from __future__ import annotations

from dataclasses import dataclass


class BadKeyLength(ValueError):
    pass


def _xtime(a: int) -> int:
    a <<= 1
    return (a ^ 0x11B) if a & 0x100 else a


def _gmul(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        a = _xtime(a)
        b >>= 1
    return out


def _build_sbox():
    inv = [0] * 256
    for a in range(1, 256):
        for b in range(1, 256):
            if _gmul(a, b) == 1:
                inv[a] = b
                break
    sbox = []
    for a in range(256):
        x = inv[a]
        y = x
        for shift in range(1, 5):
            y ^= ((x << shift) | (x >> (8 - shift))) & 0xFF
        sbox.append(y ^ 0x63)
    inv_sbox = [0] * 256
    for a, s in enumerate(sbox):
        inv_sbox[s] = a
    return bytes(sbox), bytes(inv_sbox)


SBOX, INV_SBOX = _build_sbox()
_MUL = {k: bytes(_gmul(a, k) for a in range(256)) for k in (2, 3, 9, 11, 13, 14)}
_RCON = (0x01, 0x02, 0x04, 0x08, 0x10, 0x20, 0x40, 0x80, 0x1B, 0x36)

# ShiftRows on a column-major state: byte at (row, col) = state[row + 4*col]
_SHIFT = tuple((i + 4 * (i % 4)) % 16 for i in range(16))
_INV_SHIFT = tuple(_SHIFT.index(i) for i in range(16))


@dataclass(frozen=True)
class AesKeySchedule:
    round_keys: tuple  # N_r + 1 entries of 16 bytes

    @property
    def rounds(self) -> int:
        return len(self.round_keys) - 1


def key_expansion(key: bytes) -> AesKeySchedule:
    if len(key) != 16:
        raise BadKeyLength(f"AES-128 needs a 16-byte key, got {len(key)}")
    words = [list(key[4 * i:4 * i + 4]) for i in range(4)]
    for i in range(4, 44):
        temp = list(words[i - 1])
        if i % 4 == 0:
            temp = temp[1:] + temp[:1]
            temp = [SBOX[b] for b in temp]
            temp[0] ^= _RCON[i // 4 - 1]
        words.append([a ^ b for a, b in zip(words[i - 4], temp)])
    return AesKeySchedule(
        tuple(bytes(sum(words[4 * r:4 * r + 4], [])) for r in range(11))
    )


def _add(state, rk):
    return [a ^ b for a, b in zip(state, rk)]


def _mix_columns(s):
    m2, m3 = _MUL[2], _MUL[3]
    out = [0] * 16
    for c in range(0, 16, 4):
        a0, a1, a2, a3 = s[c:c + 4]
        out[c] = m2[a0] ^ m3[a1] ^ a2 ^ a3
        out[c + 1] = a0 ^ m2[a1] ^ m3[a2] ^ a3
        out[c + 2] = a0 ^ a1 ^ m2[a2] ^ m3[a3]
        out[c + 3] = m3[a0] ^ a1 ^ a2 ^ m2[a3]
    return out


def _inv_mix_columns(s):
    m9, m11, m13, m14 = _MUL[9], _MUL[11], _MUL[13], _MUL[14]
    out = [0] * 16
    for c in range(0, 16, 4):
        a0, a1, a2, a3 = s[c:c + 4]
        out[c] = m14[a0] ^ m11[a1] ^ m13[a2] ^ m9[a3]
        out[c + 1] = m9[a0] ^ m14[a1] ^ m11[a2] ^ m13[a3]
        out[c + 2] = m13[a0] ^ m9[a1] ^ m14[a2] ^ m11[a3]
        out[c + 3] = m11[a0] ^ m13[a1] ^ m9[a2] ^ m14[a3]
    return out


def cipher(block: bytes, ks: AesKeySchedule) -> bytes:
    if len(block) != 16:
        raise ValueError("AES blocks are 16 bytes")
    rks = ks.round_keys
    s = _add(block, rks[0])
    for rnd in range(1, ks.rounds):
        s = [SBOX[s[i]] for i in _SHIFT]  # SubBytes and ShiftRows commute
        s = _add(_mix_columns(s), rks[rnd])
    s = [SBOX[s[i]] for i in _SHIFT]
    return bytes(_add(s, rks[ks.rounds]))


def inv_cipher(block: bytes, ks: AesKeySchedule) -> bytes:
    if len(block) != 16:
        raise ValueError("AES blocks are 16 bytes")
    rks = ks.round_keys
    s = _add(block, rks[ks.rounds])
    for rnd in range(ks.rounds - 1, 0, -1):
        s = [INV_SBOX[s[i]] for i in _INV_SHIFT]
        s = _inv_mix_columns(_add(s, rks[rnd]))
    s = [INV_SBOX[s[i]] for i in _INV_SHIFT]
    return bytes(_add(s, rks[0]))


def ctr_keystream_block(ks: AesKeySchedule, iv: bytes, index: int) -> bytes:
    ctr = (int.from_bytes(iv[12:], "big") + index) & 0xFFFFFFFF
    return cipher(iv[:12] + ctr.to_bytes(4, "big"), ks)


def ctr_wrap(key: bytes, iv: bytes, data: bytes) -> bytes:
    """CTR-mode XOR; the 32-bit big-endian counter lives in the IV's last 4 bytes."""
    if len(iv) != 16:
        raise ValueError("CTR IV must be 16 bytes")
    ks = key_expansion(key)
    out = bytearray()
    for i in range(0, len(data), 16):
        stream = ctr_keystream_block(ks, iv, i // 16)
        out.extend(a ^ b for a, b in zip(data[i:i + 16], stream))
    return bytes(out)
