"""On-disk formats: Pasta key files, the HHE1 ciphertext container, word files.

Word files are raw concatenations of 4-byte little-endian words.

HHE1 container::

    magic "HHE1" | p u32 | t u32 | r u32 | nonce u64 | word_count u32 | words (u32 each)
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

from .pasta import PastaParams, PastaSecretKey, SymCiphertext

CONTAINER_MAGIC = b"HHE1"
CONTAINER_HEADER = struct.Struct("<4sIIIQI")


class BadHeader(ValueError):
    pass


def read_words(path) -> list[int]:
    data = Path(path).read_bytes()
    if len(data) % 4:
        raise ValueError(f"{path}: length {len(data)} is not a multiple of 4")
    return list(struct.unpack(f"<{len(data) // 4}I", data))


def write_words(path, words) -> None:
    words = list(words)
    Path(path).write_bytes(struct.pack(f"<{len(words)}I", *words))


def container_header(params: PastaParams, nonce: int, word_count: int) -> bytes:
    return CONTAINER_HEADER.pack(CONTAINER_MAGIC, params.p, params.t, params.r, nonce, word_count)


def encode_container(params: PastaParams, ct: SymCiphertext) -> bytes:
    head = container_header(params, ct.nonce, ct.word_count)
    return head + struct.pack(f"<{ct.word_count}I", *ct.words)


def decode_container(data: bytes) -> tuple[PastaParams, SymCiphertext]:
    if len(data) < CONTAINER_HEADER.size:
        raise BadHeader("file too short for an HHE1 header")
    magic, p, t, r, nonce, count = CONTAINER_HEADER.unpack_from(data)
    if magic != CONTAINER_MAGIC:
        raise BadHeader(f"bad magic {magic!r}")
    body = data[CONTAINER_HEADER.size:]
    if len(body) != 4 * count:
        raise BadHeader(f"header declares {count} words, body holds {len(body) / 4:g}")
    try:
        params = PastaParams(p, t, r)
    except ValueError as exc:
        raise BadHeader(str(exc)) from exc
    return params, SymCiphertext(nonce, struct.unpack(f"<{count}I", body))


def save_pasta_key(path, params: PastaParams, key: PastaSecretKey) -> None:
    obj = {"p": params.p, "t": params.t, "r": params.r, "mix_halves": params.mix_halves,
           "words": list(key.words)}
    Path(path).write_text(json.dumps(obj) + "\n")


def load_pasta_key(path) -> tuple[PastaParams, PastaSecretKey]:
    obj = json.loads(Path(path).read_text())
    params = PastaParams(obj["p"], obj["t"], obj["r"], obj.get("mix_halves", True))
    key = PastaSecretKey(obj["words"])
    key.check(params)
    return params, key
