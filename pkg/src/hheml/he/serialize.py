"""Binary encodings for HE parameters, keys and ciphertexts.

A polynomial is ``u32 count | u16 width | count * width`` bytes of
little-endian unsigned coefficients (reduced mod q).
"""

from __future__ import annotations

from ..codec import Malformed, Reader, Writer
from .base import KINDS, BadParams, HeCiphertext, HeParams, HePublicMaterial, HeSecretKey

MAX_RING_DEGREE = 1 << 16


def write_params(w: Writer, params: HeParams) -> Writer:
    w.u8(KINDS.index(params.kind))
    w.u32(params.plaintext_modulus).u32(params.n)
    w.bigint(params.q).bigint(params.decomp_base)
    return w.f64(params.error_stddev)


def read_params(r: Reader) -> HeParams:
    kind = r.u8()
    if kind >= len(KINDS):
        raise Malformed(f"unknown HE backend id {kind}")
    plain, n = r.u32(), r.u32()
    q, base = r.bigint(), r.bigint()
    stddev = r.f64()
    if n > MAX_RING_DEGREE:
        raise Malformed(f"ring degree {n} too large")
    try:
        return HeParams(KINDS[kind], plain, n, q, base, stddev)
    except BadParams as exc:
        raise Malformed(str(exc)) from exc


def write_poly(w: Writer, coeffs, modulus: int) -> Writer:
    width = max(1, (modulus.bit_length() + 7) // 8)
    w.u32(len(coeffs)).u16(width)
    w.raw(b"".join((c % modulus).to_bytes(width, "little") for c in coeffs))
    return w


def read_poly(r: Reader) -> tuple:
    count = r.u32()
    width = r.u16()
    if width == 0:
        raise Malformed("zero coefficient width")
    raw = r.take(count * width)
    return tuple(int.from_bytes(raw[i:i + width], "little") for i in range(0, len(raw), width))


def _coeff_modulus(params: HeParams) -> int:
    return params.plaintext_modulus if params.kind == "transparent" else params.q


def write_ciphertext(w: Writer, ct: HeCiphertext) -> Writer:
    w.u32(ct.depth).u8(len(ct.parts))
    for part in ct.parts:
        write_poly(w, part, _coeff_modulus(ct.params))
    return w


def read_ciphertext(r: Reader, params: HeParams) -> HeCiphertext:
    depth = r.u32()
    nparts = r.u8()
    expected_parts, expected_len = (1, 1) if params.kind == "transparent" else (2, params.n)
    if nparts != expected_parts:
        raise Malformed(f"ciphertext has {nparts} parts, expected {expected_parts}")
    modulus = _coeff_modulus(params)
    parts = []
    for _ in range(nparts):
        poly = read_poly(r)
        if len(poly) != expected_len or any(c >= modulus for c in poly):
            raise Malformed("ciphertext polynomial has the wrong shape or unreduced coefficients")
        parts.append(poly)
    return HeCiphertext(tuple(parts), depth, params)


def write_ciphertexts(w: Writer, cts) -> Writer:
    cts = list(cts)
    w.u32(len(cts))
    for ct in cts:
        write_ciphertext(w, ct)
    return w


def read_ciphertexts(r: Reader, params: HeParams) -> list[HeCiphertext]:
    n = r.count(5)
    return [read_ciphertext(r, params) for _ in range(n)]


def write_public(w: Writer, pub: HePublicMaterial) -> Writer:
    q = pub.params.q
    write_poly(w, pub.b, q)
    write_poly(w, pub.a, q)
    w.u32(len(pub.relin))
    for rb, ra in pub.relin:
        write_poly(w, rb, q)
        write_poly(w, ra, q)
    return w


def read_public(r: Reader, params: HeParams) -> HePublicMaterial:
    b, a = read_poly(r), read_poly(r)
    count = r.count(12)
    relin = tuple((read_poly(r), read_poly(r)) for _ in range(count))
    if params.kind == "bfv-toy":
        polys = [b, a] + [p for pair in relin for p in pair]
        if count != params.decomp_len or any(len(p) != params.n for p in polys):
            raise Malformed("public material does not match the HE parameters")
        if any(c >= params.q for p in polys for c in p):
            raise Malformed("public material has unreduced coefficients")
    return HePublicMaterial(params, b, a, relin)


def write_secret(w: Writer, sk: HeSecretKey) -> Writer:
    return write_poly(w, sk.s, sk.params.q)


def read_secret(r: Reader, params: HeParams) -> HeSecretKey:
    q = params.q
    return HeSecretKey(params, tuple(c - q if c > q // 2 else c for c in read_poly(r)))


def dump_keys(sk: HeSecretKey, pub: HePublicMaterial) -> bytes:
    w = Writer().raw(b"HHEK")
    write_params(w, sk.params)
    write_secret(w, sk)
    write_public(w, pub)
    return w.getvalue()


def load_keys(data: bytes) -> tuple[HeSecretKey, HePublicMaterial]:
    r = Reader(data)
    if r.take(4) != b"HHEK":
        raise Malformed("not an HE key file")
    params = read_params(r)
    sk = read_secret(r, params)
    pub = read_public(r, params)
    r.done()
    return sk, pub
