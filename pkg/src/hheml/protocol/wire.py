"""Frame and message encodings for the client/server exchange.

Frame layout (all integers little-endian)::

    magic "HHEM" | version 0x01 | msg_type u8 | payload_len u32 | payload

Every message is self-describing: frames that carry ciphertexts also carry
the HE parameters needed to parse them.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import IntEnum

from ..codec import DecodeError, Malformed, Reader, Truncated, Writer
from ..he import HeCiphertext, HeParams, HePublicMaterial
from ..he import serialize as hes
from ..pasta import PastaParams
from ..transcipher import EncryptedPastaKey

MAGIC = b"HHEM"
VERSION = 0x01
HEADER = struct.Struct("<4sBBI")
HEADER_SIZE = HEADER.size
MAX_PAYLOAD = 1 << 28


class FrameError(DecodeError):
    pass


class BadMagic(FrameError):
    pass


class BadVersion(FrameError):
    pass


class TruncatedFrame(FrameError, Truncated):
    pass


class OversizedFrame(FrameError):
    pass


class UnknownType(FrameError):
    pass


class MsgType(IntEnum):
    CLIENT_HELLO = 0x01
    SERVER_HELLO = 0x02
    KEY_PROVISION = 0x03
    DATA_UPLOAD = 0x04
    INFER_REQUEST = 0x05
    RESULT_CIPHERTEXTS = 0x06
    ERROR = 0x7F


class ErrorCode(IntEnum):
    MALFORMED = 0x01
    BAD_PHASE = 0x02
    EMPTY_DATA = 0x03
    BAD_PARAMS = 0x04
    UNKNOWN_MODEL = 0x05
    INTERNAL = 0x06


@dataclass(frozen=True)
class ClientHello:
    pasta: PastaParams
    he: HeParams


@dataclass(frozen=True)
class ServerHello:
    accepted: bool
    pasta: PastaParams
    he: HeParams


@dataclass(frozen=True)
class KeyProvision:
    public: HePublicMaterial
    key: EncryptedPastaKey


@dataclass(frozen=True)
class DataUpload:
    nonce: int
    words: tuple

    @property
    def word_count(self) -> int:
        return len(self.words)


@dataclass(frozen=True)
class InferRequest:
    model_id: str


@dataclass(frozen=True)
class ResultCiphertexts:
    he: HeParams
    cts: tuple


@dataclass(frozen=True)
class Error:
    code: int
    reason: str


MESSAGE_TYPES = {
    ClientHello: MsgType.CLIENT_HELLO,
    ServerHello: MsgType.SERVER_HELLO,
    KeyProvision: MsgType.KEY_PROVISION,
    DataUpload: MsgType.DATA_UPLOAD,
    InferRequest: MsgType.INFER_REQUEST,
    ResultCiphertexts: MsgType.RESULT_CIPHERTEXTS,
    Error: MsgType.ERROR,
}


def _write_pasta(w: Writer, params: PastaParams) -> None:
    w.u32(params.p).u32(params.t).u32(params.r).u8(int(params.mix_halves))


def _read_pasta(r: Reader) -> PastaParams:
    p, t, r_, mix = r.u32(), r.u32(), r.u32(), r.u8()
    if mix > 1:
        raise Malformed("mix flag must be 0 or 1")
    return PastaParams(p, t, r_, bool(mix))


def encode_payload(msg) -> bytes:
    w = Writer()
    if isinstance(msg, ClientHello):
        _write_pasta(w, msg.pasta)
        hes.write_params(w, msg.he)
    elif isinstance(msg, ServerHello):
        w.u8(int(msg.accepted))
        _write_pasta(w, msg.pasta)
        hes.write_params(w, msg.he)
    elif isinstance(msg, KeyProvision):
        hes.write_params(w, msg.public.params)
        _write_pasta(w, msg.key.pasta_params)
        hes.write_public(w, msg.public)
        hes.write_ciphertexts(w, msg.key.words)
    elif isinstance(msg, DataUpload):
        w.u64(msg.nonce)
        w.words(msg.words)
    elif isinstance(msg, InferRequest):
        w.blob(msg.model_id.encode("utf-8"))
    elif isinstance(msg, ResultCiphertexts):
        hes.write_params(w, msg.he)
        hes.write_ciphertexts(w, msg.cts)
    elif isinstance(msg, Error):
        w.u8(msg.code).raw(msg.reason.encode("utf-8"))
    else:
        raise TypeError(f"not a protocol message: {type(msg).__name__}")
    return w.getvalue()


def _decode_payload(msg_type: MsgType, payload: bytes):
    r = Reader(payload)
    if msg_type == MsgType.CLIENT_HELLO:
        msg = ClientHello(_read_pasta(r), hes.read_params(r))
    elif msg_type == MsgType.SERVER_HELLO:
        accepted = r.u8()
        if accepted > 1:
            raise Malformed("accept flag must be 0 or 1")
        msg = ServerHello(bool(accepted), _read_pasta(r), hes.read_params(r))
    elif msg_type == MsgType.KEY_PROVISION:
        he_params = hes.read_params(r)
        pasta_params = _read_pasta(r)
        public = hes.read_public(r, he_params)
        words = hes.read_ciphertexts(r, he_params)
        msg = KeyProvision(public, EncryptedPastaKey(tuple(words), pasta_params, he_params))
    elif msg_type == MsgType.DATA_UPLOAD:
        msg = DataUpload(r.u64(), tuple(r.words()))
    elif msg_type == MsgType.INFER_REQUEST:
        msg = InferRequest(r.blob().decode("utf-8"))
    elif msg_type == MsgType.RESULT_CIPHERTEXTS:
        he_params = hes.read_params(r)
        msg = ResultCiphertexts(he_params, tuple(hes.read_ciphertexts(r, he_params)))
    else:
        msg = Error(r.u8(), r.take(r.remaining).decode("utf-8"))
    r.done()
    return msg


def encode_frame(msg) -> bytes:
    msg_type = MESSAGE_TYPES.get(type(msg))
    if msg_type is None:
        raise TypeError(f"not a protocol message: {type(msg).__name__}")
    payload = encode_payload(msg)
    if len(payload) > MAX_PAYLOAD:
        raise OversizedFrame(f"payload of {len(payload)} bytes exceeds the 2^28 cap")
    return HEADER.pack(MAGIC, VERSION, msg_type, len(payload)) + payload


def parse_header(header: bytes) -> tuple[MsgType, int]:
    if len(header) < HEADER_SIZE:
        raise TruncatedFrame(f"header needs {HEADER_SIZE} bytes, got {len(header)}")
    magic, version, msg_type, length = HEADER.unpack(header[:HEADER_SIZE])
    if magic != MAGIC:
        raise BadMagic(f"bad magic {magic!r}")
    if version != VERSION:
        raise BadVersion(f"unsupported version {version}")
    try:
        msg_type = MsgType(msg_type)
    except ValueError:
        raise UnknownType(f"unknown message type 0x{msg_type:02x}") from None
    if length > MAX_PAYLOAD:
        raise OversizedFrame(f"declared payload of {length} bytes exceeds the 2^28 cap")
    return msg_type, length


def decode_body(msg_type: MsgType, payload: bytes):
    try:
        return _decode_payload(msg_type, payload)
    except DecodeError:
        raise
    except (ValueError, OverflowError, struct.error) as exc:
        # semantic validation failures (bad params, wrong key length, bad utf-8)
        raise Malformed(f"{msg_type.name}: {exc}") from exc


def decode_frame(data: bytes):
    """Decode exactly one frame; trailing bytes are an error."""
    msg_type, length = parse_header(data)
    payload = data[HEADER_SIZE:HEADER_SIZE + length]
    if len(payload) < length:
        raise TruncatedFrame(f"payload needs {length} bytes, got {len(payload)}")
    if len(data) > HEADER_SIZE + length:
        raise Malformed(f"{len(data) - HEADER_SIZE - length} bytes after the frame")
    return decode_body(msg_type, payload)
