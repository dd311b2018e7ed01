"""TCP transport: framed socket I/O, the server loop and the client session."""

from __future__ import annotations

import logging
import os
import random
import socket
import socketserver
from typing import Mapping, Sequence

from ..codec import DecodeError
from ..he import HePublicMaterial, HeSecretKey, he_decrypt
from ..pasta import PastaParams, PastaSecretKey, encrypt
from ..transcipher import LinearModel, encrypt_pasta_key
from .session import ServerSession
from .wire import (
    HEADER_SIZE,
    ClientHello,
    DataUpload,
    Error,
    ErrorCode,
    InferRequest,
    KeyProvision,
    ResultCiphertexts,
    ServerHello,
    TruncatedFrame,
    decode_body,
    encode_frame,
    parse_header,
)

log = logging.getLogger(__name__)

DEFAULT_PORT = 45117
PHASE_TIMEOUT = 30.0


def default_port() -> int:
    return int(os.environ.get("HHEML_PORT", DEFAULT_PORT))


class SessionTimeout(TimeoutError):
    pass


class ServerRejected(RuntimeError):
    """The server answered with an Error frame."""

    def __init__(self, code: int, reason: str):
        super().__init__(f"server error 0x{code:02x}: {reason}")
        self.code = code
        self.reason = reason


class ConnectionClosed(ConnectionError):
    pass


def _recv_exact(sock: socket.socket, n: int, *, at_boundary: bool = False) -> bytes:
    chunks = []
    got = 0
    while got < n:
        chunk = sock.recv(min(n - got, 1 << 20))
        if not chunk:
            if at_boundary and got == 0:
                raise ConnectionClosed("peer closed the connection")
            raise TruncatedFrame(f"connection closed after {got} of {n} bytes")
        chunks.append(chunk)
        got += len(chunk)
    return b"".join(chunks)


def read_frame(sock: socket.socket):
    msg_type, length = parse_header(_recv_exact(sock, HEADER_SIZE, at_boundary=True))
    return decode_body(msg_type, _recv_exact(sock, length))


def send_frame(sock: socket.socket, msg) -> None:
    sock.sendall(encode_frame(msg))


# -- server --------------------------------------------------------------------


class _SessionHandler(socketserver.BaseRequestHandler):
    def handle(self):
        sock = self.request
        sock.settimeout(self.server.phase_timeout)
        session = ServerSession(self.server.models, self.server.backends)
        peer = "%s:%s" % self.client_address[:2]
        log.info("session open from %s", peer)
        try:
            while not session.done:
                try:
                    msg = read_frame(sock)
                except ConnectionClosed:
                    break
                except DecodeError as exc:
                    replies = session.abort(ErrorCode.MALFORMED, str(exc))
                else:
                    replies = session.handle(msg)
                for reply in replies:
                    send_frame(sock, reply)
        except (socket.timeout, OSError) as exc:
            log.info("session %s ended: %s", peer, type(exc).__name__)
            return
        _drain_and_close(sock)
        log.info("session %s closed in phase %s", peer, session.phase.value)


def _drain_and_close(sock: socket.socket) -> None:
    # half-close and read to EOF so the client receives our last frame
    # instead of a reset caused by its unread data
    try:
        sock.shutdown(socket.SHUT_WR)
        sock.settimeout(2.0)
        while sock.recv(1 << 16):
            pass
    except OSError:
        pass


class HhemlServer(socketserver.TCPServer):
    allow_reuse_address = False

    def __init__(self, address, models: Mapping[str, LinearModel], backends=("transparent", "bfv-toy"),
                 phase_timeout: float = PHASE_TIMEOUT):
        self.models = dict(models)
        self.backends = tuple(backends)
        self.phase_timeout = phase_timeout
        super().__init__(address, _SessionHandler)


class ThreadingHhemlServer(socketserver.ThreadingMixIn, HhemlServer):
    daemon_threads = True


def make_server(host: str, port: int, models, backends=("transparent", "bfv-toy"), concurrent: bool = False,
                phase_timeout: float = PHASE_TIMEOUT) -> HhemlServer:
    cls = ThreadingHhemlServer if concurrent else HhemlServer
    return cls((host, port), models, backends, phase_timeout)


def server_loop(server: HhemlServer) -> None:
    """Serve sessions until ``server.shutdown()`` is called from another thread."""
    try:
        server.serve_forever()
    finally:
        server.server_close()


# -- client --------------------------------------------------------------------


def _expect(sock, kind):
    try:
        msg = read_frame(sock)
    except socket.timeout:
        raise SessionTimeout("no reply from server within the phase timeout") from None
    if isinstance(msg, Error):
        raise ServerRejected(msg.code, msg.reason)
    if not isinstance(msg, kind):
        raise ServerRejected(int(ErrorCode.BAD_PHASE), f"unexpected {type(msg).__name__}")
    return msg


def client_session(
    endpoint,
    pasta_key: PastaSecretKey,
    pasta_params: PastaParams,
    he_keys: tuple[HeSecretKey, HePublicMaterial],
    message_words: Sequence[int],
    model_id: str,
    nonce: int | None = None,
    timeout: float = PHASE_TIMEOUT,
    rng: random.Random | None = None,
) -> list[int]:
    """Run one upload-and-infer exchange and return the decrypted scores mod p.

    ``endpoint`` is a ``(host, port)`` pair or an already connected socket.
    """
    he_sk, he_pub = he_keys
    rng = rng or random.Random()
    if nonce is None:
        nonce = rng.getrandbits(64)
    own = not isinstance(endpoint, socket.socket)
    sock = socket.create_connection(endpoint, timeout=timeout) if own else endpoint
    sock.settimeout(timeout)
    try:
        send_frame(sock, ClientHello(pasta_params, he_pub.params))
        hello = _expect(sock, ServerHello)
        if not hello.accepted:
            raise ServerRejected(int(ErrorCode.BAD_PARAMS), "server declined the parameters")
        ek = encrypt_pasta_key(he_pub, pasta_key, pasta_params, rng)
        ct = encrypt(pasta_key, nonce, message_words, pasta_params)
        try:
            send_frame(sock, KeyProvision(he_pub, ek))
            send_frame(sock, DataUpload(ct.nonce, ct.words))
            send_frame(sock, InferRequest(model_id))
        except (BrokenPipeError, ConnectionResetError):
            pass  # the server aborted early; its Error frame is still readable
        result = _expect(sock, ResultCiphertexts)
        return [he_decrypt(he_sk, c) for c in result.cts]
    except socket.timeout:
        raise SessionTimeout("server did not respond within the phase timeout") from None
    finally:
        if own:
            sock.close()
