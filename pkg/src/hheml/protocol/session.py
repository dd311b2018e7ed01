"""Server session state machine, independent of any transport."""

from __future__ import annotations

import logging
from enum import Enum
from typing import Mapping

from ..he import TRANSPARENT, BFV_TOY, make_evaluator
from ..pasta import SymCiphertext
from ..transcipher import LinearModel, he_linear_model, transcipher
from .wire import (
    ClientHello,
    DataUpload,
    Error,
    ErrorCode,
    InferRequest,
    KeyProvision,
    ResultCiphertexts,
    ServerHello,
)

log = logging.getLogger(__name__)


class Phase(Enum):
    AWAIT_HELLO = "AwaitHello"
    AWAIT_KEYS = "AwaitKeys"
    AWAIT_DATA = "AwaitData"
    EVALUATING = "Evaluating"
    DONE = "Done"


# the one message type each phase accepts
EXPECTED = {
    Phase.AWAIT_HELLO: ClientHello,
    Phase.AWAIT_KEYS: KeyProvision,
    Phase.AWAIT_DATA: DataUpload,
    Phase.EVALUATING: InferRequest,
}


class SessionAbort(Exception):
    def __init__(self, code: ErrorCode, reason: str):
        super().__init__(reason)
        self.code = code
        self.reason = reason


class ServerSession:
    """One client's state: negotiated params, evaluator, encrypted key, data.

    ``handle`` maps one inbound message to the replies to send.  Any
    violation produces a single ``Error`` reply and ends the session.
    """

    def __init__(self, models: Mapping[str, LinearModel], backends=(TRANSPARENT, BFV_TOY)):
        self.models = models
        self.backends = tuple(backends)
        self.phase = Phase.AWAIT_HELLO
        self.pasta_params = None
        self.he_params = None
        self._evaluator = None
        self._key = None
        self._data: SymCiphertext | None = None

    @property
    def done(self) -> bool:
        return self.phase is Phase.DONE

    def handle(self, msg) -> list:
        expected = EXPECTED.get(self.phase)
        try:
            if expected is None or not isinstance(msg, expected):
                raise SessionAbort(
                    ErrorCode.BAD_PHASE,
                    f"{type(msg).__name__} not allowed in phase {self.phase.value}",
                )
            handler = getattr(self, f"_on_{type(msg).__name__}")
            return handler(msg)
        except SessionAbort as exc:
            log.info("session aborted: code=%s (%s)", exc.code.name, exc.reason)
            self.phase = Phase.DONE
            return [Error(int(exc.code), exc.reason)]
        except Exception as exc:
            log.exception("internal error while handling %s", type(msg).__name__)
            self.phase = Phase.DONE
            return [Error(int(ErrorCode.INTERNAL), type(exc).__name__)]

    def abort(self, code: ErrorCode, reason: str) -> list:
        self.phase = Phase.DONE
        return [Error(int(code), reason)]

    def _on_ClientHello(self, msg: ClientHello):
        if msg.he.kind not in self.backends:
            raise SessionAbort(ErrorCode.BAD_PARAMS, f"backend {msg.he.kind} not offered")
        if msg.he.plaintext_modulus != msg.pasta.p:
            raise SessionAbort(ErrorCode.BAD_PARAMS, "HE plaintext modulus must equal the Pasta prime")
        self.pasta_params, self.he_params = msg.pasta, msg.he
        self.phase = Phase.AWAIT_KEYS
        log.info("hello: p=%d t=%d r=%d backend=%s", msg.pasta.p, msg.pasta.t, msg.pasta.r, msg.he.kind)
        return [ServerHello(True, msg.pasta, msg.he)]

    def _on_KeyProvision(self, msg: KeyProvision):
        key = msg.key
        if msg.public.params != self.he_params or key.he_params != self.he_params:
            raise SessionAbort(ErrorCode.BAD_PARAMS, "key material does not match negotiated HE params")
        if key.pasta_params != self.pasta_params:
            raise SessionAbort(ErrorCode.BAD_PARAMS, "encrypted key does not match negotiated Pasta params")
        if any(ct.depth != 0 for ct in key.words):
            raise SessionAbort(ErrorCode.BAD_PARAMS, "encrypted key words must be fresh ciphertexts")
        self._evaluator = make_evaluator(msg.public)
        self._key = key
        self.phase = Phase.AWAIT_DATA
        log.info("keys provisioned: %d encrypted words", len(key.words))
        return []

    def _on_DataUpload(self, msg: DataUpload):
        if msg.word_count == 0:
            raise SessionAbort(ErrorCode.EMPTY_DATA, "upload contains no words")
        p = self.pasta_params.p
        if any(w >= p for w in msg.words):
            raise SessionAbort(ErrorCode.MALFORMED, "uploaded words must be reduced mod p")
        self._data = SymCiphertext(msg.nonce, msg.words)
        self.phase = Phase.EVALUATING
        log.info("data uploaded: %d words", msg.word_count)
        return []

    def _on_InferRequest(self, msg: InferRequest):
        model = self.models.get(msg.model_id)
        if model is None:
            raise SessionAbort(ErrorCode.UNKNOWN_MODEL, f"no model named {msg.model_id!r}")
        if model.n_features != self._data.word_count:
            raise SessionAbort(
                ErrorCode.BAD_PARAMS,
                f"model expects {model.n_features} features, upload has {self._data.word_count}",
            )
        ev = self._evaluator
        features = transcipher(ev, self._key, self._data)
        scores = he_linear_model(ev, features, model.weights, model.bias, model.square)
        self.phase = Phase.DONE
        log.info("inference done: model=%s classes=%d", msg.model_id, len(scores))
        return [ResultCiphertexts(self.he_params, tuple(scores))]
