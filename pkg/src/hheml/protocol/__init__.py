"""Client/server protocol: wire frames, the session state machine, TCP transport."""

from .net import (
    DEFAULT_PORT,
    HhemlServer,
    ServerRejected,
    SessionTimeout,
    client_session,
    default_port,
    make_server,
    server_loop,
)
from .session import Phase, ServerSession
from .wire import (
    BadMagic,
    BadVersion,
    ClientHello,
    DataUpload,
    Error,
    ErrorCode,
    FrameError,
    InferRequest,
    KeyProvision,
    MsgType,
    OversizedFrame,
    ResultCiphertexts,
    ServerHello,
    TruncatedFrame,
    UnknownType,
    decode_frame,
    encode_frame,
)
