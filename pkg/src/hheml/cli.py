"""Command line entry point: ``hheml <verb> [options]``.

Verbs: keygen, encrypt, decrypt, serve, infer, simulate, bench, vectors.
A JSON config file (``--config``) may supply any long option by name
(dashes become underscores); explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys
import time
from pathlib import Path

from . import aes, pasta, pipeline_sim
from .codec import DecodeError
from .files import (
    decode_container,
    encode_container,
    load_pasta_key,
    read_words,
    save_pasta_key,
    write_words,
)
from .he import KINDS, HeError, deep_params, default_params, he_keygen
from .he.serialize import dump_keys, load_keys
from .pasta import PastaParams
from .protocol import DEFAULT_PORT, ServerRejected, client_session, make_server, server_loop
from .transcipher import LinearModel, demo_model

log = logging.getLogger("hheml")

DEFAULT_MODEL_ID = "mnist-linear"
PASTA_KEY_FILE = "pasta.key"
HE_KEY_FILE = "he.key"

DEFAULTS = {
    "profile": "pasta4-edge",
    "backend": "transparent",
    "he_profile": "default",
    "host": "127.0.0.1",
    "model_id": DEFAULT_MODEL_ID,
    "timeout": 30.0,
    "units": 2,
    "words": pipeline_sim.MNIST_WORDS,
    "latency_us": 66.1,
    "words_per_block": pipeline_sim.WORDS_PER_BLOCK,
    "cipher": "pasta",
    "bytes": 1_000_000,
    "count": 10,
}


class CliError(Exception):
    pass


def resolve_params(opts) -> PastaParams:
    if opts.p is not None or opts.t is not None or opts.r is not None:
        if None in (opts.p, opts.t, opts.r):
            raise CliError("custom profiles need all of --p, --t and --r")
        return PastaParams(opts.p, opts.t, opts.r)
    return pasta.get_profile(opts.profile)


def he_params_for(kind: str, p: int, he_profile: str):
    if he_profile == "default":
        return default_params(kind, p)
    if he_profile == "deep":
        return deep_params(kind, p)
    raise CliError(f"unknown HE profile {he_profile!r} (default|deep)")


def _rng(seed):
    return random.Random(seed) if seed is not None else random.SystemRandom()


def cmd_keygen(opts) -> int:
    params = resolve_params(opts)
    out = Path(opts.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = _rng(opts.seed)
    key = pasta.generate_key(params, rng)
    he_seed = opts.seed if opts.seed is not None else random.SystemRandom().getrandbits(64)
    sk, pub = he_keygen(he_params_for(opts.backend, params.p, opts.he_profile), he_seed)
    save_pasta_key(out / PASTA_KEY_FILE, params, key)
    (out / HE_KEY_FILE).write_bytes(dump_keys(sk, pub))
    print(f"wrote {out / PASTA_KEY_FILE} ({len(key.words)} words) and {out / HE_KEY_FILE}")
    return 0


def cmd_encrypt(opts) -> int:
    params, key = load_pasta_key(opts.key)
    nonce = opts.nonce if opts.nonce is not None else random.SystemRandom().getrandbits(64)
    ct = pasta.encrypt(key, nonce, read_words(opts.input), params)
    Path(opts.output).write_bytes(encode_container(params, ct))
    return 0


def cmd_decrypt(opts) -> int:
    params, key = load_pasta_key(opts.key)
    file_params, ct = decode_container(Path(opts.input).read_bytes())
    if (file_params.p, file_params.t, file_params.r) != (params.p, params.t, params.r):
        raise CliError("ciphertext parameters do not match the key")
    write_words(opts.output, pasta.decrypt(key, ct, params))
    return 0


def load_models(opts) -> dict:
    models = {}
    for path in opts.model or []:
        obj = json.loads(Path(path).read_text())
        model_id = obj.get("id", Path(path).stem)
        models[model_id] = LinearModel.from_json(obj)
    if not models:
        models[DEFAULT_MODEL_ID] = demo_model(65537, pipeline_sim.MNIST_WORDS, 10, seed=0)
    return models


def cmd_serve(opts) -> int:
    backends = opts.backends.split(",") if opts.backends else list(KINDS)
    server = make_server(opts.host, opts.port, load_models(opts), backends, concurrent=opts.concurrent,
                         phase_timeout=opts.timeout)
    host, port = server.server_address[:2]
    print(f"listening on {host}:{port}", flush=True)
    try:
        server_loop(server)
    except KeyboardInterrupt:
        pass
    return 0


def cmd_infer(opts) -> int:
    keys = Path(opts.keys)
    params, key = load_pasta_key(keys / PASTA_KEY_FILE)
    sk, pub = load_keys((keys / HE_KEY_FILE).read_bytes())
    words = read_words(opts.data)
    scores = client_session(
        (opts.host, opts.port), key, params, (sk, pub), words, opts.model_id,
        nonce=opts.nonce, timeout=opts.timeout, rng=_rng(opts.seed),
    )
    print("class\tscore")
    for i, s in enumerate(scores):
        print(f"{i}\t{s}")
    print(f"argmax\t{max(range(len(scores)), key=scores.__getitem__)}")
    return 0


def cmd_simulate(opts) -> int:
    workload = pipeline_sim.WorkloadSpec(opts.words)
    units = [int(u) for u in opts.compare.split(",")] if opts.compare else sorted({1, opts.units})
    reports = pipeline_sim.compare_configs(workload, opts.latency_us, units, opts.words_per_block)
    print(pipeline_sim.format_table(reports))
    if opts.trace:
        chosen = next(r for r in reports if r.xof_units == (units[-1] if opts.compare else opts.units))
        Path(opts.trace).write_text(pipeline_sim.trace_csv(chosen))
    return 0


def cmd_bench(opts) -> int:
    n = opts.bytes
    rng = random.Random(opts.seed if opts.seed is not None else 0)
    if opts.cipher == "pasta":
        params = resolve_params(opts)
        key = pasta.generate_key(params, rng)
        words = [rng.randrange(params.p) for _ in range(n // 4)]
        start = time.perf_counter()
        pasta.encrypt(key, rng.getrandbits(64), words, params)
        elapsed = time.perf_counter() - start
        units, count = "words", len(words)
    elif opts.cipher == "aes":
        data = rng.randbytes(n)
        start = time.perf_counter()
        aes.ctr_wrap(rng.randbytes(16), rng.randbytes(16), data)
        elapsed = time.perf_counter() - start
        units, count = "blocks", -(-n // 16)
    else:
        raise CliError(f"unknown cipher {opts.cipher!r}")
    rate = count / elapsed if elapsed > 0 else float("inf")
    print("cipher\tbytes\tunits\tseconds\tper_second")
    print(f"{opts.cipher}\t{n}\t{units}\t{elapsed:.3f}\t{rate:.1f}")
    return 0


def cmd_vectors(opts) -> int:
    params = resolve_params(opts)
    lines = pasta.emit_vectors(params, opts.count, opts.seed if opts.seed is not None else 0)
    text = "\n".join(lines) + "\n"
    if opts.output:
        Path(opts.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


COMMANDS = {
    "keygen": cmd_keygen,
    "encrypt": cmd_encrypt,
    "decrypt": cmd_decrypt,
    "serve": cmd_serve,
    "infer": cmd_infer,
    "simulate": cmd_simulate,
    "bench": cmd_bench,
    "vectors": cmd_vectors,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hheml", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON file supplying option values")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def profile_opts(p):
        p.add_argument("--profile", help="pasta4-edge (default) or pasta3-edge")
        p.add_argument("--p", type=int)
        p.add_argument("--t", type=int)
        p.add_argument("--r", type=int)

    def net_opts(p):
        p.add_argument("--host")
        p.add_argument("--port", type=int)
        p.add_argument("--timeout", type=float, help="seconds per protocol phase")

    p = sub.add_parser("keygen", help="generate Pasta and HE keys")
    profile_opts(p)
    p.add_argument("--backend", choices=KINDS)
    p.add_argument("--he-profile", choices=("default", "deep"))
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int)

    for verb in ("encrypt", "decrypt"):
        p = sub.add_parser(verb, help=f"{verb} a word file")
        p.add_argument("--key", required=True)
        p.add_argument("--in", dest="input", required=True)
        p.add_argument("--out", dest="output", required=True)
        if verb == "encrypt":
            p.add_argument("--nonce", type=int)

    p = sub.add_parser("serve", help="run the transciphering server")
    net_opts(p)
    p.add_argument("--model", action="append", help="model JSON file (repeatable)")
    p.add_argument("--backends", help="comma-separated backends to accept")
    p.add_argument("--concurrent", action="store_true", help="serve sessions in threads")

    p = sub.add_parser("infer", help="encrypt data, run remote inference, decrypt scores")
    net_opts(p)
    p.add_argument("--keys", required=True, help="directory written by keygen")
    p.add_argument("--data", required=True, help="word file")
    p.add_argument("--model-id")
    p.add_argument("--nonce", type=int)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("simulate", help="XOF pipeline round/latency model")
    p.add_argument("--units", type=int)
    p.add_argument("--words", type=int)
    p.add_argument("--latency-us", type=float)
    p.add_argument("--words-per-block", type=int)
    p.add_argument("--compare", help="comma-separated unit counts")
    p.add_argument("--trace", help="write the slot/unit/block trace as CSV")

    p = sub.add_parser("bench", help="cipher throughput")
    profile_opts(p)
    p.add_argument("--cipher", choices=("pasta", "aes"))
    p.add_argument("--bytes", type=int)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("vectors", help="emit keystream test vectors")
    profile_opts(p)
    p.add_argument("--count", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", dest="output")
    return parser


def _apply_config(opts) -> None:
    config = {}
    if opts.config:
        config = json.loads(Path(opts.config).read_text())
        if not isinstance(config, dict):
            raise CliError("config file must hold a JSON object")
    for name, value in vars(opts).items():
        if value is not None:
            continue
        if name in config:
            setattr(opts, name, config[name])
        elif name == "port":
            setattr(opts, name, int(os.environ.get("HHEML_PORT", DEFAULT_PORT)))
        elif name in DEFAULTS:
            setattr(opts, name, DEFAULTS[name])


def main(argv=None) -> int:
    parser = build_parser()
    opts = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if opts.verbose else logging.WARNING,
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    try:
        _apply_config(opts)
        return COMMANDS[opts.command](opts)
    except (CliError, ValueError, HeError, DecodeError, ServerRejected, OSError, KeyError) as exc:
        print(f"hheml {opts.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
