"""Command-line surface: a thin client over the lab service.

Every command serializes its arguments into a service request and renders
the service's JSON reply. By default the requests run against an in-process
instance of the FastAPI app; pass --server to talk to a running one
instead. Rationals cross this boundary as "num/den" strings; decimal
renderings are opt-in (--decimal) and labeled approximate. Reports are
byte-identical across reruns except for the timestamp field, which
--no-timestamp suppresses.

Exit codes: 0 success; 2 uncertified result under --strict; 1 usage or
internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from datetime import datetime, timezone

import httpx


class CliError(Exception):
    def __init__(self, message: str, code: int = 1):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, never a partial run
        raise CliError(f"usage error: {message}", code=1)


class ServiceClient:
    """HTTP client for the lab service; in-process ASGI when no --server."""

    def __init__(self, server: str | None):
        if server:
            self._client = httpx.Client(base_url=server, timeout=600.0)
        else:
            from fastapi.testclient import TestClient

            from .service.app import app

            self._client = TestClient(app)

    def post(self, path: str, payload: dict) -> dict:
        response = self._client.post(path, json=payload)
        if response.status_code >= 400:
            try:
                detail = response.json().get("detail", response.text)
            except Exception:
                detail = response.text
            raise CliError(f"service error ({response.status_code}): {detail}")
        return response.json()


def _pair_str(pair: dict) -> str:
    return f"{pair['num']}/{pair['den']}"


def _pair_decimal(pair: dict) -> str:
    return f"{pair['num'] / pair['den']:.12g}"


def _emit(text: str, output: str | None):
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_report(payload: dict, args) -> str:
    report = dict(payload)
    if not args.no_timestamp:
        report["generated_at"] = datetime.now(timezone.utc).isoformat()
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_prior(args, client: ServiceClient) -> int:
    payload = client.post(
        "/prior",
        {
            "kind": args.kind,
            "x": args.x,
            "epsilon": args.eps,
            "k_cap": args.k_cap,
            "workers": args.workers,
        },
    )
    if args.format == "text":
        lines = [
            f"kind={payload['kind']} x={payload['x'] or '(empty)'}",
            f"lower={_pair_str(payload['lower'])} tail={_pair_str(payload['tail'])}",
            f"k={payload['k']} certified={payload['certified']} "
            f"phases_needed={payload['phases_needed']}",
        ]
        if args.decimal:
            lines.append(
                f"lower~={_pair_decimal(payload['lower'])} (approximate rendering)"
            )
        _emit("\n".join(lines) + "\n", args.output)
    else:
        _emit(_json_report(payload, args), args.output)
    if args.strict and not payload["certified"]:
        return 2
    return 0


def _cmd_conditional(args, client: ServiceClient) -> int:
    payload = client.post(
        "/conditional",
        {
            "kind": args.kind,
            "prefix": args.prefix,
            "bit": args.bit,
            "epsilon": args.eps,
            "k_cap": args.k_cap,
        },
    )
    _emit(_json_report(payload, args), args.output)
    return 0


def _cmd_enumerate(args, client: ServiceClient) -> int:
    payload = client.post(
        "/enumerate", {"k": args.k, "mode": args.mode, "workers": args.workers}
    )
    if args.format == "jsonl":
        lines = [
            json.dumps(rec, separators=(", ", ": ")) for rec in payload["records"]
        ]
        _emit("\n".join(lines) + ("\n" if lines else ""), args.output)
    else:
        _emit(_json_report(payload, args), args.output)
    return 0


def _cmd_decoder(args, client: ServiceClient) -> int:
    payload = client.post(
        "/decoder",
        {
            "measure": args.measure,
            "op": args.op,
            "x": args.x,
            "input_bits": args.input,
            "max_output": args.max_output,
            "depth": args.depth,
        },
    )
    _emit(_json_report(payload, args), args.output)
    return 0


_TRACE_COLUMNS = [
    "t",
    "x_t",
    "y_t",
    "loss",
    "cond0_low",
    "cond0_high",
    "cond1_low",
    "cond1_high",
    "k_used",
    "certified",
    "cum_loss",
    "cum_informed_loss",
]


def _trace_csv(payload: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(_TRACE_COLUMNS)
    for s in payload["steps"]:
        writer.writerow(
            [
                s["t"],
                s["x_t"],
                s["y_t"],
                _pair_str(s["loss"]),
                _pair_str(s["cond0_low"]),
                _pair_str(s["cond0_high"]),
                _pair_str(s["cond1_low"]),
                _pair_str(s["cond1_high"]),
                s["k_used"],
                s["certified"],
                _pair_str(s["cum_loss"]),
                _pair_str(s["cum_informed_loss"]),
            ]
        )
    return buf.getvalue()


def _cmd_predict(args, client: ServiceClient) -> int:
    payload = client.post(
        "/predict",
        {
            "env": args.env,
            "kind": args.kind,
            "n": args.n,
            "epsilon": args.eps,
            "seed": args.seed,
            "tie_break": args.tie_break,
            "k_cap": args.k_cap,
            "workers": args.workers,
            "max_n": args.max_n,
        },
    )
    if args.format == "csv":
        _emit(_trace_csv(payload), args.output)
    else:
        report = dict(payload)
        if not args.full_trace:
            report.pop("steps")
        _emit(_json_report(report, args), args.output)
    if args.strict and payload["uncertified_steps"]:
        return 2
    return 0


def _cmd_adversarial(args, client: ServiceClient) -> int:
    payload = client.post(
        "/adversarial",
        {"kind": args.kind, "epsilon": args.eps, "n": args.n, "k_cap": args.k_cap},
    )
    if args.format == "text":
        _emit(payload["x"] + "\n", args.output)
    else:
        _emit(_json_report(payload, args), args.output)
    return 0


def _cmd_verify(args, client: ServiceClient) -> int:
    params = {}
    if args.k is not None:
        params["k"] = args.k
    for item in args.param or []:
        key, _, raw = item.partition("=")
        if not _:
            raise CliError(f"usage error: --param expects key=value, got {item!r}")
        params[key] = int(raw)
    payload = client.post("/verify", {"suite": args.suite, "params": params})
    status = "PASS" if payload["passed"] else "FAIL"
    if args.format == "text":
        _emit(f"[{status}] {payload['suite']}: {json.dumps(payload['details'], sort_keys=True)}\n", args.output)
    else:
        _emit(_json_report(payload, args), args.output)
    return 0 if payload["passed"] else 1


def _cmd_serve(args, _client) -> int:
    import uvicorn

    uvicorn.run("speedprior.service.app:app", host=args.host, port=args.port)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> _Parser:
    parser = _Parser(prog="speedprior", description=__doc__)
    parser.add_argument("--server", default=None, help="base URL of a running service; default in-process")
    parser.add_argument("--config", default=None, help="flat key=value file mirroring flags")
    parser.add_argument("--output", default=None, help="write the report to a file instead of stdout")
    parser.add_argument("--no-timestamp", action="store_true", help="suppress the timestamp field")
    parser.add_argument("--decimal", action="store_true", help="add approximate decimal renderings")
    sub = parser.add_subparsers(dest="command", required=True)

    def common_prior(p):
        p.add_argument("--kind", choices=["kt", "fast"], required=True)
        p.add_argument("--eps", default="1/2", help="epsilon as num/den")
        p.add_argument("--k-cap", type=int, default=20, dest="k_cap")

    p = sub.add_parser("prior", help="certified prior estimate for a string")
    common_prior(p)
    p.add_argument("--x", default="")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--strict", action="store_true", help="exit 2 if the result is uncertified")
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.set_defaults(handler=_cmd_prior)

    p = sub.add_parser("conditional", help="certified enclosure of S(bit | prefix)")
    common_prior(p)
    p.add_argument("--prefix", default="")
    p.add_argument("--bit", choices=["0", "1"], required=True)
    p.set_defaults(handler=_cmd_conditional)

    p = sub.add_parser("enumerate", help="ledger of computations up to a phase")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mode", choices=["naive", "tree"], default="tree")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=["jsonl", "json"], default="jsonl")
    p.set_defaults(handler=_cmd_enumerate)

    p = sub.add_parser("decoder", help="decoder-machine operations for a measure")
    p.add_argument("--measure", default="uniform")
    p.add_argument("--op", choices=["run", "km", "mass", "interval", "eval"], required=True)
    p.add_argument("--x", default="")
    p.add_argument("--input", default="", help="input bits for --op run")
    p.add_argument("--max-output", type=int, default=64, dest="max_output")
    p.add_argument("--depth", type=int, default=12)
    p.set_defaults(handler=_cmd_decoder)

    p = sub.add_parser("predict", help="run a prediction experiment")
    p.add_argument("--env", default="detseq:alternating")
    p.add_argument("--kind", choices=["kt", "fast"], default="fast")
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--eps", default="1/2")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tie-break", choices=["0", "1"], default="0", dest="tie_break")
    p.add_argument("--k-cap", type=int, default=20, dest="k_cap")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--max-n", type=int, default=None, dest="max_n",
                   help="override the desk-scale budget on n")
    p.add_argument("--strict", action="store_true", help="exit 2 if any step is uncertified")
    p.add_argument("--full-trace", action="store_true", help="include per-step rows in JSON")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(handler=_cmd_predict)

    p = sub.add_parser("adversarial", help="adversarial sequence against a prior")
    common_prior(p)
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.set_defaults(handler=_cmd_adversarial)

    p = sub.add_parser("verify", help="run a named verification suite")
    p.add_argument("--suite", required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--param", action="append", help="extra suite parameter key=value (int)")
    p.add_argument("--format", choices=["json", "text"], default="text")
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("serve", help="run the service with uvicorn")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(handler=_cmd_serve)

    return parser


def _apply_config(parser: _Parser, argv: list[str]) -> list[str]:
    """Load a flat key=value config file as parser defaults (flags override)."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise CliError("usage error: --config requires a path")
    path = argv[idx + 1]
    defaults = {}
    try:
        with open(path) as fh:
            for raw in fh:
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                key, sep, value = line.partition("=")
                if not sep:
                    raise CliError(f"usage error: malformed config line {line!r}")
                defaults[key.strip().replace("-", "_")] = value.strip()
    except OSError as exc:
        raise CliError(f"cannot read config {path!r}: {exc}")
    for key, value in defaults.items():
        if value.isdigit() or (value.startswith("-") and value[1:].isdigit()):
            defaults[key] = int(value)
        elif value in ("true", "false"):
            defaults[key] = value == "true"
    parser.set_defaults(**defaults)
    for action in parser._actions:  # subparser defaults would shadow these otherwise
        if isinstance(action, argparse._SubParsersAction):
            for sub in action.choices.values():
                sub.set_defaults(**defaults)
    return argv


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config(parser, argv)
        args = parser.parse_args(argv)
        if args.command == "serve":
            return args.handler(args, None)
        client = ServiceClient(args.server)
        return args.handler(args, client)
    except CliError as exc:
        print(str(exc), file=sys.stderr)
        return exc.code
    except Exception as exc:  # internal error, never a partial report
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
