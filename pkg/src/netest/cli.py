"""Command-line client for the design service.

The CLI is a thin HTTP client: it loads files, inlines any references, posts
the request to the service, and formats the response.  By default it mounts
the service in-process (no server needed); ``--server URL`` targets a
running instance instead.

Exit codes: 0 success, 2 parse failure, 3 infeasible or singular instance,
4 unsupported structure, 5 verification failure.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from pathlib import Path

import httpx

from .errors import SpecParseError
from .problem import inline_problem_dict
from .solver import canonical_json

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INFEASIBLE = 3
EXIT_UNSUPPORTED = 4
EXIT_VERIFICATION = 5

_EXIT_BY_CODE = {
    "parse": EXIT_PARSE,
    "infeasible": EXIT_INFEASIBLE,
    "singular": EXIT_INFEASIBLE,
    "unsupported-structure": EXIT_UNSUPPORTED,
}


class _Client:
    """HTTP access to the service, in-process unless a server URL is given."""

    def __init__(self, server: str | None):
        self._server = server.rstrip("/") if server else None
        self._sync = (
            httpx.Client(base_url=self._server, timeout=300.0) if self._server else None
        )

    def post(self, path: str, payload: dict) -> dict:
        if self._sync is not None:
            response = self._sync.post(path, json=payload)
        else:
            response = asyncio.run(self._post_inprocess(path, payload))
        if response.status_code != 200:
            raise _ServiceError(response)
        return response.json()

    @staticmethod
    async def _post_inprocess(path: str, payload: dict) -> httpx.Response:
        from .service.app import app

        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://netest.local", timeout=300.0
        ) as client:
            return await client.post(path, json=payload)

    def close(self) -> None:
        if self._sync is not None:
            self._sync.close()


class _ServiceError(Exception):
    def __init__(self, response: httpx.Response):
        self.status_code = response.status_code
        try:
            detail = response.json().get("detail")
        except (ValueError, AttributeError):
            detail = None
        if isinstance(detail, dict) and "code" in detail:
            self.code = str(detail["code"])
            self.message = str(detail.get("message", ""))
        else:
            # pydantic validation errors arrive as a list of location dicts
            self.code = "parse"
            self.message = json.dumps(detail) if detail is not None else response.text
        super().__init__(self.message)

    @property
    def exit_code(self) -> int:
        return _EXIT_BY_CODE.get(self.code, 1)


def _fail(code: str, message: str, exit_code: int) -> int:
    sys.stderr.write(canonical_json({"error": {"code": code, "message": message}}) + "\n")
    return exit_code


def _emit(doc: dict, output: str | None) -> None:
    text = canonical_json(doc)
    print(text)
    if output:
        Path(output).write_text(text + "\n")


def _load_json(path: str, what: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise SpecParseError(f"cannot read {what} {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecParseError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc


def _apply_option_overrides(doc: dict, args: argparse.Namespace) -> dict:
    options = dict(doc.get("options") or {})
    if getattr(args, "tol", None) is not None:
        options["tol"] = args.tol
    if getattr(args, "allow_extra_agents", False):
        options["allow_extra_agents"] = True
    if getattr(args, "seed", None) is not None:
        options["seed"] = args.seed
    out = dict(doc)
    if options:
        out["options"] = options
    return out


def _cmd_analyze(args: argparse.Namespace, client: _Client) -> int:
    doc = _apply_option_overrides(inline_problem_dict(args.input), args)
    result = client.post("/analyze", {"system": doc["system"]})
    _emit(result, args.output)
    return EXIT_OK


def _cmd_design(args: argparse.Namespace, client: _Client) -> int:
    doc = _apply_option_overrides(inline_problem_dict(args.input), args)
    if doc.get("delta") is None or doc.get("eta") is None:
        return _fail("parse", "design needs 'delta' and 'eta' in the problem file", EXIT_PARSE)
    payload = {
        "system": doc["system"],
        "delta": doc["delta"],
        "eta": doc["eta"],
        "options": doc.get("options") or {},
    }
    result = client.post("/design", payload)
    solution = result["solution"]
    _emit(solution, args.output)
    if args.dot:
        _write_dot_files(doc, solution, Path(args.dot))
    return EXIT_OK


def _write_dot_files(problem_doc: dict, solution: dict, dot_dir: Path) -> None:
    from .digraph import scc_decompose
    from .dot import network_dot, system_dot
    from .problem import problem_from_dict

    problem = problem_from_dict(problem_doc)
    dec = scc_decompose(problem.digraph)
    measured = {c for _r, c in solution["measurement_pattern"]["entries"]}
    tree = [tuple(e) for e in solution["tree_edges"]]
    agents = solution["network_pattern"]["rows"]
    dot_dir.mkdir(parents=True, exist_ok=True)
    (dot_dir / "system.dot").write_text(system_dot(problem.digraph, dec, measured))
    (dot_dir / "network.dot").write_text(network_dot(tree, agents))


def _cmd_verify(args: argparse.Namespace, client: _Client) -> int:
    doc = inline_problem_dict(args.input)
    solution = _load_json(args.solution, "solution file")
    payload = {
        "system": doc["system"],
        "solution": solution,
        "oracle_trials": args.oracle or 0,
        "seed": args.seed if args.seed is not None else 0,
    }
    result = client.post("/verify", payload)
    _emit(result, args.output)
    if not result["observable"]:
        return EXIT_VERIFICATION
    return EXIT_OK


def _cmd_discretize(args: argparse.Namespace, client: _Client) -> int:
    matrix = _load_json(args.input, "matrix file")
    if not isinstance(matrix, list):
        return _fail("parse", f"{args.input}: expected a JSON 2-D array", EXIT_PARSE)
    payload = {
        "matrix": matrix,
        "sample_time": args.sample_time,
        "method": args.method,
    }
    if args.tol is not None:
        payload["tol"] = args.tol
    result = client.post("/discretize", payload)
    _emit(result, args.output)
    return EXIT_OK


def _cmd_oracle(args: argparse.Namespace, client: _Client) -> int:
    doc = inline_problem_dict(args.input)
    if args.measured is not None:
        try:
            measured = [int(tok) for tok in args.measured.replace(",", " ").split()]
        except ValueError:
            return _fail("parse", f"--measured {args.measured!r} is not a list of integers", EXIT_PARSE)
    elif args.solution is not None:
        solution = _load_json(args.solution, "solution file")
        try:
            measured = sorted({int(e[1]) for e in solution["measurement_pattern"]["entries"]})
        except (KeyError, TypeError, IndexError):
            return _fail("parse", f"{args.solution}: malformed solution document", EXIT_PARSE)
    else:
        return _fail("parse", "oracle needs --measured or --solution", EXIT_PARSE)
    payload = {
        "system": doc["system"],
        "measured_states": measured,
        "trials": args.trials,
        "seed": args.seed if args.seed is not None else 0,
    }
    result = client.post("/oracle", payload)
    _emit(result, args.output)
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace, _client: _Client | None) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netest",
        description="Minimum-cost networked estimation design toolkit",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", required=True, help="problem or matrix JSON file")
    common.add_argument("--output", help="also write the JSON result to this file")
    common.add_argument("--seed", type=int, default=None, help="random seed")
    common.add_argument("--tol", type=float, default=None, help="tolerance override")
    common.add_argument("--server", default=None, help="URL of a running service")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="decompose and report the system structure")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("design", parents=[common], help="solve the full design problem")
    p.add_argument("--dot", help="directory for DOT renderings of the result")
    p.add_argument(
        "--allow-extra-agents",
        action="store_true",
        help="pad the assignment when there are more agents than parent components",
    )
    p.set_defaults(func=_cmd_design)

    p = sub.add_parser("verify", parents=[common], help="re-verify a stored solution")
    p.add_argument("--solution", required=True, help="solution JSON file")
    p.add_argument("--oracle", type=int, default=0, help="also run N oracle trials")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("discretize", parents=[common], help="discretize a continuous system matrix")
    p.add_argument("--sample-time", type=float, required=True)
    p.add_argument("--method", choices=["euler", "tustin"], required=True)
    p.set_defaults(func=_cmd_discretize)

    p = sub.add_parser("oracle", parents=[common], help="run the generic-rank oracle")
    p.add_argument("--measured", help="comma-separated measured state indices")
    p.add_argument("--solution", help="take measured states from a solution file")
    p.add_argument("--trials", type=int, default=100)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "serve":
        return _cmd_serve(args, None)
    client = _Client(getattr(args, "server", None))
    try:
        return args.func(args, client)
    except SpecParseError as exc:
        return _fail("parse", str(exc), EXIT_PARSE)
    except _ServiceError as exc:
        return _fail(exc.code, exc.message, exc.exit_code)
    finally:
        client.close()


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
