"""``averagedness`` command line: parse a document, dispatch, emit a report.

Exit codes: 0 success, 2 parse error, 3 validation error, 4 numerical error.
"""
import argparse
import json
import sys
import time
from dataclasses import dataclass, field

from .. import __version__
from ..calculus import exact_modulus, verify_identities
from ..dynamics import classify_limit, orbit
from ..errors import AveragednessError, NumericalError, ParseError, ValidationError
from ..estimator import estimate_modulus, estimate_value, invert_by_contraction
from ..estimator.values import QUANTITIES
from . import spec_io
from .report import Report

COMMANDS = ("analyze", "estimate", "iterate", "invert", "classify", "verify")
DEFAULTS = {"seed": 0, "samples": 10_000, "tol": 1e-10, "max_iter": 1_000_000, "refine": 0,
            "dim": None, "points": 100, "workers": 1}
REFINE_STEPS = 100
EXIT_OK, EXIT_PARSE, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3, 4


@dataclass
class AnalysisRequest:
    command: str
    document: dict
    params: dict = field(default_factory=dict)

    def resolved_params(self):
        params = dict(DEFAULTS)
        doc_params = self.document.get("params", {})
        if not isinstance(doc_params, dict):
            raise ParseError("expected an object", "$.params")
        params.update(doc_params)
        params.update({k: v for k, v in self.params.items() if v is not None})
        unknown = set(params) - set(DEFAULTS)
        if unknown:
            raise ParseError(f"unknown parameter(s) {sorted(unknown)}", "$.params")
        for key in ("samples", "max_iter", "points", "workers"):
            params[key] = _positive(params[key], key, integer=True)
        params["tol"] = _positive(params["tol"], "tol")
        params["seed"] = _nonneg_int(params["seed"], "seed")
        params["refine"] = _nonneg_int(params["refine"], "refine")
        if params["dim"] is not None:
            params["dim"] = _positive(params["dim"], "dim", integer=True)
        return params


def _positive(v, name, integer=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError(f"expected a number, got {v!r}", f"$.params.{name}")
    if v <= 0:
        raise ValidationError(f"parameter {name} must be positive, got {v!r}")
    if integer:
        if int(v) != v:
            raise ValidationError(f"parameter {name} must be an integer, got {v!r}")
        return int(v)
    return float(v)


def _nonneg_int(v, name):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or int(v) != v or v < 0:
        raise ValidationError(f"parameter {name} must be a nonnegative integer, got {v!r}")
    return int(v)


def _operator(doc):
    return spec_io.parse_operator(spec_io._get(doc, "operator", "$"), "$.operator")


def _analyze(doc, p):
    return {"modulus": exact_modulus(_operator(doc)).to_dict()}


def _estimate(doc, p):
    quantity = doc.get("quantity", "modulus")
    if quantity not in QUANTITIES:
        raise ParseError(f"unknown quantity {quantity!r}", "$.quantity")
    if quantity == "modulus":
        est = estimate_modulus(_operator(doc), n=p["samples"], seed=p["seed"], refine_steps=p["refine"],
                               dim=p["dim"], workers=p["workers"])
    else:
        if "monotone" in doc:
            operand = spec_io.parse_monotone(doc["monotone"], "$.monotone")
        else:
            operand = _operator(doc)
        est = estimate_value(quantity, operand, n=p["samples"], seed=p["seed"], dim=p["dim"],
                             workers=p["workers"], complement=bool(doc.get("complement", False)))
    return {"estimate": est.to_dict()}


def _iterate(doc, p):
    T = _operator(doc)
    x0 = spec_io.parse_vector(doc, "x0")
    return {"orbit": orbit(T, x0, tol=p["tol"], max_iter=p["max_iter"]).to_dict()}


def _invert(doc, p):
    T = _operator(doc)
    v = spec_io.parse_vector(doc, "v")
    k = doc.get("k")
    if k is not None:
        k = spec_io._number(k, "$.k")
    res = invert_by_contraction(T, v, tol=p["tol"], max_iter=p["max_iter"], k=k)
    return {"inversion": res.to_dict()}


def _classify(doc, p):
    T = _operator(doc)
    fix_set = spec_io.parse_set(spec_io._get(doc, "fix_set", "$"), "$.fix_set")
    extra = spec_io.parse_points(doc, "extra_points")
    verdict = classify_limit(T, fix_set, n=p["points"], seed=p["seed"], tol=p["tol"],
                             max_iter=p["max_iter"], extra_points=extra)
    return {"classification": verdict.to_dict()}


def _verify(doc, p):
    suite = spec_io._get(doc, "suite", "$")
    kwargs = {}
    if "monotone" in doc:
        kwargs["operator"] = spec_io.parse_monotone(doc["monotone"], "$.monotone")
    if "function" in doc:
        kwargs["function"] = spec_io.parse_function(doc["function"], "$.function")
    if "set" in doc:
        kwargs["set"] = spec_io.parse_set(doc["set"], "$.set")
    for key in ("mu", "alpha"):
        if key in doc:
            kwargs[key] = spec_io._number(doc[key], f"$.{key}")
    report = verify_identities(suite, n=p["points"] if "points" in doc.get("params", {}) else 1000,
                               seed=p["seed"], **kwargs)
    return {"identities": report.to_dict()}


DISPATCH = {"analyze": _analyze, "estimate": _estimate, "iterate": _iterate, "invert": _invert,
            "classify": _classify, "verify": _verify}


def run(request: AnalysisRequest) -> Report:
    """Execute one request; library errors propagate to the caller."""
    if request.command not in DISPATCH:
        raise ParseError(f"unknown command {request.command!r}", "$.command")
    doc = spec_io.check_schema(request.document)
    params = request.resolved_params()
    start = time.perf_counter()
    results = DISPATCH[request.command](doc, params)
    wall = time.perf_counter() - start
    echo = {"command": request.command, "document": doc, "params": params}
    return Report(echo, results, wall, __version__)


def exit_code_for(exc):
    if isinstance(exc, ParseError):
        return EXIT_PARSE
    if isinstance(exc, ValidationError):
        return EXIT_VALIDATION
    if isinstance(exc, NumericalError):
        return EXIT_NUMERICAL
    return 1


def load_document(path):
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def build_parser():
    parser = argparse.ArgumentParser(prog="averagedness",
                                     description="Modulus of averagedness of nonexpansive operators.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS + ("run",):
        helptext = "use the document's command field" if name == "run" else f"{name} an operator document"
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("document", help="path to a JSON document, or - for stdin")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--samples", type=int)
        sp.add_argument("--tol", type=float)
        sp.add_argument("--max-iter", dest="max_iter", type=lambda s: int(float(s)))
        sp.add_argument("--refine", type=int, nargs="?", const=REFINE_STEPS,
                        help=f"pattern-search steps around the best pair (default {REFINE_STEPS} when given)")
        sp.add_argument("--dim", type=int)
        sp.add_argument("--workers", type=int)
        sp.add_argument("--csv", action="store_true", help="flatten orbits and estimates to CSV")
        sp.add_argument("--out", help="write the report here instead of stdout")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    params = {k: getattr(args, k) for k in ("seed", "samples", "tol", "max_iter", "refine", "dim", "workers")}
    command = args.command
    try:
        doc = load_document(args.document)
        if command == "run":
            command = doc.get("command") if isinstance(doc, dict) else None
            if command is None:
                raise ParseError("missing required field 'command'", "$")
        report = run(AnalysisRequest(command, doc, params))
        text = report.to_csv() if args.csv else report.to_json()
        code = EXIT_OK
    except AveragednessError as exc:
        code = exit_code_for(exc)
        print(f"error: {exc}", file=sys.stderr)
        err = Report({"command": command, "params": params}, {}, 0.0, __version__, code,
                     {"type": type(exc).__name__, "message": str(exc)})
        text = err.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
