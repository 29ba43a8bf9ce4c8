"""Command-line front end.

Each subcommand prints one JSON report on stdout::

    {"problem": ..., "verdict": true|false|null, "witness": {...}|null,
     "artifacts": {...}, "result": {...}}

Exit status: 0 decided, 2 precondition violated, 3 parse or input error,
4 timeout or cancellation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Callable

from . import decide as D
from .cancel import CancellationToken, Cancelled
from .geometry import (GeometryError, complex_from_json, complex_to_json,
                       desingularize, fmt_point)
from .hats import weighted_to_json
from .pwl import compile_term, pwl_from_json, pwl_to_json
from .synth import synthesize_term
from .terms import ParseError, desugar, parse_term, print_term

EXIT_OK, EXIT_PRECONDITION, EXIT_INPUT, EXIT_TIMEOUT = 0, 2, 3, 4


class InputError(ValueError):
    pass


def _read_terms(paths: list[str] | None) -> list[str]:
    out = []
    for p in paths or []:
        try:
            text = Path(p).read_text()
        except OSError as e:
            raise InputError(f"cannot read {p}: {e.strerror}") from e
        out.extend(line.strip() for line in text.splitlines() if line.strip())
    return out


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON ({e.msg})") from e


def _terms(args, texts: list[str]):
    if args.n is None:
        raise InputError("the arity -n is required")
    if not texts:
        raise InputError("no terms given")
    return [parse_term(s, args.n) for s in texts]


def _primary(args):
    return _terms(args, list(args.terms) + _read_terms(args.terms_file))


class Artifacts:
    def __init__(self, directory: str | None):
        self.dir = Path(directory) if directory else None
        self.paths: dict[str, str] = {}

    def store(self, name: str, obj) -> None:
        if self.dir is None:
            return
        self.dir.mkdir(parents=True, exist_ok=True)
        path = self.dir / f"{name}.json"
        path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
        self.paths[name] = str(path)


def _report(problem, verdict=None, witness=None, result=None):
    out = {"problem": problem, "verdict": verdict, "witness": witness, "artifacts": {}}
    if result is not None:
        out["result"] = result
    return out


# -- subcommand handlers ------------------------------------------------------

def cmd_parse(args, tok, art):
    ts = _primary(args)
    return _report("parse", result={"terms": [
        {"printed": print_term(t), "desugared": print_term(desugar(t))} for t in ts]})


def cmd_compile(args, tok, art):
    ts = _primary(args)
    fs = [compile_term(t, args.n, tok) for t in ts]
    for i, f in enumerate(fs):
        art.store(f"function_{i}", pwl_to_json(f))
    return _report("compile", result={"functions": [pwl_to_json(f) for f in fs]})


def cmd_separation(args, tok, art):
    rep = D.check_separation(_primary(args), args.n, tok)
    art.store("linearizer", complex_to_json(rep.linearizer))
    return _report("separation", rep.verdict, rep.witness_json(), {
        "projective": rep.projective_flag,
        "image_is_triangulation": rep.image.is_triangulation,
        "linearizer_simplexes": len(rep.linearizer.simplexes),
    })


def cmd_iso(args, tok, art):
    rep = D.check_iso_to_free(_primary(args), args.n, tok)
    art.store("regular_linearizer", complex_to_json(rep.regular_linearizer))
    return _report("iso-free", rep.verdict, rep.witness_json())


def _freeness(name, fn):
    def run(args, tok, art):
        rep = fn(_primary(args), args.n, tok)
        return _report(name, rep.verdict, rep.witness_json(),
                       {"separating": rep.separation.verdict,
                        "isomorphic": None if rep.iso is None else rep.iso.verdict})
    return run


def cmd_basis(args, tok, art):
    rep = D.basis_from_generators(_primary(args), args.n, tok)
    art.store("weighted_triangulation", weighted_to_json(rep.weighted))
    art.store("range_triangulation", complex_to_json(rep.nabla))
    return _report("basis", result={
        "weighted_triangulation": weighted_to_json(rep.weighted),
        "multipliers": rep.multipliers,
        "terms": [print_term(t) for t in rep.terms],
        "is_basic": rep.is_basic,
        "unit_partition": rep.unit_partition,
        "generates_same": rep.generates_same,
    })


def cmd_equal(args, tok, art):
    ts1 = _primary(args)
    ts2 = _terms(args, list(args.other or []) + _read_terms(args.other_file))
    rep = D.subalgebras_equal(ts1, ts2, args.n, tok)
    return _report("equal-subalg", rep.verdict, rep.witness_json())


def cmd_quotient(args, tok, art):
    ts = _primary(args)
    rep = D.generators_to_quotient(ts, args.n, tok)
    art.store("range", complex_to_json(rep.range_complex))
    art.store("cube_triangulation", complex_to_json(rep.triangulation))
    return _report("to-quotient", result={
        "sigma": print_term(rep.sigma), "k": rep.k,
        "range": complex_to_json(rep.range_complex),
        "outside_vertices": [fmt_point(v) for v in rep.outside_vertices],
        "zeroset_matches_range": rep.zeroset_matches,
    })


def cmd_embed(args, tok, art):
    ts = _primary(args)
    if len(ts) != 1:
        raise InputError("embed-check takes exactly one term")
    rep = D.quotient_embeddable(ts[0], args.n, tok)
    art.store("zeroset", complex_to_json(rep.zeroset))
    return _report("embed-check", rep.verdict, rep.witness_json(),
                   {"zeroset": complex_to_json(rep.zeroset)})


def cmd_desingularize(args, tok, art):
    if not args.complex_file:
        raise InputError("--complex-file is required")
    cx = complex_from_json(_read_json(args.complex_file))
    out, log = desingularize(cx, tok)
    art.store("regular_complex", complex_to_json(out))
    return _report("desingularize", result={
        "complex": complex_to_json(out), "log": [fmt_point(c) for c in log]})


def cmd_synth(args, tok, art):
    if args.pwl_file:
        f = pwl_from_json(_read_json(args.pwl_file))
    else:
        ts = _primary(args)
        if len(ts) != 1:
            raise InputError("synth takes exactly one term")
        f = compile_term(ts[0], args.n, tok)
    t = synthesize_term(f, tok)
    return _report("synth", result={"term": print_term(t)})


COMMANDS: dict[str, tuple[Callable, str]] = {
    "parse": (cmd_parse, "parse and print terms"),
    "compile": (cmd_compile, "piecewise-linear form of each term"),
    "separation": (cmd_separation, "do the terms separate points of the cube?"),
    "iso-free": (cmd_iso, "is the generated subalgebra isomorphic to the free one?"),
    "free-sep": (_freeness("free-sep", D.check_free_and_separating),
                 "is the generated subalgebra free and separating?"),
    "equals-free": (_freeness("equals-free", D.check_equals_free),
                    "does the generated subalgebra equal the free one?"),
    "basis": (cmd_basis, "basic generating set for the generated subalgebra"),
    "equal-subalg": (cmd_equal, "do two term lists generate the same subalgebra?"),
    "to-quotient": (cmd_quotient, "principal quotient presentation of the generated algebra"),
    "embed-check": (cmd_embed, "does the principal quotient embed in the free algebra?"),
    "desingularize": (cmd_desingularize, "regular subdivision of a complex"),
    "synth": (cmd_synth, "write down a term for a piecewise-linear function"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("terms", nargs="*", help="terms, e.g. 'x1 . x1'")
    common.add_argument("-n", type=int, help="number of variables")
    common.add_argument("--terms-file", action="append", help="file with one term per line")
    common.add_argument("--json-out", help="also write the report to this file")
    common.add_argument("--timeout", type=float, help="give up after this many seconds")
    common.add_argument("--artifacts-dir", help="store intermediate complexes here")
    p = argparse.ArgumentParser(prog="mvsubalg", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=help_text)
        if name == "equal-subalg":
            sp.add_argument("--other", action="append", help="term of the second list")
            sp.add_argument("--other-file", action="append", help="file with the second list")
        if name == "desingularize":
            sp.add_argument("--complex-file", help="complex in JSON form")
        if name == "synth":
            sp.add_argument("--pwl-file", help="piecewise-linear function in JSON form")
    return p


def _error(problem, kind, message):
    out = _report(problem)
    out["error"] = {"kind": kind, "message": message}
    return out


def run(argv: list[str] | None = None) -> tuple[int, dict]:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        code = EXIT_OK if e.code == 0 else EXIT_INPUT
        return code, _error(None, "usage", "invalid command line")
    handler = COMMANDS[args.command][0]
    token = CancellationToken(args.timeout)
    art = Artifacts(args.artifacts_dir)
    try:
        report = handler(args, token, art)
        code = EXIT_OK
    except Cancelled:
        report, code = _error(args.command, "timeout", "computation cancelled"), EXIT_TIMEOUT
    except D.PreconditionError as e:
        report, code = _error(args.command, "precondition", str(e)), EXIT_PRECONDITION
    except ParseError as e:
        report, code = _error(args.command, "parse", str(e)), EXIT_INPUT
    except (InputError, GeometryError, ValueError, KeyError, TypeError) as e:
        report, code = _error(args.command, "input", str(e)), EXIT_INPUT
    report["artifacts"] = dict(sorted(art.paths.items()))
    if args.json_out:
        Path(args.json_out).write_text(dumps(report))
    return code, report


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def main(argv: list[str] | None = None) -> int:
    code, report = run(argv)
    if report.get("problem") is None and report.get("error", {}).get("kind") == "usage":
        return code
    sys.stdout.write(dumps(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
