"""``hasse-forge`` command line: generation, verification and certification as JSON.

Exit codes: 0 success, 1 verification failure, 2 undecided or search budget
exhausted, 3 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import curves as cv
from . import dcc, generators
from ._report import SCHEMA, dumps
from .config import caps_from_env
from .errors import (CertificateRefuted, HasseForgeError, IncompleteFactorization,
                     InternalContradiction, InvalidArgument, NeedsMorePrecision, NoPrimePossible,
                     PreconditionError, ReduceFirst, SearchBudgetError)
from .fm import FmContext, verify_fm
from .threefold import FamilyOneParams, Septuple, family_one

EXIT_OK, EXIT_FAIL, EXIT_UNDECIDED, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_curve(text: str):
    """``mordell:p,n,kappa`` | ``mordell-raw:p,n,E,G`` | ``fermat:p,n,kappa,chi`` |
    ``fermat-raw:cx,cy,cz,m``."""
    kind, _, rest = text.partition(":")
    try:
        vals = [int(v) for v in rest.split(",")] if rest else []
    except ValueError as exc:
        raise UsageError(f"curve parameters must be integers: {text!r}") from exc
    arity = {"mordell": 3, "mordell-raw": 4, "fermat": 4, "fermat-raw": 4}
    if kind not in arity:
        raise UsageError(f"unknown curve kind {kind!r}; expected one of {sorted(arity)}")
    if len(vals) != arity[kind]:
        raise UsageError(f"{kind} takes {arity[kind]} integers, got {len(vals)}")
    if kind == "mordell":
        return cv.MordellCurve.from_kappa(*vals)
    if kind == "mordell-raw":
        return cv.MordellCurve(*vals)
    if kind == "fermat":
        return cv.FermatCurve.from_family(*vals)
    return cv.FermatCurve(*vals)


def _caps(args):
    overrides = {}
    for item in args.cap or ():
        name, _, value = item.partition("=")
        if not value:
            raise UsageError(f"--cap expects NAME=VALUE, got {item!r}")
        kind = float if name == "prime_scan_seconds" else int
        try:
            overrides[name] = kind(value)
        except ValueError as exc:
            raise UsageError(f"bad cap value {item!r}") from exc
    try:
        return caps_from_env(**overrides)
    except TypeError as exc:
        raise UsageError(str(exc)) from exc


def _emit(args, payload: dict):
    payload = dict(payload)
    payload.setdefault("schema", SCHEMA)
    text = dumps(payload, pretty=args.pretty)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _certificate(p, n, kappa, curve, caps, args, hints, metadata):
    s = family_one(FamilyOneParams(p, 1, 1, kappa))
    return cv.certify_counterexample(FmContext(p, n), s, curve, caps, args.seed, args.jobs,
                                     metadata=metadata, hints=hints)


# ---------------------------------------------------------------------------
# subcommands


def cmd_verify_fm(args, caps):
    rep = verify_fm(FmContext(args.p, args.n), Septuple.from_json(args.septuple))
    return (EXIT_OK if rep.passed else EXIT_FAIL), {"command": "verify-fm", "report": rep.to_json()}


def cmd_gen_mordell(args, caps):
    recipe = generators.gen_kappa(args.p, args.n, args.m, args.r, caps)
    out = {"command": "gen-mordell", "recipe": recipe.to_json()}
    if not args.no_certify:
        curve = cv.MordellCurve.from_kappa(args.p, args.n, recipe.kappa, hints=(recipe.kappa_star,))
        cert = _certificate(args.p, args.n, recipe.kappa, curve, caps, args,
                            (recipe.kappa_star,), {"generator": "gen_kappa"})
        out["certificate"] = cert.to_json()
    return EXIT_OK, out


def cmd_gen_fermat(args, caps):
    recipe = generators.gen_kappa_chi(args.p, args.n, args.m, args.r, caps,
                                      sweep_bound=args.sweep_bound)
    out = {"command": "gen-fermat", "recipe": recipe.to_json()}
    if not args.no_certify:
        hints = (recipe.kappa_star, recipe.chi)
        curve = cv.FermatCurve.from_family(args.p, args.n, recipe.kappa, recipe.chi, hints=hints)
        cert = _certificate(args.p, args.n, recipe.kappa, curve, caps, args, hints,
                            {"generator": "gen_kappa_chi"})
        out["certificate"] = cert.to_json()
    return EXIT_OK, out


def cmd_gen_family_two(args, caps):
    recipe = generators.gen_family_two(args.p, caps, schinzel=args.schinzel, lam=args.lam,
                                       gamma=args.gamma, pi=args.pi)
    return EXIT_OK, {"command": "gen-family-two", "recipe": recipe.to_json()}


def cmd_local_solve(args, caps):
    curve = parse_curve(args.curve)
    cert = cv.local_solvable_at(curve, args.place, args.depth, caps, args.seed)
    code = {cv.SOLVABLE: EXIT_OK, cv.UNSOLVABLE: EXIT_FAIL}.get(cert.verdict, EXIT_UNDECIDED)
    return code, {"command": "local-solve", "curve": curve.to_json(),
                  "certificate": cert.to_json()}


def cmd_certify(args, caps):
    curve = parse_curve(args.curve)
    mordell = cv._associated_mordell(curve)
    ctx = FmContext(mordell.p, mordell.n)
    s = Septuple.from_json(args.septuple)
    cert = cv.certify_counterexample(ctx, s, curve, caps, args.seed, args.jobs,
                                     hints=curve.hints)
    return EXIT_OK, {"command": "certify", "certificate": cert.to_json()}


def cmd_dcc(args, caps):
    if args.family == "mordell":
        seq = dcc.build_mordell_sequence(args.p, args.n0, args.n1, args.h, args.eps, caps)
    elif args.family == "fermat":
        seq = dcc.build_fermat_sequence(args.p, args.n0, args.n1, args.h, caps)
    else:
        if args.poly is None or args.n is None or args.m is None:
            raise UsageError("--family generic needs --poly, --n and --m")
        seq = dcc.build_non_dcc(args.n, args.m, args.poly, args.levels)
    rep = dcc.verify_dcc(seq, caps=caps, certify=not args.no_certify, seed=args.seed,
                         jobs=args.jobs)
    out = {"command": "dcc", "sequence": seq.to_json(), "report": rep.to_json()}
    if seq.family == dcc.GENERIC:
        return EXIT_OK, out
    return (EXIT_OK if rep.failure is None else EXIT_FAIL), out


def cmd_check_cert(args, caps):
    try:
        with open(args.file, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read certificate: {exc}") from exc
    if "certificate" in data and "places" not in data:
        data = data["certificate"]
    result = cv.check_certificate(data)
    return (EXIT_OK if result["ok"] else EXIT_FAIL), {"command": "check-cert", "result": result}


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for Brauer point sampling")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for prime sweeps")
    common.add_argument("--pretty", action="store_true", help="indent the JSON output")
    common.add_argument("--out", help="write JSON here instead of stdout")
    common.add_argument("--cap", action="append", metavar="NAME=VALUE",
                        help="override a search cap (repeatable)")

    parser = _Parser(prog="hasse-forge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-fm", parents=[common], help="check A1..A7 for a septuple")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--septuple", required=True, help="A,B,C,D,E,F,G")
    p.set_defaults(func=cmd_verify_fm)

    for name, func, help_text in (("gen-mordell", cmd_gen_mordell, "generate kappa and certify"),
                                  ("gen-fermat", cmd_gen_fermat, "generate (kappa, chi) and certify")):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--p", type=int, required=True)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--m", type=int, default=1)
        p.add_argument("--r", type=int, default=1)
        p.add_argument("--no-certify", action="store_true", help="emit only the recipe")
        if name == "gen-fermat":
            p.add_argument("--sweep-bound", type=int, default=None,
                           help="truncate the primes forced to kappa = 1/3 mod l")
        p.set_defaults(func=func)

    p = sub.add_parser("gen-family-two", parents=[common], help="second-family septuple")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--schinzel", action="store_true", help="require E1, E2, Q*_1 prime")
    p.add_argument("--lam", type=int, default=1)
    p.add_argument("--gamma", type=int, default=1)
    p.add_argument("--pi", type=int, default=None)
    p.set_defaults(func=cmd_gen_family_two)

    p = sub.add_parser("local-solve", parents=[common], help="solvability at one place")
    p.add_argument("--curve", required=True)
    p.add_argument("--place", required=True, help="a prime or inf")
    p.add_argument("--depth", type=int, default=None)
    p.set_defaults(func=cmd_local_solve)

    p = sub.add_parser("certify", parents=[common], help="full counterexample certificate")
    p.add_argument("--curve", required=True)
    p.add_argument("--septuple", required=True)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("dcc", parents=[common], help="build and verify a curve sequence")
    p.add_argument("--family", choices=("mordell", "fermat", "generic"), required=True)
    p.add_argument("--p", type=int, default=17)
    p.add_argument("--n0", type=int, default=3)
    p.add_argument("--n1", type=int, default=1)
    p.add_argument("--h", type=int, default=2)
    p.add_argument("--eps", type=int, default=1)
    p.add_argument("--poly", help="F(x) for the generic family, e.g. x**2-1")
    p.add_argument("--n", type=int, help="degree of F")
    p.add_argument("--m", type=int, help="power map exponent")
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--no-certify", action="store_true")
    p.set_defaults(func=cmd_dcc)

    p = sub.add_parser("check-cert", parents=[common], help="re-verify a certificate file")
    p.add_argument("file")
    p.set_defaults(func=cmd_check_cert)
    return parser


# wall-clock figures vary between runs and stay out of the JSON
_TIMING_KEYS = ("seconds_per_test", "expected_seconds")


def _error_payload(command, exc) -> dict:
    out = {"command": command, "error": type(exc).__name__}
    if isinstance(exc, SearchBudgetError):
        sys.stderr.write(f"hasse-forge: {exc}\n")
    else:
        out["message"] = str(exc)
    for attr in ("progress", "estimate", "detail"):
        value = getattr(exc, attr, None)
        if value:
            out[attr] = {k: v for k, v in value.items() if k not in _TIMING_KEYS}
    return out


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.jobs < 1:
            raise UsageError("--jobs must be at least 1")
        caps = _caps(args)
    except UsageError as exc:
        sys.stderr.write(f"hasse-forge: {exc}\n")
        return EXIT_USAGE
    except InvalidArgument as exc:
        sys.stderr.write(f"hasse-forge: {exc}\n")
        return EXIT_USAGE
    try:
        code, payload = args.func(args, caps)
    except UsageError as exc:
        sys.stderr.write(f"hasse-forge: {exc}\n")
        return EXIT_USAGE
    except (InvalidArgument, ReduceFirst) as exc:
        _emit(args, _error_payload(args.command, exc))
        return EXIT_USAGE
    except (SearchBudgetError, NeedsMorePrecision, IncompleteFactorization) as exc:
        _emit(args, _error_payload(args.command, exc))
        return EXIT_UNDECIDED
    except (PreconditionError, CertificateRefuted, NoPrimePossible,
            InternalContradiction) as exc:
        _emit(args, _error_payload(args.command, exc))
        return EXIT_FAIL
    except HasseForgeError as exc:
        _emit(args, _error_payload(args.command, exc))
        return EXIT_FAIL
    _emit(args, payload)
    return code


if __name__ == "__main__":
    sys.exit(main())
