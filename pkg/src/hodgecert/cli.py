"""Command-line interface.

Exit codes: 0 success, 1 the computation finished but the verdict is false,
2 a mathematical precondition failed (singular, not invariant, too large...),
3 parse or I/O failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from importlib import resources
from pathlib import Path

from . import familyfile, report
from .criterion import element_from_coords, lambda_coords, lambda_piece
from .errors import HodgeCertError, ParseError
from .poly import parse_polynomial

EXIT_OK, EXIT_FALSE, EXIT_PRECONDITION, EXIT_PARSE = 0, 1, 2, 3

# family name -> command used to freeze its digest
EXAMPLE_COMMANDS = {
    "quartic_p3": "check-criterion",
    "dwork_quartic_p3": "check-criterion",
    "cubic_p3": "check-criterion",
    "sextic_p5_iota": "check-criterion",
    "sextic_p5": "check-torelli",
    "cubic_p3_z3": "check-torelli",
}


def _common(p):
    p.add_argument("family", help="family file, or the name of a bundled family")
    p.add_argument("--seed", type=int, help="RNG seed for primes and lambda (default: file value)")
    p.add_argument("--primes", type=int, help="number of agreeing primes per rank claim")
    ex = p.add_mutually_exclusive_group()
    ex.add_argument("--exact", dest="exact", action="store_true", default=None,
                    help="allow escalation to exact elimination")
    ex.add_argument("--no-exact", dest="exact", action="store_false",
                    help="never escalate; non-full ranks stay modular lower bounds")
    p.add_argument("--force", action="store_true", help="lift the generic-path size cap")
    p.add_argument("--threads", type=int, default=1, help="worker threads for modular ranks")
    p.add_argument("--tangent-degree", type=int)
    p.add_argument("--tangent-character", type=int)
    p.add_argument("--twist", type=int, help="residue twist added to ring characters")
    p.add_argument("-o", "--output", help="write the JSON report here instead of stdout")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hodgecert",
        description="Certify infinitesimal Hodge-theoretic criteria by exact linear algebra in Jacobian rings.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hilbert", help="Hilbert vector, character table and Hodge numbers")
    _common(p)

    p = sub.add_parser("check-criterion", help="conditions 1-3 at a given or seeded class lambda")
    _common(p)
    p.add_argument("--lambda", dest="lam", metavar="POLY",
                   help="class lambda as a polynomial (reduced into the (k,k) piece)")
    p.add_argument("--commutant", dest="shifts", type=int, action="append", metavar="R",
                   help="also compute the shift-R commutant (repeatable; default: every shift)")

    p = sub.add_parser("check-torelli", help="surjectivity of multiplication by tangent vectors")
    _common(p)

    p = sub.add_parser("commutant", help="maps commuting with multiplication by tangent vectors")
    _common(p)
    p.add_argument("--shift", dest="shifts", type=int, action="append", metavar="R",
                   help="shift to compute (repeatable; default: every shift)")

    p = sub.add_parser("examples", help="list bundled families and their frozen report digests")
    p.add_argument("--verify", nargs="*", metavar="NAME",
                   help="rerun the named families (all when no name is given) and compare digests")
    p.add_argument("--show", metavar="NAME", help="print a bundled family file")
    p.add_argument("--freeze", metavar="PATH",
                   help="rerun every bundled family and write a fresh manifest to PATH")
    return parser


def _spec_and_policy(args):
    ff = familyfile.resolve(args.family)
    spec = ff.to_spec(tangent_degree=args.tangent_degree, tangent_character=args.tangent_character,
                      residue_twist=args.twist, force=args.force or None)
    policy = ff.policy(seed=args.seed, num_primes=args.primes, exact_fallback=args.exact,
                       threads=args.threads)
    return ff, spec, policy


def _lambda(spec, text):
    try:
        poly = parse_polynomial(text, spec.num_vars)
    except HodgeCertError as exc:
        raise ParseError(f"--lambda: {exc}", "lambda") from None
    piece = lambda_piece(spec)
    lam = spec.ring.normal_form(poly, degree=piece.degree)
    # lambda_coords rejects classes outside the studied eigencomponent
    return element_from_coords(spec, piece, lambda_coords(spec, lam))


def _emit(rep, output):
    text = report.dumps(rep)
    if output:
        try:
            Path(output).write_text(text)
        except OSError as exc:
            raise ParseError(f"cannot write {output}: {exc.strerror}") from None
    else:
        sys.stdout.write(text)
    return text


def _shifts(spec, requested):
    return list(range(spec.n + 1)) if not requested else sorted(set(requested))


def run_command(args):
    """Return (report dict, exit code) for one family command."""
    ff, spec, policy = _spec_and_policy(args)
    if args.command == "hilbert":
        return report.hilbert_report(spec), EXIT_OK
    if args.command == "check-criterion":
        lam = _lambda(spec, args.lam) if args.lam is not None else None
        shifts = _shifts(spec, args.shifts)
        rep, result = report.criterion_report(spec, policy, lam, shifts)
        return rep, EXIT_OK if result.verdict else EXIT_FALSE
    if args.command == "check-torelli":
        rep = report.torelli_report(spec, policy)
        return rep, EXIT_OK if rep["torelli"]["all_surjective"] else EXIT_FALSE
    if args.command == "commutant":
        return report.commutant_report(spec, policy, _shifts(spec, args.shifts)), EXIT_OK
    raise AssertionError(args.command)


def _manifest():
    return json.loads((resources.files("hodgecert") / "families" / "manifest.json").read_text())


def example_report(name):
    """The frozen-digest report of a bundled family (default seed and policy)."""
    command = EXAMPLE_COMMANDS[name]
    args = build_parser().parse_args([command, name])
    rep, code = run_command(args)
    return report.dumps(rep), code


def digest(text):
    return hashlib.sha256(text.encode()).hexdigest()


def freeze(path):
    manifest = {}
    for name in familyfile.bundled_names():
        text, code = example_report(name)
        manifest[name] = {"command": EXAMPLE_COMMANDS[name], "exit": code, "digest": digest(text)}
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def cmd_examples(args):
    if args.freeze:
        freeze(args.freeze)
        return EXIT_OK
    manifest = _manifest()
    if args.show:
        sys.stdout.write(familyfile.bundled_text(args.show))
        return EXIT_OK
    names = familyfile.bundled_names()
    if args.verify is None:
        for name in names:
            entry = manifest.get(name, {})
            header = familyfile.load_bundled(name).header
            desc = header[0].lstrip("# ") if header else ""
            print(f"{name:20s} {entry.get('command', '-'):16s} exit={entry.get('exit', '-')} "
                  f"{entry.get('digest', '-')[:16]}  {desc}")
        return EXIT_OK
    todo = args.verify or names
    ok = True
    for name in todo:
        if name not in manifest:
            raise ParseError(f"no recorded digest for {name!r}")
        text, code = example_report(name)
        good = digest(text) == manifest[name]["digest"] and code == manifest[name]["exit"]
        ok &= good
        print(f"{name:20s} {'ok' if good else 'MISMATCH'}")
    return EXIT_OK if ok else EXIT_FALSE


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * args.verbose
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "examples":
            return cmd_examples(args)
        rep, code = run_command(args)
        _emit(rep, args.output)
        return code
    except ParseError as exc:
        key = f" [key: {exc.key}]" if exc.key else ""
        print(f"error {exc.code}{key}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except HodgeCertError as exc:
        print(f"error {exc.code}: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except ValueError as exc:
        print(f"error E_PRECONDITION: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
