"""Command-line interface: JSON on stdout, human-readable summary on stderr.

Exit codes: 0 decided / all checks passed, 2 undecided or inconclusive,
1 error or failed check.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from . import __version__, config
from .diophantine import scan_cohn, scan_lie_type, scan_repunit
from .errors import GateUnivError, InconclusiveError
from .gateset import gamma_N, load_gateset
from .jeandel import (build_family, compile_and_verify, default_omega, invariance_witness,
                      parity_table)
from .moments import exact_moment, frame_potential_mc, haar_reference
from .universality import VerdictKind, bound_ivanyos, bound_new, decide_eventual

EXIT_OK, EXIT_ERROR, EXIT_UNDECIDED = 0, 1, 2


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def _read_gateset(path: str):
    data = Path(path).read_bytes()
    return load_gateset(data), hashlib.sha256(data).hexdigest()


def cmd_analyze(args) -> int:
    start = time.perf_counter()
    gs, digest = _read_gateset(args.gateset)
    verdict = decide_eventual(
        gs, args.n_max, seed=args.seed, mc_samples=args.mc_samples,
        mc_word_length=args.mc_wordlen, dense_threshold=args.dense_threshold,
    )
    top = verdict.to_dict()
    if verdict.kind is VerdictKind.EVENTUALLY_UNIVERSAL and verdict.N == gs.n:
        top["kind"] = VerdictKind.UNIVERSAL_AT.value
    report = {
        "tool": "gateuniv",
        "version": __version__,
        "input": {"sha256": digest, "d": gs.d, "n": gs.n, "labels": list(gs.labels)},
        "seed": args.seed,
        "n_max": args.n_max,
        "bounds": {"new": bound_new(gs.d, gs.n), "ivanyos": bound_ivanyos(gs.d, gs.n)},
        "verdict": top,
        "timings": {"total_seconds": time.perf_counter() - start},
    }
    _emit(report)
    n_txt = f"({verdict.N})" if verdict.N is not None else ""
    _note(f"{top['kind']}{n_txt}: {verdict.reason}")
    return EXIT_OK if verdict.decided else EXIT_UNDECIDED


def cmd_bound(args) -> int:
    if args.d < 2 or args.n < 2:
        raise GateUnivError("bound needs d >= 2 and n >= 2")
    value = bound_ivanyos(args.d, args.n) if args.ivanyos else bound_new(args.d, args.n)
    print(value)
    return EXIT_OK


def cmd_jeandel(args) -> int:
    if args.omega:
        omega, _ = _read_gateset(args.omega)
    else:
        omega = default_omega()
    fam = build_family(omega, args.k)
    if args.action == "build":
        text = fam.as_gateset().to_json()
        if args.out:
            Path(args.out).write_text(text + "\n")
            _note(f"wrote {len(fam.gates)} gates on {args.k + 2} qubits to {args.out}")
        else:
            sys.stdout.write(text + "\n")
        return EXIT_OK

    k = fam.k
    power_of_two = k & (k - 1) == 0
    rows = parity_table(k)
    report: dict = {
        "k": k,
        "parity": [r._asdict() for r in rows],
        "parity_lemma_applies": power_of_two,
        "parity_counterexamples": [r._asdict() for r in rows if not r.odd],
    }
    failed = power_of_two and bool(report["parity_counterexamples"])
    try:
        checks = compile_and_verify(fam, dense_threshold=args.dense_threshold)
        report["compile"] = {"N": 2 * k + 1, "expected_to_pass": power_of_two,
                             "results": [c._asdict() for c in checks]}
        if power_of_two and not all(c.passed for c in checks):
            failed = True
    except GateUnivError as exc:
        report["compile"] = {"skipped": str(exc)}
        _note(f"compile check skipped: {exc}")
    if k >= 4:
        try:
            ok = invariance_witness(fam, dense_threshold=args.dense_threshold)
            report["witness"] = {"N": 2 * k - 2, "holds": ok}
            failed = failed or not ok
        except GateUnivError as exc:
            report["witness"] = {"skipped": str(exc)}
            _note(f"invariance witness skipped: {exc}")
    else:
        report["witness"] = {"skipped": "needs k >= 4 so that 2k - 2 >= k + 2"}
    _emit(report)
    if report["parity_counterexamples"]:
        ex = report["parity_counterexamples"][0]
        _note(f"parity counterexample for k={k}: binom({k + ex['q']},{k}) = {ex['binomial']} is even")
    _note("all applicable checks passed" if not failed else "a check FAILED")
    return EXIT_ERROR if failed else EXIT_OK


def cmd_dioph(args) -> int:
    if args.equation == "lie-type":
        sols = scan_lie_type(args.d_max, args.N_max, args.k_max)
    elif args.equation == "repunit":
        sols = scan_repunit(args.x_max, args.n_max, args.q_max, args.sign)
    else:
        sols = scan_cohn(args.y_max, args.z_max, args.k_max)
    for s in sols:
        sys.stdout.write(json.dumps(s.to_dict(), sort_keys=True) + "\n")
    _note(f"{len(sols)} solution(s); verified within the scanned bounds only")
    return EXIT_OK


def cmd_moments(args) -> int:
    gs, _ = _read_gateset(args.gateset)
    fam = gamma_N(gs, args.N)
    try:
        if args.mc:
            rep = frame_potential_mc(fam, args.k, args.wordlen, args.samples, args.seed,
                                     streams=args.streams, dense_threshold=args.dense_threshold)
        else:
            rep = exact_moment(fam, args.k, dense_threshold=args.dense_threshold)
    except InconclusiveError as exc:
        _emit({"N": args.N, "k": args.k, "inconclusive": str(exc)})
        _note(f"inconclusive: {exc}")
        return EXIT_UNDECIDED
    out = rep.to_dict()
    try:
        out["haar"] = haar_reference(fam.dim, args.k)
    except GateUnivError:
        out["haar"] = None
    _emit(out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gateuniv", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"gateuniv {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="decide eventual universality of a gate-set file")
    a.add_argument("gateset")
    a.add_argument("--n-max", type=int, default=5)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--mc-samples", type=int, default=0)
    a.add_argument("--mc-wordlen", type=int, default=100)
    a.add_argument("--dense-threshold", type=int, default=None)
    a.set_defaults(func=cmd_analyze)

    b = sub.add_parser("bound", help="print the register-size bound")
    b.add_argument("d", type=int)
    b.add_argument("n", type=int)
    b.add_argument("--ivanyos", action="store_true", help="print d^8(n-1)+1 instead")
    b.set_defaults(func=cmd_bound)

    j = sub.add_parser("jeandel", help="build or verify controlled-involution gate families")
    j.add_argument("action", choices=["build", "verify"])
    j.add_argument("k", type=int)
    j.add_argument("--omega", help="2-qubit involution gate-set file (default: built-in)")
    j.add_argument("--out", help="output file for build (default: stdout)")
    j.add_argument("--dense-threshold", type=int, default=None)
    j.set_defaults(func=cmd_jeandel)

    dio = sub.add_parser("dioph", help="bounded Diophantine scans, JSON lines")
    dio.add_argument("equation", choices=["lie-type", "repunit", "cohn"])
    dio.add_argument("--d-max", type=int, default=1000)
    dio.add_argument("--N-max", type=int, default=40)
    dio.add_argument("--k-max", type=int, default=None)
    dio.add_argument("--x-max", type=int, default=10**4)
    dio.add_argument("--n-max", type=int, default=30)
    dio.add_argument("--q-max", type=int, default=None)
    dio.add_argument("--sign", choices=["minus", "plus"], default="minus")
    dio.add_argument("--y-max", type=int, default=10**6)
    dio.add_argument("--z-max", type=int, default=10**4)
    dio.set_defaults(func=cmd_dioph)

    m = sub.add_parser("moments", help="exact or Monte Carlo moment of Gamma^N")
    m.add_argument("gateset")
    m.add_argument("N", type=int)
    m.add_argument("k", type=int, choices=[2, 4])
    mode = m.add_mutually_exclusive_group()
    mode.add_argument("--exact", dest="mc", action="store_false")
    mode.add_argument("--mc", dest="mc", action="store_true")
    m.add_argument("--samples", type=int, default=10**5)
    m.add_argument("--wordlen", type=int, default=200)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--streams", type=int, default=1)
    m.add_argument("--dense-threshold", type=int, default=None)
    m.set_defaults(func=cmd_moments, mc=False)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "equation", None) is not None and args.k_max is None:
        args.k_max = 200 if args.equation == "lie-type" else 40
    if getattr(args, "dense_threshold", None) is None and hasattr(args, "dense_threshold"):
        args.dense_threshold = config.dense_threshold()
    try:
        return args.func(args)
    except (GateUnivError, ValueError, OSError) as exc:
        _note(f"error: {exc}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
