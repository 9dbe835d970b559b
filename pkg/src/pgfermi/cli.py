"""Command-line workbench.

Exit codes: 0 all checks pass, 1 a verification failed, 2 bad input/usage.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import coherent, finite_level, pseudofermion
from .errors import InputError, PGFermiError
from .numerics import Tolerance, default_tolerance, matrix_to_json, max_abs
from .paragrassmann import g_coefficients
from .pseudofermion import CandidatePair, ExampleParams
from .report import VerificationReport

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def fmt_complex(z) -> str:
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:.6g}"
    return f"{z.real:.6g}{z.imag:+.6g}i"


def _emit(obj, fmt: str, table: str | None = None) -> None:
    if fmt == "json":
        print(json.dumps(obj, indent=2, sort_keys=True))
    else:
        print(table if table is not None else json.dumps(obj, indent=2))


def _load_json_arg(text: str | None, what: str):
    if not text:
        return None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"--{what} is not valid JSON: {exc}") from exc


def _load_file(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def candidate_from_args(args) -> CandidatePair:
    if args.input:
        return CandidatePair.from_json(_load_file(args.input))
    kind = args.example or "hermitian"
    if kind == "hermitian":
        return CandidatePair.hermitian(args.n or 1)
    params = ExampleParams.from_json(kind, _load_json_arg(args.params, "params"), args.n)
    return pseudofermion.example_family(params)


def run_battery(pair: CandidatePair, tol: Tolerance) -> VerificationReport:
    """Every check from the pair relation through both resolutions of identity."""
    rep = pseudofermion.verify_pf_relation(pair, tol)
    if not rep.overall:
        return rep
    try:
        system = pseudofermion.build_system(pair, tol)
    except PGFermiError as exc:
        rep.add("build_system", float("inf"), 0.0, "Fock construction", passed=False)
        rep.notes["build_error"] = f"{type(exc).__name__}: {exc}"
        return rep
    rep.extend(pseudofermion.verify_system(system, tol))
    rep.extend(coherent.verify_coherent(system, tol))
    return rep


# commands -------------------------------------------------------------

def cmd_verify(args) -> int:
    pair = candidate_from_args(args)
    rep = run_battery(pair, args.tol)
    _emit(rep.to_json(), args.format, rep.to_table())
    if not rep.overall:
        names = ", ".join(c.name for c in rep.failures())
        print(f"verification failed: {names}", file=sys.stderr)
    return EXIT_OK if rep.overall else EXIT_FAIL


def cmd_example(args) -> int:
    pair = candidate_from_args(args)
    system = pseudofermion.build_system(pair, args.tol)
    obj = system.to_json()
    table = "\n".join(
        [f"n = {system.n}"]
        + [f"{name}:\n{_matrix_table(m)}" for name, m in
           (("a", system.a), ("b", system.b), ("eta", system.eta))])
    _emit(obj, args.format, table)
    return EXIT_OK


def _matrix_table(m) -> str:
    return "\n".join("  " + "  ".join(f"{fmt_complex(z):>14}" for z in row) for row in m)


def cmd_cs(args) -> int:
    pair = candidate_from_args(args)
    system = pseudofermion.build_system(pair, args.tol)
    sides = coherent.SIDES if args.side == "both" else (args.side,)
    out = {"n": system.n, "families": [], "resolution": {}, "binormalization": {}}
    lines = []
    ok = True
    for side in sides:
        for primed in (False, True):
            fam = coherent.ladder_cs(system, side, primed)
            name = side + ("'" if primed else "")
            resid = coherent.eigen_residual(fam).max_abs()
            out["families"].append({"side": side, "primed": primed,
                                    "raw": fam.raw.to_json(),
                                    "normalized": fam.normalized.to_json(),
                                    "eigen_residual": resid})
            lines.append(f"family {name}: eigen residual {resid:.3e}")
            for (i, k), c in fam.normalized.terms.items():
                vec = " ".join(fmt_complex(z) for z in c)
                lines.append(f"  zeta^{i} zeta*^{k}: [{vec}]")
        defect = coherent.resolution_defect(system, side)
        d = max_abs(defect)
        ok &= d <= max(args.tol.bound(1.0), 1e-9)
        out["resolution"][side] = {"defect": matrix_to_json(defect), "max": d}
        lines.append(f"resolution of identity ({side}): max defect {d:.3e}")
        nrep = coherent.binormalization_report(system, side)
        out["binormalization"][side] = nrep.to_json()
        lines.append(f"bi-pairing ({side}) deviation by bidegree:")
        for (i, k), dv in nrep.defect_by_bidegree.items():
            single = nrep.single_factor_defects[(i, k)]
            lines.append(f"  ({i},{k}): {fmt_complex(dv):>12}   "
                         f"[single sqrt factor: {fmt_complex(single)}]")
    _emit(out, args.format, "\n".join(lines))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_factorize(args) -> int:
    if args.input:
        sysobj = _load_file(args.input)
    elif args.eps:
        sysobj = {"eps": _load_json_arg(args.eps, "eps")}
    else:
        raise InputError("factorize needs --input FILE or --eps JSON")
    fls = finite_level.FiniteLevelSystem.from_json(sysobj, args.tol)
    w, shift = finite_level.factor_weights(fls)
    rep = finite_level.structure_checks(fls, args.tol)
    coeffs = finite_level.expand_ladder_in_pf(fls, w, args.tol)
    pair, _ = finite_level.factorize(fls, args.tol)
    out = {"rho": [[complex(r).real, complex(r).imag] for r in w.rho],
           "shift": [shift.real, shift.imag],
           "pf_coefficients": [[complex(c).real, complex(c).imag] for c in coeffs],
           "a": matrix_to_json(pair.a), "b": matrix_to_json(pair.b),
           "report": rep.to_json()}
    table = "\n".join([
        "rho   = " + " ".join(fmt_complex(r) for r in w.rho),
        "shift = " + fmt_complex(shift),
        "a(rho) = " + " + ".join(f"({fmt_complex(c)}) b^{m} a^{m + 1}"
                                 for m, c in enumerate(coeffs)),
        rep.to_table()])
    _emit(out, args.format, table)
    return EXIT_OK if rep.overall else EXIT_FAIL


def cmd_gk(args) -> int:
    lo, hi = (args.n, args.n) if args.n is not None else (args.n_min, args.n_max)
    if not 1 <= lo <= hi <= 16:
        raise InputError("degree range must lie within [1, 16]")
    rows, ok = [], True
    for n in range(lo, hi + 1):
        g = g_coefficients(n)
        anchors = {"g_n": g[n] == 1,
                   "g_n-1": n < 1 or g[n - 1] == 1 + (-1) ** n,
                   "g_n-2": n < 2 or g[n - 2] == (-1) ** (n - 1),
                   "g_n-3": n < 3 or g[n - 3] == 0}
        row = {"n": n, "g": list(g), "anchors": anchors}
        if n <= args.oracle_max:
            w = coherent.solve_integration_weights(n)
            match = bool(np.all(np.abs(w - np.array(g)) < 1e-9))
            row["oracle"] = [round(float(x), 12) for x in w]
            row["oracle_match"] = match
            ok &= match
        ok &= all(anchors.values())
        rows.append(row)
    lines = []
    for r in rows:
        mark = ""
        if "oracle_match" in r:
            mark = "  oracle ok" if r["oracle_match"] else "  ORACLE MISMATCH"
        bad = [k for k, v in r["anchors"].items() if not v]
        lines.append(f"n={r['n']:>2}: " + " ".join(str(x) for x in r["g"]) + mark
                     + (f"  anchor failure {bad}" if bad else ""))
    _emit({"rows": rows, "overall": ok}, args.format, "\n".join(lines))
    return EXIT_OK if ok else EXIT_FAIL


def _grid_sample(job):
    index, kind, n, seed_seq, lo, hi, overrides, tol = job
    rng = np.random.default_rng(seed_seq)
    try:
        params = pseudofermion.random_example_params(kind, rng, n=n, lo=lo, hi=hi)
        if overrides:
            merged = params.to_json()
            merged.update(overrides)
            params = ExampleParams.from_json(kind, merged)
        pair = pseudofermion.example_family(params)
    except InputError as exc:
        return {"index": index, "status": "rejected", "error": str(exc)}
    rep = run_battery(pair, tol)
    return {"index": index, "status": "pass" if rep.overall else "fail",
            "residuals": {c.name: c.residual for c in rep.checks}}


def cmd_grid(args) -> int:
    kind = args.example
    if kind not in ("ex1", "ex2", "ex3"):
        raise InputError("grid needs --example ex1|ex2|ex3")
    if args.samples < 1 or args.jobs < 1:
        raise InputError("--samples and --jobs must be >= 1")
    overrides = _load_json_arg(args.params, "params") or {}
    n = args.n or 3
    seeds = np.random.SeedSequence(args.seed).spawn(args.samples)
    jobs = [(i, kind, n, s, args.min_mag, args.max_mag, overrides, args.tol)
            for i, s in enumerate(seeds)]
    if args.jobs == 1:
        results = [_grid_sample(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_grid_sample, jobs, chunksize=8))
    counts = {"pass": 0, "fail": 0, "rejected": 0}
    worst: dict = {}
    for r in results:
        counts[r["status"]] += 1
        for name, v in r.get("residuals", {}).items():
            worst[name] = max(worst.get(name, 0.0), v)
    out = {"family": kind, "samples": args.samples, "seed": args.seed,
           "counts": counts, "worst_residuals": worst,
           "failed_indices": [r["index"] for r in results if r["status"] == "fail"],
           "rejected_indices": [r["index"] for r in results if r["status"] == "rejected"]}
    width = max([len(k) for k in worst] + [5])
    table = "\n".join(
        [f"family {kind}: {counts['pass']} pass, {counts['fail']} fail, "
         f"{counts['rejected']} rejected (seed {args.seed})"]
        + [f"  worst {name:<{width}}  {v:.3e}" for name, v in sorted(worst.items())])
    _emit(out, args.format, table)
    if counts["fail"]:
        return EXIT_FAIL
    return EXIT_INPUT if counts["rejected"] else EXIT_OK


# parser ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=Tolerance.parse, default=None,
                        help="abs[,rel] tolerance (default 1e-10, env PGFERMI_TOL)")
    common.add_argument("--format", choices=("json", "table"), default="table")

    system = argparse.ArgumentParser(add_help=False)
    system.add_argument("--example", choices=("ex1", "ex2", "ex3", "hermitian"))
    system.add_argument("--hermitian", dest="example", action="store_const",
                        const="hermitian", help="shorthand for --example hermitian")
    system.add_argument("--n", type=int, help="degree of nonlinearity")
    system.add_argument("--params", help="example parameters as JSON")
    system.add_argument("--input", help="CandidatePair JSON file")

    parser = argparse.ArgumentParser(prog="pgfermi", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common, system], help="run the full check battery")
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("example", parents=[common, system], help="build and print a system")
    p.set_defaults(func=cmd_example)
    p = sub.add_parser("cs", parents=[common, system], help="coherent-state families")
    p.add_argument("--side", choices=("right", "left", "both"), default="both")
    p.set_defaults(func=cmd_cs)
    p = sub.add_parser("factorize", parents=[common], help="finite-level factorization")
    p.add_argument("--input", help="FiniteLevelSystem JSON file")
    p.add_argument("--eps", help="spectrum as JSON list (implies Psi = I)")
    p.set_defaults(func=cmd_factorize)
    p = sub.add_parser("gk", parents=[common], help="integration weight table")
    p.add_argument("--n", type=int)
    p.add_argument("--n-min", type=int, default=1)
    p.add_argument("--n-max", type=int, default=16)
    p.add_argument("--oracle-max", type=int, default=8,
                   help="largest n cross-checked against the completeness oracle")
    p.set_defaults(func=cmd_gk)
    p = sub.add_parser("grid", parents=[common], help="randomized parameter sweep")
    p.add_argument("--example", choices=("ex1", "ex2", "ex3"), required=True)
    p.add_argument("--n", type=int, help="degree for ex3")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--min-mag", type=float, default=0.1)
    p.add_argument("--max-mag", type=float, default=10.0)
    p.add_argument("--params", help="JSON overrides applied to every sample")
    p.set_defaults(func=cmd_grid)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.tol is None:
            args.tol = default_tolerance()
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PGFermiError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
