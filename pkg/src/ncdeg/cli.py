"""Command-line surface.

Every run prints a report (a table, or canonical JSON with --json) that
is a pure function of (instance, seed, version).  Duals are always part
of the JSON report so that `ncdeg verify report.json instance.json` can
re-check feasibility and strong duality without trusting the original
run.  Exit codes: 0 computed, 2 computed but the headline value is -inf
or the membership verdict is negative, 1 any error.
"""

import argparse
import json
import random
import sys
from fractions import Fraction

from . import __version__
from .apps import (
    bl_membership_rank2,
    brute_force_matching_oracles,
    build_edmonds,
    build_matroid_intersection,
    build_matroid_matching,
    fmp_lp_oracle,
)
from .degdet import (
    DualSolution,
    NEG_INF,
    deg_subdet,
    hungarian_deg_det,
    symmetric_hungarian,
    verify_dual,
)
from .errors import NcdegError, ParseError
from .instances import ParsedInstance, parse_text
from .mvsp import nc_rank
from .ratfunc import Poly, RatFn, RationalMatrix
from .symbolic import (
    Delta_blowup_oracle,
    RationalSymbolicMatrix,
    WeightedSymbolicMatrix,
    random_rank,
)

ENGINE_KINDS = ("symbolic", "weighted", "bipartite", "matroid-pair")


class _UsageError(NcdegError, ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


# ---------------------------------------------------------------------------
# JSON encoding of values and duals


def enc_num(v):
    if v == NEG_INF:
        return None
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return int(v)


def dec_num(v, ctx="value"):
    if v is None:
        return NEG_INF
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, int) and not isinstance(v, bool):
        return v
    raise ParseError(f"{ctx}: expected null, int, or 'num/den'")


def _enc_ratfn(f: RatFn):
    return [list(f.num.c), list(f.den.c)]


def _enc_matrix(M):
    if isinstance(M, RationalMatrix):
        return [[_enc_ratfn(x) for x in row] for row in M.rows]
    return M.tolist()


def _dec_matrix(data, F, mode):
    if mode == "monomial":
        import numpy as np

        return np.array(data, dtype=np.int64) % F.p
    rows = [
        [RatFn(Poly(F, e[0]), Poly(F, e[1])) for e in row] for row in data
    ]
    return RationalMatrix(F, rows)


def enc_dual(sol: DualSolution):
    return {
        "mode": sol.mode,
        "alpha": [enc_num(a) for a in sol.alpha],
        "beta": [enc_num(b) for b in sol.beta],
        "P": _enc_matrix(sol.P),
        "Q": _enc_matrix(sol.Q),
    }


def dec_dual(data, F) -> DualSolution:
    mode = data["mode"]
    alpha = [dec_num(a, "alpha") for a in data["alpha"]]
    beta = [dec_num(b, "beta") for b in data["beta"]]
    return DualSolution(
        alpha, _dec_matrix(data["P"], F, mode), beta, _dec_matrix(data["Q"], F, mode), mode, F
    )


# ---------------------------------------------------------------------------
# instance -> matrix adapters


def _load(path, prime=None) -> ParsedInstance:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise ParseError(str(e)) from None
    if prime is not None:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None
        if isinstance(doc, dict) and isinstance(doc.get("field"), dict):
            doc["field"]["p"] = prime
        text = json.dumps(doc)
    return parse_text(text, name=str(path))


def _weighted(inst: ParsedInstance) -> WeightedSymbolicMatrix:
    kind, F, obj = inst
    if kind == "weighted":
        return obj
    if kind == "symbolic":
        return WeightedSymbolicMatrix(obj, [0] * obj.n_terms)
    if kind == "bipartite":
        return build_edmonds(obj, F)
    if kind == "matroid-pair":
        return build_matroid_intersection(obj)
    if kind == "lines":
        return build_matroid_matching(obj)
    raise _UsageError(f"kind {kind!r} has no weighted matrix; use bl-member")


def _base_matrix(inst: ParsedInstance):
    kind, F, obj = inst
    if kind == "bl":
        return build_matroid_matching(obj.lines()).base
    return _weighted(inst).base


def _require_kind(inst, allowed, command):
    if inst.kind not in allowed:
        raise _UsageError(
            f"{command} expects kind in {{{', '.join(allowed)}}}, got {inst.kind!r}"
        )


# ---------------------------------------------------------------------------
# report assembly


def _report(args, inst, values, duals, iterations, guarantee, exit_code):
    return {
        "version": __version__,
        "command": args.command,
        "kind": inst.kind,
        "field": {"p": inst.F.p},
        "seed": args.seed,
        "trials": args.trials,
        "solver": getattr(args, "solver", None),
        "values": values,
        "duals": duals,
        "iterations": iterations,
        "guarantee": guarantee,
        "exit": exit_code,
    }


def _profile_report(args, inst, prof, target_level):
    values = {str(l): enc_num(prof.values[l]) for l in range(prof.n + 1)}
    duals = {str(l): enc_dual(sol) for l, sol in sorted(prof.duals.items())}
    code = 2 if prof.values.get(target_level, 0) == NEG_INF else 0
    return _report(
        args,
        inst,
        values,
        duals,
        prof.meta["iterations"],
        prof.meta["guarantee"],
        code,
    )


def _print_report(report, as_json, out=None):
    out = out if out is not None else sys.stdout
    if as_json:
        out.write(json.dumps(report, indent=2) + "\n")
        return
    cmd = report["command"]
    out.write(f"ncdeg {cmd} (p={report['field']['p']}, seed={report['seed']})\n")
    vals = report["values"]
    if cmd in ("subdet", "hungarian", "oracle"):
        for l, v in vals.items():
            out.write(f"  Delta_{l} = {'-inf' if v is None else v}\n")
    elif cmd == "degdet":
        v = vals["deg_det"]
        out.write(f"  deg Det = {'-inf' if v is None else v}\n")
    elif cmd == "ncrank":
        out.write(f"  nc-rank = {vals['nc_rank']} ({vals['rows']}x{vals['cols']})\n")
    elif cmd == "fmm":
        for l, v in vals["curve"].items():
            out.write(f"  nu_{l} = {'-inf' if v is None else v}\n")
        out.write(f"  max weight = {vals['best']}\n")
    elif cmd == "bl-member":
        out.write(f"  member: {vals['member']}\n")
        if vals["certificate"] is not None:
            out.write(f"  certificate: {json.dumps(vals['certificate'])}\n")
    out.write(f"  guarantee: {report['guarantee']}\n")


# ---------------------------------------------------------------------------
# subcommands


def _cmd_ncrank(args):
    inst = _load(args.instance, args.prime)
    A = _base_matrix(inst)
    rng = random.Random(args.seed)
    r = nc_rank(A, rng, args.trials)
    ordinary = random_rank(A, random.Random(args.seed), args.trials)
    values = {
        "nc_rank": r,
        "rank": ordinary,
        "rows": A.n_rows,
        "cols": A.n_cols,
    }
    return _report(args, inst, values, {}, None, "monte-carlo", 0)


def _cmd_degdet(args):
    inst = _load(args.instance, args.prime)
    _require_kind(inst, ENGINE_KINDS, "degdet")
    B = RationalSymbolicMatrix.from_weighted(_weighted(inst))
    prof = deg_subdet(B, args.solver, random.Random(args.seed))
    v = prof.values[B.n]
    duals = {}
    if B.n in prof.duals:
        duals[str(B.n)] = enc_dual(prof.duals[B.n])
    return _report(
        args,
        inst,
        {"deg_det": enc_num(v)},
        duals,
        prof.meta["iterations"],
        prof.meta["guarantee"],
        2 if v == NEG_INF else 0,
    )


def _cmd_subdet(args):
    inst = _load(args.instance, args.prime)
    _require_kind(inst, ENGINE_KINDS, "subdet")
    B = RationalSymbolicMatrix.from_weighted(_weighted(inst))
    prof = deg_subdet(B, args.solver, random.Random(args.seed))
    return _profile_report(args, inst, prof, B.n)


def _cmd_hungarian(args):
    inst = _load(args.instance, args.prime)
    _require_kind(inst, ENGINE_KINDS, "hungarian")
    Ac = _weighted(inst)
    prof = hungarian_deg_det(Ac, args.solver, random.Random(args.seed))
    return _profile_report(args, inst, prof, prof.n)


def _cmd_fmm(args):
    inst = _load(args.instance, args.prime)
    _require_kind(inst, ("lines",), "fmm")
    H = inst.obj
    if H.m == 0:
        values = {"best": 0, "curve": {"0": 0}}
        return _report(args, inst, values, {}, 0, "strong", 0)
    A = build_matroid_matching(H)
    solver = None if args.solver == "auto" else args.solver
    prof = symmetric_hungarian(A.base, H.weights, solver, random.Random(args.seed))
    curve = {}
    best = Fraction(0)
    for l in range(prof.n + 1):
        v = prof.values[l]
        if v == NEG_INF:
            curve[str(l)] = None
        else:
            half = Fraction(int(v), 2)
            curve[str(l)] = enc_num(half)
            best = max(best, half)
    values = {"best": enc_num(best), "curve": curve}
    duals = {str(l): enc_dual(sol) for l, sol in sorted(prof.duals.items())}
    return _report(
        args,
        inst,
        values,
        duals,
        prof.meta["iterations"],
        prof.meta["guarantee"],
        0,
    )


def _cmd_bl_member(args):
    inst = _load(args.instance, args.prime)
    _require_kind(inst, ("bl",), "bl-member")
    ok, cert = bl_membership_rank2(inst.obj)
    if cert is not None:
        cert = dict(cert)
        for key in ("lhs", "rhs"):
            if key in cert:
                cert[key] = enc_num(Fraction(cert[key]))
    values = {"member": ok, "certificate": cert}
    return _report(args, inst, values, {}, None, "strong", 0 if ok else 2)


def _cmd_oracle(args):
    inst = _load(args.instance, args.prime)
    kind, F, obj = inst
    rng = random.Random(args.seed)
    if kind in ("bipartite", "matroid-pair"):
        n = obj.n
        curve = {str(l): enc_num(brute_force_matching_oracles(obj, l)) for l in range(n + 1)}
        top = curve[str(n)]
        return _report(args, inst, curve, {}, None, "exhaustive", 2 if top is None else 0)
    if kind == "lines":
        curve = {}
        for l in range(obj.n + 1):
            val, _ = fmp_lp_oracle(obj, ell=l)
            curve[str(l)] = enc_num(val if val == NEG_INF else 2 * val)
        top = curve[str(obj.n)]
        return _report(args, inst, curve, {}, None, "exhaustive", 2 if top is None else 0)
    if kind in ("symbolic", "weighted"):
        Ac = _weighted(inst).pad_square()
        n = Ac.base.n_rows
        curve = {}
        for l in range(n + 1):
            curve[str(l)] = enc_num(Delta_blowup_oracle(Ac, l, args.trials, rng))
        top = curve[str(n)]
        return _report(args, inst, curve, {}, None, "monte-carlo", 2 if top is None else 0)
    raise _UsageError(f"oracle does not handle kind {kind!r}")


def _verify_profile(report, inst, as_general):
    Ac = _weighted(inst)
    target = RationalSymbolicMatrix.from_weighted(Ac) if as_general else Ac
    F = inst.F
    checks = []
    for key, dd in report["duals"].items():
        l = int(key)
        raw = report["values"][key] if key in report["values"] else report["values"]["deg_det"]
        expected = dec_num(raw, f"values[{key}]")
        sol = dec_dual(dd, F)
        checks.append((f"level {l}", verify_dual(sol, target, l, expected)))
    return checks


def _verify_fmm(report, inst):
    H = inst.obj
    A = build_matroid_matching(H)
    Ac = WeightedSymbolicMatrix(A.base, A.c)
    checks = []
    for key, dd in report["duals"].items():
        l = int(key)
        half = dec_num(report["values"]["curve"][key], f"curve[{key}]")
        sol = dec_dual(dd, inst.F)
        checks.append((f"level {l}", verify_dual(sol, Ac, l, 2 * half)))
    return checks


def _cmd_verify(args):
    try:
        with open(args.report) as fh:
            report = json.load(fh)
    except OSError as e:
        raise ParseError(str(e)) from None
    except json.JSONDecodeError as e:
        raise ParseError(f"{args.report}:{e.lineno}:{e.colno}: {e.msg}") from None
    prime = args.prime
    if prime is None and isinstance(report.get("field"), dict):
        prime = report["field"].get("p")
    inst = _load(args.instance, prime)
    cmd = report.get("command")
    if cmd in ("hungarian",):
        checks = _verify_profile(report, inst, as_general=False)
    elif cmd in ("degdet", "subdet"):
        checks = _verify_profile(report, inst, as_general=True)
    elif cmd == "fmm":
        checks = _verify_fmm(report, inst)
    elif cmd == "bl-member":
        ok, cert = bl_membership_rank2(inst.obj)
        same = report["values"]["member"] == ok
        checks = [("verdict", same)]
    elif cmd == "ncrank":
        sub = argparse.Namespace(
            command="ncrank",
            instance=args.instance,
            prime=prime,
            seed=report.get("seed", 0),
            trials=report.get("trials"),
        )
        redo = _cmd_ncrank(sub)
        checks = [("recomputation", redo["values"] == report["values"])]
    elif cmd == "oracle":
        sub = argparse.Namespace(
            command="oracle",
            instance=args.instance,
            prime=prime,
            seed=report.get("seed", 0),
            trials=report.get("trials"),
        )
        redo = _cmd_oracle(sub)
        checks = [("recomputation", redo["values"] == report["values"])]
    else:
        raise ParseError(f"report has no verifiable command (got {cmd!r})")
    ok = all(flag for _, flag in checks)
    out = {
        "version": __version__,
        "command": "verify",
        "report_command": cmd,
        "checks": {name: flag for name, flag in checks},
        "verified": ok,
    }
    if args.json:
        sys.stdout.write(json.dumps(out, indent=2) + "\n")
    else:
        for name, flag in checks:
            sys.stdout.write(f"  {name}: {'ok' if flag else 'FAIL'}\n")
        sys.stdout.write(("verified" if ok else "NOT verified") + "\n")
    return 0 if ok else 1


def _cmd_selftest(args):
    from .scalar import GF
    from .apps import BLDatum, LineCollection, fmm_max_weight
    import numpy as np

    failures = 0

    def check(name, cond):
        nonlocal failures
        sys.stdout.write(f"  {name}: {'ok' if cond else 'FAIL'}\n")
        if not cond:
            failures += 1

    F = GF(65521)
    e = np.eye(3, dtype=np.int64)
    tutte = [
        np.outer(e[i], e[j]) - np.outer(e[j], e[i])
        for i, j in ((0, 1), (0, 2), (1, 2))
    ]
    from .symbolic import SymbolicMatrix

    A = SymbolicMatrix(F, [M % F.p for M in tutte])
    rng = random.Random(args.seed)
    check("triangle rank 2", random_rank(A, rng) == 2)
    check("triangle nc-rank 3", nc_rank(A, random.Random(args.seed)) == 3)

    Ac = WeightedSymbolicMatrix(A, [1, 1, 1])
    prof = hungarian_deg_det(Ac, rng=random.Random(args.seed))
    check(
        "triangle profile 0,1,2,3",
        [prof.values[l] for l in range(4)] == [0, 1, 2, 3],
    )
    check(
        "profile duals verify",
        all(
            verify_dual(prof.duals[l], Ac, l, prof.values[l])
            for l in prof.duals
        ),
    )

    F3 = GF(3)
    H = LineCollection(
        F3, [(e[0], e[1]), (e[0], e[2]), (e[1], e[2])], [1, 1, 1]
    )
    best, _ = fmm_max_weight(H, rng=random.Random(args.seed))
    check("triangle fmm 3/2", best == Fraction(3, 2))

    half = Fraction(1, 2)
    maps = [np.stack([e[0], e[1]]), np.stack([e[0], e[2]]), np.stack([e[1], e[2]])]
    ok1, _ = bl_membership_rank2(BLDatum(F3, maps, [half, half, half]))
    ok2, cert = bl_membership_rank2(
        BLDatum(F3, maps, [half, half, Fraction(3, 4)])
    )
    check("bl accept", ok1)
    check("bl reject with certificate", (not ok2) and cert is not None)

    sys.stdout.write(("selftest passed" if failures == 0 else "selftest FAILED") + "\n")
    return 0 if failures == 0 else 1


# ---------------------------------------------------------------------------
# argument surface


def _build_parser():
    parser = _Parser(prog="ncdeg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, solver=False):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--prime", type=int, default=None)
        sp.add_argument("--trials", type=int, default=None)
        if solver:
            sp.add_argument(
                "--solver",
                choices=("auto", "exhaustive", "bipartite", "matroid"),
                default="auto",
            )
        sp.add_argument("--json", action="store_true")

    for name in ("ncrank", "degdet", "subdet", "hungarian", "fmm", "bl-member", "oracle"):
        sp = sub.add_parser(name)
        sp.add_argument("instance")
        common(sp, solver=name in ("degdet", "subdet", "hungarian", "fmm"))

    sp = sub.add_parser("verify")
    sp.add_argument("report")
    sp.add_argument("instance")
    common(sp)

    sp = sub.add_parser("selftest")
    common(sp)
    return parser


_DISPATCH = {
    "ncrank": _cmd_ncrank,
    "degdet": _cmd_degdet,
    "subdet": _cmd_subdet,
    "hungarian": _cmd_hungarian,
    "fmm": _cmd_fmm,
    "bl-member": _cmd_bl_member,
    "oracle": _cmd_oracle,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "selftest":
            return _cmd_selftest(args)
        report = _DISPATCH[args.command](args)
    except NcdegError as e:
        sys.stderr.write(f"ncdeg: error: {e}\n")
        return 1
    _print_report(report, args.json)
    return report["exit"]


if __name__ == "__main__":
    sys.exit(main())
