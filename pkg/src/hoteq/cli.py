"""Command-line entry point.

Results are printed as JSON on stdout; diagnostics go to stderr.  Exit codes:
0 when something was found or verified, 1 when nothing was found or the check
failed, 2 on usage or data errors.
"""

from __future__ import annotations

import argparse
import sys

from .contdp import el_conditions, quantile_profile, solve_cc
from .core import FiniteSet, HoteqError, make_profile, parse_rational, render
from .deviation import gap_sup
from .dp import dp_solve
from .io import dumps, instance_to_dict, load_instance, make_result
from .reflect import gen_hard, shift_to_low_bits, solve_grid
from .utility import utilities
from .verify import brute_force_solve, is_eps_equilibrium

EXIT_OK, EXIT_NONE, EXIT_ERROR = 0, 1, 2


class UsageError(HoteqError):
    pass


def _rats(values) -> list:
    return [render(v) for v in values]


def _parse_profile(text: str) -> tuple:
    parts = [p for p in text.split(",")]
    try:
        return tuple(parse_rational(p.strip(), strict=True) for p in parts)
    except HoteqError as exc:
        raise UsageError(f"--profile: {exc}") from None


def _parse_rat_flag(text, flag):
    if text is None:
        return None
    try:
        return parse_rational(text, strict=True)
    except HoteqError as exc:
        raise UsageError(f"{flag}: {exc}") from None


def _profile_for(args, inst, extras) -> tuple:
    flag = getattr(args, "profile", None)
    if flag is not None and "profile" in extras:
        raise UsageError("profile given both in the instance file and by --profile")
    if flag is not None:
        prof = _parse_profile(flag)
    elif "profile" in extras:
        prof = extras["profile"]
    else:
        raise UsageError("no profile: pass --profile or include one in the instance file")
    try:
        return make_profile(prof, inst)
    except HoteqError as exc:
        raise UsageError(f"profile: {exc}") from None


# -- subcommands ----------------------------------------------------------------


def cmd_solve(args):
    inst, _ = load_instance(args.instance)
    eps = _parse_rat_flag(args.epsilon, "--epsilon")
    mode = args.mode
    voters = inst.voters
    if mode == "auto":
        if isinstance(inst.space, FiniteSet):
            mode = "dp"
        elif voters.kind == "atoms":
            mode = "grid"
        elif voters.kind == "density":
            mode = "cc"
        else:
            raise UsageError("no solver for mixed voters on an interval")
    guarantee = None
    if mode == "dp":
        prof = dp_solve(inst, eps=eps)
        status = "none" if prof is None else ("equilibrium" if eps is None else "eps_equilibrium")
        if eps is not None:
            guarantee = {"kind": "eps", "eps": render(eps)}
    elif mode == "grid":
        if eps is not None:
            raise UsageError("--epsilon does not apply to the grid solver")
        prof = solve_grid(inst)
        status = "none" if prof is None else "equilibrium"
    elif mode == "cc":
        res = solve_cc(inst, eps)
        prof = res.profile
        status = "eps_equilibrium"
        guarantee = {"kind": res.guarantee, "params": [None if p is None else render(p) for p in res.params]}
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown mode {mode!r}")
    doc = make_result(
        "solve", status, mode=mode,
        profile=None if prof is None else _rats(prof),
        utilities=None if prof is None else _rats(utilities(prof, voters)),
        guarantee=guarantee,
    )
    return doc, EXIT_NONE if prof is None else EXIT_OK


def cmd_verify(args):
    inst, extras = load_instance(args.instance)
    prof = _profile_for(args, inst, extras)
    eps = _parse_rat_flag(args.epsilon, "--epsilon")
    rep = is_eps_equilibrium(prof, inst, eps or 0)
    if rep.is_equilibrium:
        status = "equilibrium" if not eps else "eps_equilibrium"
    else:
        status = "none"
    doc = make_result(
        "verify", status,
        profile=_rats(prof),
        utilities=_rats(rep.per_candidate_utilities),
        minu=render(rep.prop1_minu), maxd=render(rep.prop1_maxd),
        epsilon=None if eps is None else render(eps),
        witness=None if rep.improving_deviation is None else rep.improving_deviation.as_dict(),
    )
    return doc, EXIT_OK if rep.is_equilibrium else EXIT_NONE


def cmd_deviate(args):
    inst, extras = load_instance(args.instance)
    prof = _profile_for(args, inst, extras)
    m = len(prof)
    if not 0 <= args.gap <= m:
        raise UsageError(f"--gap must be between 0 and {m}")
    ext = (float("-inf"),) + prof + (float("inf"),)
    p, q = ext[args.gap], ext[args.gap + 1]
    bounds = None if isinstance(inst.space, FiniteSet) else (inst.space.lo, inst.space.hi)
    rep = gap_sup(p, q, inst.voters, bounds)
    # the gap is harmless when no entrant there beats the weakest candidate
    minu = min(utilities(prof, inst.voters))
    status = "equilibrium" if rep.sup <= minu else "none"
    doc = make_result("deviate", status, gap=args.gap, profile=_rats(prof),
                      min_utility=render(minu), deviation=rep.as_dict())
    return doc, EXIT_OK


def cmd_shift(args):
    inst, extras = load_instance(args.instance)
    prof = _profile_for(args, inst, extras)
    out, trace = shift_to_low_bits(prof, inst)
    doc = make_result("shift", "equilibrium", input=_rats(prof), profile=_rats(out),
                      utilities=_rats(utilities(out, inst.voters)), trace=trace.as_list())
    return doc, EXIT_OK


def cmd_gen_hard(args):
    if args.k < 1:
        raise UsageError("--k must be a positive integer")
    inst, prof = gen_hard(args.k)
    doc = make_result("gen-hard", "equilibrium", k=args.k,
                      instance=instance_to_dict(inst), profile=_rats(prof),
                      utilities=_rats(utilities(prof, inst.voters)))
    return doc, EXIT_OK


def cmd_el_check(args):
    inst, extras = load_instance(args.instance)
    prof = _profile_for(args, inst, extras)
    if args.delta is not None and "delta" in extras:
        raise UsageError("delta given both in the instance file and by --delta")
    delta = _parse_rat_flag(args.delta, "--delta") if args.delta is not None else extras.get("delta")
    if delta is None:
        raise UsageError("no delta: pass --delta or include one in the instance file")
    c = el_conditions(prof, inst, delta)
    ok = all(c)
    doc = make_result("el-check", "equilibrium" if ok else "none", profile=_rats(prof),
                      delta=render(delta), conditions=dict(c._asdict()))
    return doc, EXIT_OK if ok else EXIT_NONE


def cmd_quantiles(args):
    inst, _ = load_instance(args.instance)
    prof = quantile_profile(inst)
    doc = make_result("quantiles", "eps_equilibrium", profile=_rats(prof),
                      utilities=_rats(utilities(prof, inst.voters)),
                      guarantee={"kind": "quantile", "params": [render(inst.total / (inst.m + 1))]})
    return doc, EXIT_OK


def cmd_oracle(args):
    inst, _ = load_instance(args.instance)
    found = sorted(brute_force_solve(inst))
    doc = make_result("oracle", "equilibrium" if found else "none",
                      equilibria=[_rats(p) for p in found], count=len(found))
    return doc, EXIT_OK if found else EXIT_NONE


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hoteq", description="Equilibria of the Hotelling-Downs game.")
    sub = ap.add_subparsers(dest="command", required=True)

    def with_instance(p):
        p.add_argument("--instance", required=True, help="instance file or shipped fixture name")

    p = sub.add_parser("solve", help="find an (eps-)equilibrium")
    with_instance(p)
    p.add_argument("--epsilon")
    p.add_argument("--mode", choices=("auto", "dp", "grid", "cc"), default="auto")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a profile")
    with_instance(p)
    p.add_argument("--profile")
    p.add_argument("--epsilon")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("deviate", help="best entry into one gap")
    with_instance(p)
    p.add_argument("--profile")
    p.add_argument("--gap", type=int, required=True, help="0 is left of s_1, m is right of s_m")
    p.set_defaults(func=cmd_deviate)

    p = sub.add_parser("shift", help="move an equilibrium onto the dyadic grid")
    with_instance(p)
    p.add_argument("--profile")
    p.set_defaults(func=cmd_shift)

    p = sub.add_parser("gen-hard", help="emit a hard instance and its equilibrium")
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_gen_hard)

    p = sub.add_parser("el-check", help="evaluate the four classical conditions")
    with_instance(p)
    p.add_argument("--profile")
    p.add_argument("--delta")
    p.set_defaults(func=cmd_el_check)

    p = sub.add_parser("quantiles", help="quantile profile of a density instance")
    with_instance(p)
    p.set_defaults(func=cmd_quantiles)

    p = sub.add_parser("oracle", help="list every equilibrium on a finite set")
    with_instance(p)
    p.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        doc, code = args.func(args)
    except HoteqError as exc:
        print(f"hoteq {args.command}: {exc}", file=sys.stderr)
        sys.stdout.write(dumps(make_result(args.command, "error", message=str(exc))))
        return EXIT_ERROR
    sys.stdout.write(dumps(doc))
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
