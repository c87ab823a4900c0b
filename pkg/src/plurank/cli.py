"""Command-line entry point: ``plurank <subcommand> [options]``.

Exit codes: 0 success, 1 invalid usage, 2 domain or parse error, 3 resource
error. Data goes to stdout (or ``--out``), diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import elicitation as el
from . import hierarchy, ingest, measures, moments, oracle, structured
from .errors import DependencyError, DomainError, ParseError, PluRankError, ResourceError
from .plurality import aggregate_from_profile, aggregate_vector, plurality_matrix
from .prefcore import (
    MAX_ENUM_M,
    Euclidean,
    GeneratorSpec,
    ImpartialCulture,
    Mallows,
    MallowsMixture,
    PlackettLuce,
    Profile,
    RankMarginalProfile,
    WalshSinglePeaked,
    Antagonism,
    Custom,
    antagonism,
    generate,
    impartial_culture,
    minority_top,
    symmetric_extremes,
    table1_antagonism,
    two_camp,
    unanimous,
)

ORACLE_M = 7


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(text: str) -> tuple:
    return tuple(float(Fraction(x)) for x in text.replace(",", " ").split())


def _ints(text: str) -> tuple:
    return tuple(int(x) for x in text.replace(",", " ").split())


# ---------------------------------------------------------------------------
# profiles


NAMED = ("ic", "antagonism", "min", "sym", "table1-an", "two-camp", "unanimous")


def _m(args, default: int) -> int:
    return default if args.m is None else args.m


def _named_profile(args) -> Profile:
    name, m = args.profile, _m(args, 3)
    if name == "ic":
        return impartial_culture(m)
    if name == "antagonism":
        return antagonism(m, 0)
    if name == "min":
        return minority_top(m, args.eps1, 0)
    if name == "sym":
        return symmetric_extremes(m, args.eps2, 0)
    if name == "table1-an":
        return table1_antagonism()
    if name == "two-camp":
        return two_camp(m)
    if name == "unanimous":
        return unanimous(range(m))
    raise UsageError(f"unknown profile {name!r}; choose from {', '.join(NAMED)}")


def _load_profile(args) -> Profile:
    if getattr(args, "input", None):
        path = Path(args.input)
        text = path.read_text()
        if path.suffix == ".json":
            return ingest.parse(text, "profile", "json")
        return ingest.parse_soc(text)
    return _named_profile(args)


def _add_profile_args(p):
    p.add_argument("--profile", default="ic", help=f"built-in profile: {', '.join(NAMED)}")
    p.add_argument("--input", help="profile file (.soc or .json) instead of --profile")
    p.add_argument("--m", type=int, help="number of alternatives for built-in profiles (default 3)")
    p.add_argument("--eps1", type=lambda s: float(Fraction(s)), default=0.05)
    p.add_argument("--eps2", type=lambda s: float(Fraction(s)), default=float(Fraction(4, 21)))


def _focal(profile: Profile, label) -> int:
    if label is None:
        return 0
    try:
        return profile.alternatives.index(label)
    except (KeyError, ValueError, IndexError):
        raise DomainError(f"unknown alternative {label!r}") from None


def _oracle_source(profile: Profile):
    if profile.m <= ORACLE_M:
        return oracle.enumerate(profile)
    if isinstance(profile, RankMarginalProfile):
        return oracle.RankLaw(profile)
    return None


def _report_oracle(args, deviations) -> None:
    if not getattr(args, "oracle", False):
        return
    if deviations is None:
        print("oracle: not available for this input", file=sys.stderr)
    else:
        dev = max(deviations, default=0.0)
        print(f"oracle max deviation: {ingest.fmt(float(dev))}", file=sys.stderr)


# ---------------------------------------------------------------------------
# subcommands


def cmd_generate(args):
    m = args.m
    kinds = {
        "ic": lambda: ImpartialCulture(),
        "mallows": lambda: Mallows(_ints(args.center) if args.center else tuple(range(m)), args.phi),
        "mallows-mix": lambda: MallowsMixture(_floats(args.weights) if args.weights else (0.5, 0.5), args.phi),
        "pl": lambda: PlackettLuce(_floats(args.strengths) if args.strengths else tuple(float(m - i) for i in range(m))),
        "walsh": lambda: WalshSinglePeaked(_ints(args.axis) if args.axis else tuple(range(m))),
        "euclidean": lambda: Euclidean(args.dimension),
        "antagonism": lambda: Antagonism(args.focal),
        "custom": lambda: Custom(_floats(args.w), args.focal),
    }
    spec = GeneratorSpec(kinds[args.kind](), m, args.seed)
    return generate(spec, args.n)


def cmd_matrix(args):
    profile = _load_profile(args)
    degrees = args.degree or list(range(2, profile.m + 1))
    M = plurality_matrix(profile, degrees)
    if args.oracle:
        _matrix_oracle(args, profile, M)
    return M


def _alt_records(M, a, label, alpha):
    recs = measures.summary(M, a, label)[1:]
    if alpha is not None:
        recs.append(measures.MeasureRecord("alpha_divisiveness", measures.alpha_divisiveness(M, a, alpha), 3, label))
    return recs


def _oracle_value(src, rec: measures.MeasureRecord, a, alpha):
    ids = {"agreement": ("agreement",), "borda": ("borda", a), "variance": ("var", a), "divisiveness": ("div", a)}
    if rec.measure == "alpha_divisiveness":
        return oracle.brute("alpha_div", src, a, alpha)
    return oracle.brute(*((ids[rec.measure][0], src) + ids[rec.measure][1:]))


def _table2(args):
    m = _m(args, 15)
    profiles = {
        "ic": impartial_culture(m),
        "antagonism": antagonism(m),
        "min": minority_top(m, args.eps1),
        "sym": symmetric_extremes(m, args.eps2),
    }
    rows, devs = [], []
    for name, prof in profiles.items():
        M = plurality_matrix(prof, {2, 3})
        src = oracle.RankLaw(prof)
        for rec in measures.summary(M, 0, prof.alternatives.label(0)):
            if rec.measure == "borda":
                continue
            row = {"profile": name, **rec.as_dict()}
            rows.append(row)
            if args.oracle:
                devs.append(abs(rec.value - _oracle_value(src, rec, 0, None)))
    _report_oracle(args, devs if args.oracle else None)
    return rows


def cmd_measure(args):
    if args.table2:
        return _table2(args)
    profile = _load_profile(args)
    m = profile.m
    if args.pair:
        a, b = (_focal(profile, x) for x in args.pair.split(","))
        M = plurality_matrix(profile, range(2, min(3, m) + 1))
        rep = measures.pair_conflict(M, a, b, args.power)
        if args.oracle:
            src = _oracle_source(profile)
            if isinstance(src, oracle.EnumerationTable):
                o = oracle.pair_quantities(src, a, b, args.power)
                devs = [abs(rep.delta - o["delta"])] + [abs(rep.scores[k] - o[k.lower()]) for k in measures.CONFLICT_RULES]
                _report_oracle(args, devs)
            else:
                _report_oracle(args, None)
        return rep
    if args.rule:
        M = plurality_matrix(profile, range(2, min(3, m) + 1))
        return measures.most_conflictual_pair(M, args.rule, args.power)
    M = plurality_matrix(profile, range(2, min(3, m) + 1))
    alts = range(m) if args.all else [_focal(profile, args.focal)]
    recs = [measures.MeasureRecord("agreement", measures.agreement_index(M), 2)]
    for a in alts:
        recs += _alt_records(M, a, profile.alternatives.label(a), args.alpha)
    if args.oracle:
        src = _oracle_source(profile)
        devs = None
        if src is not None:
            devs = []
            for rec in recs:
                a = 0 if rec.alt is None else profile.alternatives.index(rec.alt)
                if isinstance(src, oracle.RankLaw) and rec.measure in ("divisiveness", "alpha_divisiveness") and a != src.profile.focal:
                    continue
                if np.isnan(rec.value):
                    continue
                devs.append(abs(rec.value - _oracle_value(src, rec, a, args.alpha)))
        _report_oracle(args, devs)
    return recs


def _aggregates(profile: Profile, K: int):
    if profile.m <= MAX_ENUM_M:
        M = plurality_matrix(profile, range(2, min(K + 1, profile.m) + 1))
        return [aggregate_vector(M, a, min(K, profile.m - 1)) for a in range(profile.m)]
    return [aggregate_from_profile(profile, a, K) for a in range(profile.m)]


def cmd_moments(args):
    profile = _load_profile(args)
    K = args.k
    rows, devs = [], []
    src = _oracle_source(profile) if args.oracle else None
    for P in _aggregates(profile, K):
        mv = moments.MomentVector.from_aggregate(P, K)
        row = {"alt": profile.alternatives.label(P.a), "borda": mv.bor}
        row.update({f"M{k}": v for k, v in mv.M.items()})
        row.update(skewness=mv.gamma1, excess_kurtosis=mv.gamma2)
        rows.append(row)
        if src is not None:
            devs += [abs(v - oracle.brute("moment", src, P.a, k)) for k, v in mv.M.items()]
    _report_oracle(args, devs if src is not None else None)
    return rows


def _pearson_family(args):
    m, n, seed = _m(args, 20), args.n, args.seed
    lin = tuple(float(m - i) for i in range(m))
    return {
        "mallows-mix": generate(GeneratorSpec(MallowsMixture((0.5, 0.5), args.phi), m, seed), n),
        "pl-linear": generate(GeneratorSpec(PlackettLuce(lin), m, seed), n),
        "ic": generate(GeneratorSpec(ImpartialCulture(), m, seed), n),
        "antagonism": antagonism(m),
        "min": minority_top(m, args.eps1),
        "sym": symmetric_extremes(m, args.eps2),
    }


def cmd_pearson(args):
    rows = []
    if args.input:
        family = {Path(args.input).stem: _load_profile(args)}
    else:
        family = _pearson_family(args)
    devs = []
    for name, prof in family.items():
        aggs = [aggregate_from_profile(prof, a, 4) for a in range(prof.m)]
        rows += moments.pearson_rows(aggs, name, prof.alternatives.labels, args.bimodality_c)
        src = _oracle_source(prof) if args.oracle else None
        if src is not None:
            devs += [abs(moments.central_moment(P, k) - oracle.brute("moment", src, P.a, k)) for P in aggs for k in (2, 3, 4)]
    if args.oracle:
        _report_oracle(args, devs)
    return rows


# scale giving the reference five-alternative witness, w' = (3, 7, 1, 5, 4)/20
REFERENCE_T = {3: Fraction(1, 20)}


def cmd_witness(args):
    t = Fraction(args.t) if args.t else REFERENCE_T.get(args.d)
    W = hierarchy.build_witness(args.d, t)
    if args.oracle and W.m <= ORACLE_M:
        a, b = W.profiles()
        devs = []
        for prof, w in ((a, W.w), (b, W.w_prime)):
            table = oracle.enumerate(prof)
            for s in range(2, W.m + 1):
                devs.append(abs(float(hierarchy.splur_from_w(w, W.m, s)) - oracle.p_S(table, range(s), 0)))
        _report_oracle(args, devs)
    return W


def _matrix_oracle(args, profile, M) -> None:
    src = _oracle_source(profile)
    devs = None
    if isinstance(src, oracle.EnumerationTable):
        devs = [abs(p - oracle.p_S(src, S, a)) for k in M.degrees for S, a, p, _ in M.entries(k)]
    _report_oracle(args, devs)


def _collapse_oracle(args, profile) -> None:
    if args.oracle:
        _matrix_oracle(args, profile, plurality_matrix(profile))


def cmd_collapse(args):
    m = args.m
    rng = np.random.default_rng(args.seed)
    if args.structure == "pl":
        v = _floats(args.strengths) if args.strengths else tuple(rng.uniform(0.2, 5.0, m))
        prof = generate(GeneratorSpec(PlackettLuce(v), m, args.seed), 0)
        dev = structured.verify_collapse(prof, structured.PL())
        _collapse_oracle(args, prof)
        return {"structure": "pl", "m": m, "strengths": list(v), "max_deviation": dev}
    axis = _ints(args.axis) if args.axis else tuple(range(m))
    prof = generate(GeneratorSpec(WalshSinglePeaked(axis), m, args.seed), 0)
    dev = structured.verify_collapse(prof, structured.SP(axis))
    _collapse_oracle(args, prof)
    return {"structure": "sp", "m": m, "axis": list(axis), "max_deviation": dev, "middle_never_last": structured.middle_never_last(prof, axis)}


def _spec(args):
    return el.AccuracySpec(args.epsilon, args.delta)


def cmd_plan(args):
    spec = _spec(args)
    l = args.degree[0] if args.degree else 2
    if args.population is not None:
        plan = el.choose_protocol(args.population, args.m, l, spec)
    elif args.protocol == "chain":
        plan = el.plan_chain(args.m, l, spec)
    else:
        plan = el.plan_ranking(args.m, l, args.lam, spec, args.k)
    out = plan.as_dict()
    check = el.validate_lambda(plan)
    out["lambda_ok"] = check.ok
    return out


def cmd_frontier(args):
    spec = _spec(args)
    rows = []
    for l in args.degree or [2]:
        for pt in el.pareto_frontier(args.m, l, spec):
            rows.append({"degree": l, "lambda": pt.lam, "B": pt.B, "N": pt.plan.N, "protocol": pt.plan.label, "dominated": pt.dominated})
    return rows


def cmd_simulate(args):
    spec = _spec(args)
    degrees = args.degree or [2]
    if args.fig3:
        return el.fig3_rows(args.m, degrees, spec, args.trials, args.seed)
    profile = _load_profile(args) if args.input or args.profile != "ic" else impartial_culture(_m(args, 5))
    rows = []
    for l in degrees:
        plans = [el.plan_chain(profile.m, l, spec), el.plan_ranking(profile.m, l, None, spec, args.k or profile.m)]
        for plan in plans:
            cov = el.coverage(profile, plan, args.trials, args.seed)
            rows.append({"degree": l, "protocol": plan.label, "N": plan.N, "lambda": plan.lam, "B": plan.B, "trials": args.trials, "coverage": cov})
    return rows


def cmd_bias_demo(args):
    return el.chain_bias_demo()


def cmd_ingest(args):
    if not args.input:
        raise UsageError("ingest needs --input")
    profile = _load_profile(args)
    if args.degree:
        M = plurality_matrix(profile, args.degree)
        if args.oracle:
            _matrix_oracle(args, profile, M)
        return M
    if args.oracle:
        print("oracle: nothing to cross-check without --degree", file=sys.stderr)
    return profile


COMMANDS = {
    "generate": cmd_generate,
    "matrix": cmd_matrix,
    "measure": cmd_measure,
    "moments": cmd_moments,
    "pearson": cmd_pearson,
    "witness": cmd_witness,
    "collapse": cmd_collapse,
    "plan": cmd_plan,
    "frontier": cmd_frontier,
    "simulate": cmd_simulate,
    "bias-demo": cmd_bias_demo,
    "ingest": cmd_ingest,
}

# planning and sampling outputs have no closed form to compare against
NO_ORACLE = {"generate", "plan", "frontier", "simulate", "bias-demo"}

DEFAULT_FORMAT = {"pearson": "csv", "frontier": "csv", "generate": "json"}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--epsilon", type=float, default=0.05)
    common.add_argument("--delta", type=float, default=0.05)
    common.add_argument("--degree", type=int, action="append", help="degree (repeatable)")
    common.add_argument("--out", help="write output to this file")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--oracle", action="store_true", help="cross-check against brute-force enumeration")
    common.add_argument("--bimodality-c", type=float, default=moments.DEFAULT_BIMODALITY_C)

    parser = _Parser(prog="plurank", description="Plurality matrices, disagreement measures and elicitation planning.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("generate", parents=[common], help="sample or build a profile")
    p.add_argument("--kind", default="ic", choices=("ic", "mallows", "mallows-mix", "pl", "walsh", "euclidean", "antagonism", "custom"))
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--n", type=int, default=0, help="voters to sample; 0 gives the analytic profile")
    p.add_argument("--phi", type=float, default=0.5)
    p.add_argument("--center")
    p.add_argument("--weights")
    p.add_argument("--strengths")
    p.add_argument("--axis")
    p.add_argument("--dimension", type=int, default=1)
    p.add_argument("--focal", type=int, default=0)
    p.add_argument("--w")

    p = sub.add_parser("matrix", parents=[common], help="plurality matrix of a profile")
    _add_profile_args(p)

    p = sub.add_parser("measure", parents=[common], help="agreement, Borda, variance, divisiveness, conflict")
    _add_profile_args(p)
    p.add_argument("--focal")
    p.add_argument("--all", action="store_true", help="report every alternative")
    p.add_argument("--table2", action="store_true", help="the four built-in m=15 profiles")
    p.add_argument("--alpha", type=float)
    p.add_argument("--pair", help="conflict report for 'a,b'")
    p.add_argument("--rule", choices=measures.CONFLICT_RULES, help="most conflictual pair under a rule")
    p.add_argument("--power", type=float, default=1.0, help="p-MaxPolar exponent")

    p = sub.add_parser("moments", parents=[common], help="central moments of every rank")
    _add_profile_args(p)
    p.add_argument("--k", type=int, default=4)

    p = sub.add_parser("pearson", parents=[common], help="skewness / excess-kurtosis plot data")
    _add_profile_args(p)
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--phi", type=float, default=0.3)

    p = sub.add_parser("witness", parents=[common], help="profiles agreeing up to degree d")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--t", help="perturbation scale, e.g. 1/20 (default: 1/20 for d=3, else the largest scale keeping entries >= 0.01)")

    p = sub.add_parser("collapse", parents=[common], help="rebuild all degrees from pairwise data")
    p.add_argument("--structure", choices=("pl", "sp"), default="pl")
    p.add_argument("--m", type=int, default=5)
    p.add_argument("--strengths")
    p.add_argument("--axis")

    p = sub.add_parser("plan", parents=[common], help="sample-complexity plan")
    p.add_argument("--m", type=int, default=10)
    p.add_argument("--protocol", choices=("chain", "ranking"), default="chain")
    p.add_argument("--lambda", dest="lam", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--population", type=int, help="choose the lowest-load protocol for this many voters")

    p = sub.add_parser("frontier", parents=[common], help="load/budget trade-off points")
    p.add_argument("--m", type=int, default=10)

    p = sub.add_parser("simulate", parents=[common], help="protocol coverage or load vs population data")
    _add_profile_args(p)
    p.add_argument("--k", type=int)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--fig3", action="store_true", help="per-load optimal protocol with stopping-time percentiles")

    sub.add_parser("bias-demo", parents=[common], help="transitive-inference bias example")

    p = sub.add_parser("ingest", parents=[common], help="parse a .soc file")
    _add_profile_args(p)
    return parser


def _render(result, fmt: str) -> str:
    return ingest.export(result, fmt)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError("a subcommand is required")
        for name in ("epsilon", "delta"):
            if not 0 < getattr(args, name) < 1:
                raise UsageError(f"--{name} must lie in (0, 1)")
        result = COMMANDS[args.command](args)
        if args.oracle and args.command in NO_ORACLE:
            print("oracle: nothing to cross-check for this subcommand", file=sys.stderr)
        fmt = args.format or DEFAULT_FORMAT.get(args.command, "json")
        text = _render(result, fmt)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ResourceError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return 3
    except (DomainError, ParseError, DependencyError, PluRankError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
