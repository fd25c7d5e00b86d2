"""Command line front end: config files in, deterministic reports out.

A job names a quadric (JSON descriptor or builtin flags), the analyses to
run, and a seed.  Checks execute in dependency order -- structural
validation, the graded algebra, closed-form comparison, symmetries, group
audits, Cayley correspondence -- and a failed check is recorded, never
fatal.  Reports with the same config and seed are byte-identical; wall
clock goes to stderr and enters the report only with --timing.

Exit codes: 0 all checks passed, 1 at least one check failed, 2 the input
could not be used at all.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .cayley import (
    cayley,
    cayley_inverse,
    make_sphere,
    p_tangency_identity,
    sigma_identity_check,
    sphere_hol,
    sphere_to_quadric_check,
)
from .crvec import closed_form_basis, compute_hol, span_equal_fields
from .errors import (
    BadDescriptor,
    CRQError,
    InvalidGrading,
    SingularPoint,
    UnsupportedFamily,
)
from .groups import b_element_lie_basis, bch2, exp_field, gplus, heisenberg, transitive_element
from .modred import BACKEND
from .rationals import rand_rational
from .scalars import QI0, QI1, qi
from .serialize import (
    canonical_json,
    load_json,
    quadric_from_json,
    scalar_to_json,
)
from .star_algebra import mat_unit
from .symmetry import ambient_sample, gamma, sigma, symmetry_suite

ANALYSES = ("hol", "closed_form", "symmetry", "groups", "cayley")

# sampled-check volumes per suite; full matches the documented identities
COUNTS = {
    "fast": {"translation": 5, "gplus": 5, "exp": 5, "cayley": 10, "sigma": 10},
    "full": {"translation": 25, "gplus": 20, "exp": 20, "cayley": 50, "sigma": 50},
}


@dataclass(frozen=True)
class JobConfig:
    descriptor: dict
    analyses: tuple = ("hol",)
    seed: int = 0
    output: str | None = None


def parse_config(obj):
    """A JobConfig from a loaded JSON object, rejecting anything unknown."""
    if not isinstance(obj, dict):
        raise BadDescriptor("config must be a JSON object")
    if "quadric" not in obj:
        raise BadDescriptor("config lacks a quadric descriptor")
    analyses = obj.get("analyses", ["hol"])
    if isinstance(analyses, str):
        analyses = [analyses]
    if not isinstance(analyses, list):
        raise BadDescriptor("analyses must be a list")
    unknown = [a for a in analyses if a not in ANALYSES]
    if unknown:
        raise BadDescriptor(f"unknown analyses {unknown} (known: {list(ANALYSES)})")
    seed = obj.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise BadDescriptor("seed must be an integer in [0, 2^64)")
    output = obj.get("output")
    if output is not None and not isinstance(output, str):
        raise BadDescriptor("output must be a path string")
    ordered = tuple(a for a in ANALYSES if a in analyses)
    return JobConfig(obj["quadric"], ordered, seed, output)


class _Run:
    """One job: accumulates checks and per-stage wall clock."""

    def __init__(self, config, suite):
        self.config = config
        self.suite = suite
        self.counts = COUNTS[suite]
        self.checks = []
        self.timing = {}

    def rng(self, name):
        return random.Random(f"{self.config.seed}:{name}")

    def record(self, name, ok, **detail):
        self.checks.append({"name": name, "ok": ok, "detail": detail})

    def skip(self, name, reason):
        self.checks.append({"name": name, "ok": None, "detail": {"skipped": reason}})

    def timed(self, name, fn, *args, **kwargs):
        t0 = time.perf_counter()
        try:
            return fn(*args, **kwargs)
        finally:
            self.timing[name] = self.timing.get(name, 0.0) + time.perf_counter() - t0


def run(config, suite="fast", with_timing=False):
    """Execute the configured analyses and assemble the report.

    Descriptor problems raise before any computation; check failures are
    recorded in the report and reflected in its "ok" flag only.
    """
    if suite not in COUNTS:
        raise BadDescriptor(f"unknown suite {suite!r}")
    state = _Run(config, suite)
    Q = quadric_from_json(config.descriptor)

    report = {
        "config": {
            "analyses": list(config.analyses),
            "quadric": config.descriptor,
            "seed": config.seed,
            "suite": suite,
        },
        "versions": {"crquadrics": __version__, "modred_backend": BACKEND, "report": 1},
        "quadric": {
            "family": Q.family,
            "codimension": Q.dim_w,
            "cr_dimension": Q.dim_z,
            "v_basis": [[scalar_to_json(c) for c in v] for v in Q.v_basis],
        },
        "checks": state.checks,
    }

    diag = state.timed("validate", Q.validate)
    state.record("structure", diag.pop("ok"), **diag)

    wanted = [a for a in config.analyses]
    if suite == "fast" and Q.family == "type5" and wanted:
        for a in wanted:
            state.skip(a, "type5 runs only in the full suite")
        wanted = []

    L = None
    if wanted:
        L = state.timed("compute_hol", compute_hol, Q)
        report["grading"] = {
            "dims": {str(k): len(L.bases[k]) for k in range(-2, 3)},
            "total": L.total_dim,
        }
        try:
            state.timed("grading", L.check_grading)
            state.record("grading_weights", True)
        except InvalidGrading as exc:
            state.record("grading_weights", False, counterexample=str(exc))

    stages = {
        "closed_form": _closed_form_checks,
        "symmetry": _symmetry_checks,
        "groups": _group_checks,
        "cayley": _cayley_checks,
    }
    for analysis, checker in stages.items():
        if analysis not in wanted:
            continue
        try:
            checker(state, Q, L)
        except CRQError as exc:
            state.record(analysis, False, counterexample=str(exc))

    report["ok"] = all(c["ok"] is not False for c in state.checks)
    if with_timing:
        report["timing"] = {k: round(v, 6) for k, v in state.timing.items()}
    return report, state.timing


def _closed_form_checks(state, Q, L):
    for level in range(-2, 3):
        name = f"closed_form_level_{level}"
        try:
            cf = state.timed("closed_form", closed_form_basis, Q, level)
        except UnsupportedFamily as exc:
            state.skip(name, str(exc))
            continue
        ok = state.timed("closed_form", span_equal_fields, cf, L.bases[level])
        if ok:
            state.record(name, True, dim=len(L.bases[level]))
        else:
            state.record(
                name,
                False,
                counterexample={"closed_form_dim": len(cf), "solver_dim": len(L.bases[level])},
            )


def _symmetry_checks(state, Q, L):
    try:
        # the twisted families carry sigma as their grade-reversing involution
        twisted = Q.model is not None and Q.model.j_twist is not None
        g = sigma(Q) if twisted else gamma(Q)
    except UnsupportedFamily as exc:
        state.skip("property_S", str(exc))
        state.skip("grade_reversal", str(exc))
        return
    rep_s, rep_dm = state.timed(
        "symmetry", symmetry_suite, Q, g, L=L, rng=state.rng("symmetry")
    )
    for name, rep in (("property_S", rep_s), ("grade_reversal", rep_dm)):
        ok = rep.pop("ok")
        rep["grade_flip"] = {str(k): v for k, v in rep["grade_flip"].items()}
        state.record(name, ok, map=g.family, **rep)


def _sample_pair(Q, rng):
    return Q.random_point(rng), Q.random_point(rng)


def _group_checks(state, Q, L):
    rng = state.rng("groups.translation")
    count = state.counts["translation"]
    bad = None
    for _ in range(count):
        p, q = _sample_pair(Q, rng)
        el = state.timed("groups", transitive_element, Q, p, q)
        if el.evaluate(p) != q:
            bad = {"from": _point_json(p), "to": _point_json(q)}
            break
    if bad:
        state.record("translation_transitivity", False, counterexample=bad)
    else:
        state.record("translation_transitivity", True, pairs=count)

    bad = None
    for _ in range(count):
        p, q = _sample_pair(Q, rng)
        ep = state.timed("groups", heisenberg, Q, p)
        eq = state.timed("groups", heisenberg, Q, q)
        er = state.timed("groups", heisenberg, Q, ep.evaluate(q))
        s = Q.random_point(rng)
        if ep.evaluate(eq.evaluate(s)) != er.evaluate(s):
            bad = {"p": _point_json(p), "q": _point_json(q)}
            break
    if bad:
        state.record("translation_composition", False, counterexample=bad)
    else:
        state.record("translation_composition", True, pairs=count)

    _gplus_check(state, Q)
    _exp_checks(state, Q, L)

    name = "linear_lie_containment"
    if state.suite == "fast":
        state.skip(name, "symbolic audit runs only in the full suite")
    elif Q.model is None or Q.model.j_twist is not None:
        state.skip(name, "needs an untwisted matrix model")
    else:
        blie = state.timed("groups", b_element_lie_basis, Q)
        ok = state.timed("groups", span_equal_fields, blie + L.bases[0], L.bases[0])
        state.record(name, ok, dim=len(blie))


def _gplus_check(state, Q):
    name = "positive_half_conjugation"
    try:
        g = gamma(Q)
    except UnsupportedFamily as exc:
        state.skip(name, str(exc))
        return
    rng = state.rng("groups.gplus")
    pt = Q.random_point(rng)
    try:
        el = state.timed("groups", gplus, Q, pt)
    except UnsupportedFamily as exc:
        state.skip(name, str(exc))
        return
    tr = state.timed("groups", heisenberg, Q, pt)
    done = 0
    want = state.counts["gplus"]
    while done < want:
        s = ambient_sample(Q, rng)
        try:
            lhs = el.evaluate(s)
            rhs = g.evaluate(tr.evaluate(g.evaluate(s)))
        except SingularPoint:
            continue
        if lhs != rhs:
            state.record(name, False, counterexample={"at": _point_json(s)})
            return
        done += 1
    state.record(name, True, samples=want)


def _random_negative_field(L, rng):
    # real coefficients only: the algebra is a real span of complex fields
    out = None
    for f in L.bases[-2] + L.bases[-1]:
        term = f.smul(qi(rand_rational(rng, num=3, den=2)))
        out = term if out is None else out + term
    return out


def _exp_checks(state, Q, L):
    rng = state.rng("groups.exp")
    want = state.counts["exp"]
    if not (L.bases[-2] or L.bases[-1]):
        state.skip("exp_bch_step2", "no negative half to integrate")
        return
    xi = _random_negative_field(L, rng)
    eta = _random_negative_field(L, rng)
    e1 = state.timed("groups", exp_field, xi)
    e2 = state.timed("groups", exp_field, eta)
    eb = state.timed("groups", exp_field, bch2(xi, eta))
    for _ in range(want):
        s = Q.random_point(rng)
        if e2.evaluate(e1.evaluate(s)) != eb.evaluate(s):
            state.record("exp_bch_step2", False, counterexample={"at": _point_json(s)})
            return
    state.record("exp_bch_step2", True, samples=want)


def _scalar_beta(model):
    """model.beta as a plain complex matrix when every entry is scalar * unit."""
    A = model.A
    idx = next(i for i, u in enumerate(A.unit) if u)
    rows = []
    for row in model.beta:
        out = []
        for entry in row:
            c = entry[idx] / A.unit[idx]
            if A.smul(c, A.unit) != tuple(entry):
                return None
            out.append(c)
        rows.append(tuple(out))
    return tuple(rows)


def _cayley_checks(state, Q, L):
    names = (
        "cayley_round_trip",
        "sphere_transport",
        "sphere_algebra_dimension",
        "p_field_tangency",
        "sigma_identity",
    )
    model = Q.model
    if model is None or model.j_twist is not None:
        for n in names:
            state.skip(n, "needs an untwisted matrix model")
        return
    beta = _scalar_beta(model)
    if beta is None:
        for n in names:
            state.skip(n, "form does not split over the complex scalars")
        return
    A, m, n = model.A, model.m, model.n
    r = m + n
    alpha = tuple(
        tuple(
            QI1 if i == j and i < m else (beta[i - m][j - m] if i >= m and j >= m else QI0)
            for j in range(r)
        )
        for i in range(r)
    )
    S = make_sphere(A, m, r, alpha)

    rng = state.rng("cayley.roundtrip")
    want = state.counts["cayley"]
    done = 0
    bad = None
    while done < want:
        pt = Q.random_point(rng)
        p = (model.w_to_mat(pt[0]), model.z_to_mat(pt[1]))
        try:
            ball = state.timed("cayley", cayley_inverse, S, p)
        except SingularPoint:
            continue
        if cayley(S, ball) != p:
            bad = {"at": _point_json(pt)}
            break
        done += 1
    if bad:
        state.record("cayley_round_trip", False, counterexample=bad)
    else:
        state.record("cayley_round_trip", True, samples=want)

    rep = state.timed(
        "cayley", sphere_to_quadric_check, S, count=want, rng=state.rng("cayley.transport")
    )
    state.record(
        "sphere_transport", rep["ok"], checked=rep["checked"], skipped=rep["skipped"]
    )

    fields = state.timed("cayley", sphere_hol, S)
    state.record(
        "sphere_algebra_dimension",
        len(fields) == L.total_dim,
        sphere=len(fields),
        quadric=L.total_dim,
    )

    a = tuple(
        tuple(A.unit if (i, j) == (0, 0) else A.zero() for j in range(r))
        for i in range(m)
    )
    state.record("p_field_tangency", state.timed("cayley", p_tangency_identity, S, a))

    if model.beta == mat_unit(A, n):
        rep = state.timed(
            "cayley",
            sigma_identity_check,
            Q,
            count=state.counts["sigma"],
            rng=state.rng("cayley.sigma"),
        )
        state.record(
            "sigma_identity", rep["ok"], checked=rep["checked"], skipped=rep["skipped"]
        )
    else:
        state.skip("sigma_identity", "needs beta = 1")


def _point_json(p):
    return [[scalar_to_json(c) for c in part] for part in p]


# --- front end -------------------------------------------------------------------


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="override the rng seed")
    common.add_argument("--json", metavar="PATH", help="write the JSON report here")
    common.add_argument(
        "--timing", action="store_true", help="embed wall clock in the report"
    )

    parser = argparse.ArgumentParser(
        prog="crquadrics",
        description="Exact graded symmetry algebras of CR-quadrics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", parents=[common], help="run the analyses a config requests")
    pa.add_argument("config", help="path to a JSON job config")

    pv = sub.add_parser("verify", parents=[common], help="run every check against a config")
    pv.add_argument("config", help="path to a JSON job config")
    pv.add_argument("--suite", choices=("fast", "full"), default="fast")

    pb = sub.add_parser("builtin", parents=[common], help="analyze a builtin family")
    pb.add_argument("family", choices=("ex", "ey", "type2", "type5", "tensor"))
    pb.add_argument("--n", type=int)
    pb.add_argument("--k", type=int)
    pb.add_argument("--m", type=int)
    pb.add_argument("--beta", help="JSON matrix of rationals or [re, im] pairs")
    pb.add_argument("--algebra", help="algebra name for the tensor family")
    pb.add_argument(
        "--analyses", default="hol", help="comma list from: " + ", ".join(ANALYSES) + ", or all"
    )
    return parser


def _builtin_descriptor(args):
    if args.family == "ex":
        if args.n is None:
            raise BadDescriptor("ex needs --n")
        k = args.n if args.k is None else args.k
        return {"family": "ex", "params": {"n": args.n, "k": k}}
    if args.family == "ey":
        if args.m is None or args.n is None:
            raise BadDescriptor("ey needs --m and --n")
        if args.beta is None:
            beta = [["1" if i == j else "0" for j in range(args.n)] for i in range(args.n)]
        else:
            beta = load_json(args.beta, what="--beta")
        return {"family": "ey", "params": {"m": args.m, "n": args.n, "beta": beta}}
    if args.family == "type2":
        if args.m is None:
            raise BadDescriptor("type2 needs --m")
        return {"family": "type2", "params": {"m": args.m}}
    if args.family == "type5":
        return {"family": "type5", "params": {}}
    if args.algebra is None:
        raise BadDescriptor("tensor needs --algebra")
    n = 1 if args.n is None else args.n
    k = n if args.k is None else args.k
    return {
        "family": "tensor",
        "params": {"base": {"family": "ex", "params": {"n": n, "k": k}}, "algebra": args.algebra},
    }


def _config_from_args(args):
    if args.command in ("analyze", "verify"):
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise BadDescriptor(f"cannot read config: {exc}") from None
        config = parse_config(load_json(text, what=f"config {args.config}"))
        if args.command == "verify":
            config = JobConfig(config.descriptor, ANALYSES, config.seed, config.output)
    else:
        requested = args.analyses.split(",") if args.analyses != "all" else list(ANALYSES)
        config = parse_config(
            {"quadric": _builtin_descriptor(args), "analyses": requested}
        )
    if args.seed is not None:
        config = JobConfig(config.descriptor, config.analyses, args.seed, config.output)
    if args.json is not None:
        config = JobConfig(config.descriptor, config.analyses, config.seed, args.json)
    return config


def _print_report(report, stream):
    q = report["quadric"]
    print(
        f"quadric {q['family']}: codimension {q['codimension']}, "
        f"{q['cr_dimension']} CR-directions",
        file=stream,
    )
    if "grading" in report:
        dims = report["grading"]["dims"]
        row = " ".join(str(dims[str(k)]) for k in range(-2, 3))
        print(f"grades -2..2: {row}   total {report['grading']['total']}", file=stream)
    passed = failed = skipped = 0
    for c in report["checks"]:
        if c["ok"] is None:
            skipped += 1
            print(f"SKIP {c['name']} ({c['detail']['skipped']})", file=stream)
        elif c["ok"]:
            passed += 1
            print(f"PASS {c['name']}", file=stream)
        else:
            failed += 1
            detail = json.dumps(c["detail"], sort_keys=True)
            print(f"FAIL {c['name']} {detail}", file=stream)
    print(f"{passed} passed, {failed} failed, {skipped} skipped", file=stream)


def main(argv=None):
    args = _build_parser().parse_args(argv)
    suite = getattr(args, "suite", "fast")
    try:
        config = _config_from_args(args)
        report, timing = run(config, suite=suite, with_timing=args.timing)
    except CRQError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for stage, seconds in timing.items():
        print(f"# {stage}: {seconds:.3f}s", file=sys.stderr)
    _print_report(report, sys.stdout)
    if config.output:
        Path(config.output).write_text(canonical_json(report))
        print(f"# report written to {config.output}", file=sys.stderr)
    return 0 if report["ok"] else 1


if __name__ == "__main__":
    sys.exit(main())
