"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 size cap refusal,
3 verification failure.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
import time

import numpy as np

from . import fixtures
from .community import extract_community
from .core import RankOneFactors, l0_error, l1_error
from .heuristics import (
    SolverConfig,
    cut_norm_lower_bound,
    inf1_lower_bound,
    l1_coordinate_descent,
    l1_lra_rank1,
    l1_lra_sign,
    level_decompose,
    move2,
    power_iteration_rank1,
)
from .io import (
    MatrixFormatError,
    format_number,
    parse_factors,
    parse_graph,
    parse_matrix,
    serialize_factors,
    serialize_matrix,
)
from .oracles import (
    DEFAULT_CAP,
    bmf_rank1_exact,
    cut_norm_exact,
    inf1_norm_exact,
    l1_lra_rank1_exact_sign,
)
from .reductions import (
    binarize_phi,
    cutnorm_doubling,
    diag_lift,
    maxcut_gadget,
    verify_gadget_threshold,
)
from .validation import EnumerationCapError, is_binary_matrix, is_sign_matrix
from .verification import run_suite

EXIT_OK, EXIT_USAGE, EXIT_CAP, EXIT_FAIL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class VerificationFailed(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class Report:
    """Ordered ``key: value`` lines; identical inputs give identical text."""

    def __init__(self, argv):
        self.lines = [("command", " ".join(argv))]

    def add(self, key, value):
        if isinstance(value, np.ndarray):
            value = " ".join(format_number(x) for x in value.ravel())
        elif isinstance(value, (float, np.floating)):
            value = format_number(value)
        self.lines.append((key, str(value)))

    def add_matrix(self, key, M, decimals=None):
        M = np.asarray(M)
        self.lines.append((key, f"{M.shape[0]}x{M.shape[1]}"))
        for row in M:
            if decimals is None:
                text = " ".join(format_number(x) for x in row)
            else:
                text = " ".join(f"{x:.{decimals}f}" for x in row)
            self.lines.append(("", "  " + text))

    def render(self):
        return "".join(f"{k}: {v}\n" if k else f"{v}\n" for k, v in self.lines)


def _read_text(path):
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _domain(M):
    if is_sign_matrix(M):
        return "sign"
    if is_binary_matrix(M):
        return "binary"
    return "real"


def _digest(report, text, M=None):
    if M is not None:
        report.add("input", f"{M.shape[0]}x{M.shape[1]} {_domain(M)}")
    report.add("input_sha256", hashlib.sha256(text.encode()).hexdigest()[:16])


def _self_check(ok, what):
    if not ok:
        raise VerificationFailed(f"certificate self-check failed for {what}")


def _config(args, restarts=None):
    return SolverConfig(restarts=restarts or args.restarts, rng_seed=args.seed)


def cmd_norm(args, report):
    text = _read_text(args.input)
    A = parse_matrix(text)
    _digest(report, text, A)
    report.add("kind", args.kind)
    m, n = A.shape
    if args.exact:
        oracle = inf1_norm_exact if args.kind == "inf1" else cut_norm_exact
        res = oracle(A, cap=args.cap, n_jobs=args.threads)
        recomputed = float(res.u_star @ A @ res.v_star)
        _self_check(recomputed == res.value if args.kind == "inf1"
                    else abs(recomputed) == res.value, "norm")
        report.add("method", "exact")
        report.add("value", res.value)
        report.add("u", res.u_star)
        report.add("v", res.v_star)
        report.add("enumerated", res.enumerated)
    else:
        cfg = _config(args)
        if args.kind == "inf1":
            value, f = inf1_lower_bound(A, cfg, n_jobs=args.threads)
            _self_check(float(f.u @ A @ f.v) == value, "norm")
        else:
            value, f = cut_norm_lower_bound(A, cfg, n_jobs=args.threads)
            _self_check(abs(float(f.u @ A @ f.v)) == value, "norm")
        report.add("method", "heuristic")
        report.add("value", value)
        report.add("bound", "lower bound (certified by the factors below)")
        if args.kind == "inf1" and is_sign_matrix(A):
            # for sign input the same pair is an l1 certificate
            _self_check(l1_error(A, f) == m * n - value, "norm")
            report.add("l1_error", l1_error(A, f))
        report.add("u", f.u)
        report.add("v", f.v)
        report.add("restarts", cfg.restarts)
    report.add("seed", args.seed)


def _load_init(spec, shape):
    if spec in ("svd", "random"):
        return spec, None
    if not spec.startswith("file:"):
        raise UsageError("--init must be svd, random or file:PATH")
    f = parse_factors(_read_text(spec[5:]))
    if f.shape != shape:
        raise UsageError(f"init factors are {f.shape[0]}x{f.shape[1]}, matrix is "
                         f"{shape[0]}x{shape[1]}")
    return "given", f


def cmd_lra(args, report):
    text = _read_text(args.input)
    M = parse_matrix(text)
    _digest(report, text, M)
    report.add("p", args.p)
    if args.p == 0:
        if not is_binary_matrix(M):
            raise UsageError(
                "--p 0 needs a {0,1} matrix: the rank-one l0 problem reduces to binary "
                "factorization only for binary input (support binarization argument)")
        if args.exact:
            res = bmf_rank1_exact(M, cap=args.cap, n_jobs=args.threads)
            f, method = res.factors, "exact"
        else:
            cfg = _config(args, args.restarts or 20)
            com = extract_community(M, cfg, mode="heuristic")
            u = np.zeros(M.shape[0])
            v = np.zeros(M.shape[1])
            u[[i - 1 for i in com.left]] = 1
            v[[j - 1 for j in com.right]] = 1
            f, method = RankOneFactors(u, v), "heuristic"
            report.add("restarts", cfg.restarts)
        report.add("method", method)
        report.add("objective", l0_error(M, f))
        report.add("u", f.u)
        report.add("v", f.v)
    elif args.exact:
        if not is_sign_matrix(M):
            raise UsageError(
                "--p 1 --exact needs a {-1,+1} matrix: sign factors are provably "
                "optimal only for sign input")
        res = l1_lra_rank1_exact_sign(M, cap=args.cap, n_jobs=args.threads)
        _self_check(l1_error(M, res.factors) == res.value, "lra")
        report.add("method", "exact")
        report.add("objective", res.value)
        report.add("mismatches", l0_error(M, res.factors))
        report.add("u", res.u_star)
        report.add("v", res.v_star)
    else:
        mode, init = _load_init(args.init, M.shape)
        restarts = args.restarts or (1 if init is not None else 20)
        cfg = SolverConfig(restarts=restarts, rng_seed=args.seed, init_mode=mode)
        report.add("method", "heuristic")
        report.add("init", args.init)
        report.add("restarts", restarts)
        if is_sign_matrix(M):
            res = l1_lra_sign(M, cfg, init=init, n_jobs=args.threads)
            report.add("cd_objective", res.cd_objective)
            report.add("cd_u", res.cd_factors.u)
            report.add("cd_v", res.cd_factors.v)
            for k, step in enumerate(res.steps, start=1):
                report.add(f"rounding_step_{k}",
                           f"{step.move} levels={step.levels} "
                           f"delta1={format_number(step.delta1)} "
                           f"delta2={format_number(step.delta2)} "
                           f"objective={format_number(step.objective)}")
            _self_check(l1_error(M, res.factors) == res.objective, "lra")
            report.add("objective", res.objective)
            report.add("mismatches", l0_error(M, res.factors))
            report.add("u", res.factors.u)
            report.add("v", res.factors.v)
        else:
            res = l1_lra_rank1(M, cfg, init=init, n_jobs=args.threads)
            _self_check(l1_error(M, res.factors) == res.trace[-1], "lra")
            report.add("objective", res.trace[-1])
            report.add("u", res.factors.u)
            report.add("v", res.factors.v)
    report.add("seed", args.seed)


def _write_output(args, report, content):
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(content)
        report.add("output", args.out)
    else:
        report.lines.append(("", content.rstrip("\n")))


def _is_factors_file(text):
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            return line.split()[0] == "factors"
    return False


def cmd_reduce(args, report):
    text = _read_text(args.input)
    if args.what == "gadget":
        G = parse_graph(text)
        _digest(report, text)
        p = "auto" if args.p == "auto" else int(args.p)
        inst = maxcut_gadget(G, p)
        E, V, pp = G.num_edges, G.num_vertices, inst.p
        comments = [
            f"p={pp} sound={str(inst.sound).lower()}",
            f"num_vertices={V} num_edges={E}",
            f"d_star(c) = {2 * pp * pp}*c - {E * V * pp}*sqrt({pp})",
        ]
        report.add("construction", "gadget")
        report.add("p", pp)
        report.add("sound", str(inst.sound).lower())
        report.add("shape", f"{inst.A.shape[0]}x{inst.A.shape[1]}")
        _write_output(args, report, serialize_matrix(inst.A, comments))
        return
    if args.what == "phi" and _is_factors_file(text):
        f = parse_factors(text)
        _digest(report, text)
        g = RankOneFactors(binarize_phi(f.u), binarize_phi(f.v))
        report.add("construction", "phi")
        _write_output(args, report, serialize_factors(g))
        return
    M = parse_matrix(text)
    _digest(report, text, M)
    if args.what == "phi":
        out = binarize_phi(M)
    elif args.what == "double":
        out = cutnorm_doubling(M)
        report.add("zero_row_col_sums",
                   str(bool(not out.sum(axis=0).any() and not out.sum(axis=1).any())).lower())
    else:
        if args.r < 1:
            raise UsageError("--r must be a positive integer")
        out = diag_lift(M, args.r)
        report.add("r", args.r)
    report.add("construction", args.what)
    report.add("shape", f"{out.shape[0]}x{out.shape[1]}")
    _write_output(args, report, serialize_matrix(out))


# CLI suite name -> (library suite, max rows, max columns)
_SUITES = {
    "lemma3": ("l1_duality", 5, 5),
    "doubling": ("doubling", 5, 5),
    "theorem2": ("sign_optimum", 5, 5),
}


def cmd_verify(args, report):
    if args.what == "gadget":
        if not args.input or args.cstar is None:
            raise UsageError("--what gadget needs --in GRAPH and --cstar N")
        text = _read_text(args.input)
        G = parse_graph(text)
        _digest(report, text)
        inst = maxcut_gadget(G, "auto" if args.p == "auto" else int(args.p))
        rep = verify_gadget_threshold(inst, args.cstar, n_jobs=args.threads)
        report.add("p", inst.p)
        report.add("sound", str(rep.sound).lower())
        report.add("c_star", rep.c_star)
        report.add("d_star", rep.d_star)
        report.add("max_cut", rep.max_cut)
        report.add("max_cut_side", " ".join(map(str, rep.max_cut_side)))
        report.add("best_embedded_value", rep.best_embedded_value)
        report.add("best_embedded_side", " ".join(map(str, rep.best_embedded_side)))
        report.add("embedded_meets_threshold", str(rep.embedded_meets_threshold).lower())
        report.add("certification", rep.certification)
        if rep.inf1_value is not None:
            report.add("inf1_value", rep.inf1_value)
            report.add("inf1_meets_threshold", str(rep.inf1_meets_threshold).lower())
        report.add("result", "pass" if rep.passed else "fail")
        if not rep.passed:
            raise VerificationFailed("gadget threshold check failed")
        return
    suite, m, n = _SUITES[args.what]
    res = run_suite(suite, args.trials, seed=args.seed, max_m=m, max_n=n)
    report.add("suite", args.what)
    report.add("trials", res.trials)
    report.add("seed", args.seed)
    for key, val in sorted(res.stats.items()):
        report.add(key, val)
    report.add("failures", len(res.failures))
    for A, fails in res.failures[:3]:
        report.add("counterexample", "; ".join(fails))
        report.add_matrix("matrix", A)
    report.add("result", "pass" if res.passed else "fail")
    if not res.passed:
        raise VerificationFailed(f"{args.what} suite failed")


def demo_community(report):
    M, Mt = fixtures.COMMUNITY, fixtures.COMMUNITY_PERTURBED
    report.add_matrix("community", M)
    report.add_matrix("perturbed", Mt)
    approx = power_iteration_rank1(Mt).matrix()
    report.add_matrix("l2_rank_one", approx, decimals=4)
    dev = float(np.abs(approx - fixtures.COMMUNITY_PERTURBED_L2).max())
    report.add("l2_max_deviation_from_reference", f"{dev:.4f}")
    res = bmf_rank1_exact(Mt)
    report.add("l0_optimum_mismatches", res.value)
    report.add("l0_u", res.u_star)
    report.add("l0_v", res.v_star)
    report.add("l0_recovers_community",
               str(bool(np.array_equal(res.factors.matrix(), M))).lower())


def demo_trap(report):
    A = fixtures.TRAP
    report.add_matrix("matrix", A)
    x = fixtures.TRAP_LOCAL_X
    f = fixtures.trap_stationary(x)
    report.add("trap_x", "sqrt(2)/2")
    report.add("trap_u", f.u)
    report.add("trap_v", f.v)
    report.add("trap_l1_error", f"{l1_error(A, f):.6f}")
    cd = l1_coordinate_descent(A, f)
    report.add("cd_trace", " ".join(f"{t:.6f}" for t in cd.trace))
    report.add("cd_stalled", str(bool(abs(cd.trace[-1] - cd.trace[0]) < 1e-9)).lower())
    d = level_decompose(cd.factors, A)
    g, deltas = move2(A, d)
    report.add("move2_delta", f"{deltas.delta2:.6f}")
    report.add("move2_u", g.u)
    report.add("move2_v", g.v)
    report.add("move2_l1_error", l1_error(A, g))
    opt = l1_lra_rank1_exact_sign(A)
    report.add("optimal_l1_error", opt.value)
    report.add("optimal_mismatches", l0_error(A, opt.factors))
    report.add("inf1_norm", inf1_norm_exact(A).value)


DEMOS = {"example1": demo_community, "remark2": demo_trap}


def cmd_demo(args, report):
    if args.name not in DEMOS:
        raise UsageError(f"unknown demo {args.name!r}; choose from {', '.join(DEMOS)}")
    DEMOS[args.name](report)


def build_parser():
    parser = _Parser(prog="robust-rank1",
                     description="Rank-one robust approximation, norms and reductions.")
    parser.add_argument("--threads", type=int, default=None, help="worker threads")
    parser.add_argument("--timing", action="store_true",
                        help="append wall time (breaks byte-identical output)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def exact_flags(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--exact", dest="exact", action="store_true", default=True)
        g.add_argument("--heur", dest="exact", action="store_false")
        p.add_argument("--cap", type=int, default=DEFAULT_CAP,
                       help="enumeration cap on the shorter dimension")

    p = sub.add_parser("norm", help="inf->1 norm or cut norm")
    p.add_argument("--kind", choices=["inf1", "cut"], required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=20)
    exact_flags(p)
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("lra", help="rank-one l0 or l1 approximation")
    p.add_argument("--p", type=int, choices=[0, 1], required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--init", default="svd", help="svd, random or file:PATH")
    exact_flags(p)
    p.set_defaults(func=cmd_lra)

    p = sub.add_parser("reduce", help="build a derived matrix")
    p.add_argument("--what", choices=["phi", "double", "gadget", "lift"], required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--p", default="auto", help="power of two or 'auto'")
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("verify", help="run a property suite")
    p.add_argument("--what", choices=["gadget", "doubling", "theorem2", "lemma3"],
                   required=True)
    p.add_argument("--in", dest="input", default=None)
    p.add_argument("--cstar", type=int, default=None)
    p.add_argument("--p", default="auto")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("demo", help="built-in worked examples")
    p.add_argument("name", help="example1 or remark2")
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    report = Report(argv)
    start = time.perf_counter()
    code = EXIT_OK
    try:
        args.func(args, report)
    except EnumerationCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, MatrixFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except VerificationFailed as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        code = EXIT_FAIL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.timing:
        report.add("wall_time_s", f"{time.perf_counter() - start:.3f}")
    sys.stdout.write(report.render())
    return code


if __name__ == "__main__":
    sys.exit(main())
