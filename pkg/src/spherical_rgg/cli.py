"""Command-line interface.

Subcommands print one JSON object (or CSV for sweeps and curves) to stdout or
``--output``.  Randomized subcommands require ``--seed`` and echo it, along
with their budgets, in the output.

Exit codes: 0 success, 1 usage error, 2 domain error, 3 numerical
diagnostic failure.
"""

import argparse
import ast
import json
import math
import operator
import sys

import numpy as np

from . import __version__
from .contour import solve_contour
from .divergence import idiv_er
from .estimate import MIN_BATCHES
from .exceptions import ContourError, DiagnosticError, DomainError
from .graphs import Graph, sample_er, sample_rgg
from .inclusion import (
    inclusion_estimate_gaussian,
    inclusion_prob_fourier,
    inclusion_prob_mc,
    ratio_experiment,
)
from .specialfns import ModelParams, pp0_ratio, threshold
from .wishart import (
    gaussian_cf,
    spherical_wishart_cf,
    spherical_wishart_cf_direct,
    wishart_cf,
)

EXIT_USAGE = 1
EXIT_DOMAIN = 2
EXIT_DIAGNOSTIC = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- argument helpers -----------------------------------------------------------

def _count(text):
    """Integer that may be written in float notation, e.g. ``1e6``."""
    value = float(text)
    if not value.is_integer():
        raise argparse.ArgumentTypeError(f"expected an integer, got {text}")
    return int(value)


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_FUNCS = {"log": math.log, "sqrt": math.sqrt, "exp": math.exp}


def eval_expr(text, names):
    """Evaluate an arithmetic expression in ``names`` with log, sqrt, exp."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.Name) and node.id in names:
            return names[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise UsageError(f"unsupported expression element in {text!r}")

    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise UsageError(f"cannot parse expression {text!r}") from exc
    return float(ev(tree))


def parse_theta(text, n=None):
    """Parse ``"j-k=value,..."`` into a complex symmetric matrix.

    Values are Python complex literals such as ``2``, ``-0.5`` or ``1+2j``.
    """
    entries = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        try:
            pair, value = item.split("=")
            j, k = (int(v) for v in pair.split("-"))
            entries.append((j, k, complex(value.replace(" ", ""))))
        except ValueError as exc:
            raise UsageError(f"bad theta entry {item!r}; expected j-k=value") from exc
    size = max([max(j, k) + 1 for j, k, _ in entries], default=0)
    n = size if n is None else n
    if size > n:
        raise UsageError(f"theta entry index exceeds n = {n}")
    theta = np.zeros((n, n), dtype=complex)
    for j, k, v in entries:
        theta[j, k] = theta[k, j] = v
    return theta


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dump_json(obj):
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def _params(args, n):
    if (args.p is None) == (args.t is None):
        raise UsageError("give exactly one of --p and --t")
    if args.p is not None:
        return ModelParams.from_p(n, args.d, args.p)
    return ModelParams.from_t(n, args.d, args.t)


def _require_seed(args):
    if args.seed is None:
        raise UsageError(f"'{args.command}' is randomized and needs --seed")
    return args.seed


# -- subcommands ----------------------------------------------------------------

def cmd_tpd(args):
    t, p0, predicted, actual = pp0_ratio(args.p, args.d)
    return dump_json({"command": "tpd", "p": args.p, "d": args.d, "t": t, "p0": p0,
                      "pp0_predicted_ratio": predicted, "actual_ratio": actual})


def cmd_idiv(args):
    if args.sweep is None:
        if None in (args.n, args.p, args.q):
            raise UsageError("idiv needs --n, --p and --q (or --sweep)")
        r = idiv_er(args.n, args.p, args.q)
        return dump_json({"command": "idiv", "n": args.n, "p": args.p, "q": args.q,
                          "value": r.value, "argmin_g": r.argmin_g,
                          "ratio_term": r.ratio_term, "tail_term": r.tail_term})
    ns = [_count(s) for s in args.sweep.split(",") if s.strip()]
    rows = [f"# q={args.q_expr} p={args.p_expr}", "n,p,q,value,argmin_g"]
    for n in ns:
        q = eval_expr(args.q_expr, {"n": n})
        p = eval_expr(args.p_expr, {"n": n, "q": q})
        r = idiv_er(n, p, q)
        rows.append(f"{n},{p!r},{q!r},{r.value!r},{r.argmin_g}")
    return "\n".join(rows) + "\n"


def cmd_phi(args):
    theta = parse_theta(args.theta, args.n)
    out = {"command": "phi", "d": args.d, "method": args.method, "theta": args.theta,
           "n": theta.shape[0]}
    if args.method in ("steepest", "direct"):
        out["seed"] = _require_seed(args)
        out["budgets"] = {"samples": args.samples, "batches": args.batches}
        if args.method == "steepest":
            est = spherical_wishart_cf(theta, args.d, args.samples, args.seed,
                                       batches=args.batches, workers=args.workers, scale=args.scale)
        else:
            est = spherical_wishart_cf_direct(theta, args.d, args.samples, args.seed,
                                              batches=args.batches, workers=args.workers)
        out.update(re=est.real, im=est.imag, stderr_re=est.stderr_re, stderr_im=est.stderr_im,
                   samples=est.samples)
    else:
        value = wishart_cf(theta, args.d) if args.method == "wishart" else gaussian_cf(theta, args.d)
        out.update(re=value.real, im=value.imag)
    return dump_json(out)


def cmd_contour(args):
    if (args.p is None) == (args.t is None):
        raise UsageError("give exactly one of --p and --t")
    t = args.t if args.t is not None else threshold(args.p, args.d)
    curve = solve_contour(args.d, t, args.xmax, grid_points=args.points)
    head = f"# d={args.d} t={t!r} x_max={curve.x_max!r} tail_mass={curve.tail_mass!r}\n"
    return head + curve.to_csv()


def cmd_inclusion(args):
    with open(args.graph) as fh:
        g = Graph.from_text(fh.read())
    n = args.n if args.n is not None else g.n
    params = _params(args, n)
    out = {"command": "inclusion", "graph": g.to_text(), "n": n, "d": params.d, "p": params.p,
           "t": params.t, "p0": params.p0}
    if args.method == "gaussian":
        est = inclusion_estimate_gaussian(g.strip_isolated()[0], params)
    elif args.method == "mc":
        out["seed"] = _require_seed(args)
        out["budgets"] = {"draws": args.draws, "batches": args.batches}
        est = inclusion_prob_mc(g, n, params.d, params.t, args.draws, args.seed,
                                batches=args.batches, workers=args.workers)
    else:
        out["seed"] = _require_seed(args)
        out["budgets"] = {"outer_draws": args.outer, "inner_draws": args.inner,
                          "batches": args.batches}
        est = inclusion_prob_fourier(g, params, None, args.outer, args.inner, args.seed,
                                     batches=args.batches, workers=args.workers)
    out.update(est.to_dict())
    return dump_json(out)


def load_config(text):
    """Parse a JSON object or ``key = value`` lines (values read as JSON when possible)."""
    stripped = text.strip()
    if stripped.startswith("{"):
        return json.loads(stripped)
    cfg = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {raw!r} is not key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            cfg[key] = json.loads(value)
        except json.JSONDecodeError:
            cfg[key] = value
    return cfg


_EXPERIMENT_KEYS = {"n", "d", "p", "K", "sampled_graphs", "seed", "engine", "outer_draws",
                    "inner_draws", "batches", "max_vertices", "max_edges", "max_engine_calls"}


def cmd_experiment(args):
    with open(args.config) as fh:
        cfg = load_config(fh.read())
    unknown = set(cfg) - _EXPERIMENT_KEYS
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    missing = {"n", "d", "p", "K", "sampled_graphs", "seed"} - set(cfg)
    if missing:
        raise UsageError(f"config is missing {sorted(missing)}")
    opts = {k: cfg[k] for k in cfg if k not in {"n", "d", "p", "K", "sampled_graphs", "seed"}}
    rec = ratio_experiment(int(cfg["n"]), int(cfg["d"]), float(cfg["p"]), float(cfg["K"]),
                           int(cfg["sampled_graphs"]), int(cfg["seed"]), workers=args.workers, **opts)
    rec["seed"] = int(cfg["seed"])
    rec["command"] = "experiment"
    return dump_json(rec)


def cmd_sample(args):
    seed = _require_seed(args)
    if args.model == "er":
        if args.p is None:
            raise UsageError("sample --model er needs --p")
        g = sample_er(args.n, args.p, seed)
        note = f"model=er n={args.n} p={args.p!r} seed={seed}"
    else:
        if args.d is None:
            raise UsageError("sample --model rgg needs --d")
        params = _params(args, args.n)
        g = sample_rgg(args.n, params.d, params.t, seed)
        note = f"model=rgg n={args.n} d={params.d} p={params.p!r} t={params.t!r} seed={seed}"
    return g.to_text(comment=note)


# -- parser -------------------------------------------------------------------------

def build_parser():
    parser = _Parser(prog="spherical-rgg", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, seed=False, workers=False):
        p.add_argument("--output", help="write to this file instead of stdout")
        if seed:
            p.add_argument("--seed", type=int, help="root seed (required when randomized)")
            p.add_argument("--batches", type=int, default=MIN_BATCHES)
        if workers:
            p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("tpd", help="threshold t_{p,d}, p0 and the p/p0 prediction")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--d", type=_count, required=True)
    common(p)
    p.set_defaults(func=cmd_tpd)

    p = sub.add_parser("idiv", help="inclusion divergence between G(n,p) and G(n,q)")
    p.add_argument("--n", type=_count)
    p.add_argument("--p", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--sweep", help="comma-separated n values; emits CSV")
    p.add_argument("--q-expr", default="4/n**2", help="q as a function of n in sweep mode")
    p.add_argument("--p-expr", default="q*(1+1/log(n))", help="p as a function of n and q")
    common(p)
    p.set_defaults(func=cmd_idiv)

    p = sub.add_parser("phi", help="characteristic functions at a hollow Theta")
    p.add_argument("--d", type=_count, required=True)
    p.add_argument("--theta", required=True, help="entries 'j-k=value,...' (0-indexed)")
    p.add_argument("--n", type=_count, help="matrix size (default: from --theta)")
    p.add_argument("--method", choices=("steepest", "direct", "gaussian", "wishart"),
                   default="steepest")
    p.add_argument("--samples", type=_count, default=100_000)
    p.add_argument("--scale", type=float, help="contour scale (default automatic)")
    common(p, seed=True, workers=True)
    p.set_defaults(func=cmd_phi)

    p = sub.add_parser("contour", help="tabulate the inversion contour as CSV x,y,dy")
    p.add_argument("--d", type=_count, required=True)
    p.add_argument("--t", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--xmax", type=float)
    p.add_argument("--points", type=_count, default=201)
    common(p)
    p.set_defaults(func=cmd_contour)

    p = sub.add_parser("inclusion", help="inclusion probability of a graph")
    p.add_argument("--graph", required=True, help="edge-list file")
    p.add_argument("--n", type=_count, help="vertex count (default: from the file)")
    p.add_argument("--d", type=_count, required=True)
    p.add_argument("--p", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--method", choices=("fourier", "mc", "gaussian"), default="fourier")
    p.add_argument("--draws", type=_count, default=1_000_000, help="Monte Carlo draws")
    p.add_argument("--outer", type=_count, default=16384, help="Fourier outer draws")
    p.add_argument("--inner", type=_count, default=64, help="Fourier inner draws")
    common(p, seed=True, workers=True)
    p.set_defaults(func=cmd_inclusion)

    p = sub.add_parser("experiment", help="ratio experiment from a config file")
    p.add_argument("--config", required=True, help="JSON or key = value file")
    common(p, workers=True)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("sample", help="sample G(n,p) or G(n,p,d) as an edge list")
    p.add_argument("--model", choices=("er", "rgg"), required=True)
    p.add_argument("--n", type=_count, required=True)
    p.add_argument("--p", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--d", type=_count)
    common(p, seed=True)
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # --help and --version exit 0, usage errors EXIT_USAGE
        return exc.code
    try:
        text = args.func(args)
    except UsageError as exc:
        print(f"spherical-rgg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"spherical-rgg: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (DiagnosticError, ContourError) as exc:
        print(f"spherical-rgg: diagnostic failure: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTIC
    except OSError as exc:
        print(f"spherical-rgg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
