"""Command-line entry point: ``python -m fairaccess <command> ...``."""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import logging
import math
import secrets
import sys
import time
from contextlib import nullcontext
from pathlib import Path

import numpy as np

from . import __version__
from .evaluation import correlation_data, selection_gap
from .exceptions import FairAccessError
from .fast import fast_greedy
from .graph import load_graph, load_groups, write_graph, write_groups, write_mapping
from .greedy import Hyperparams, exact_greedy
from .estimator import run_algorithm
from .kernel import check_dense_size, metrics, pseudoinverse
from .netgen import BAhParams, generate_bah
from .sketch import app_diag

logger = logging.getLogger("fairaccess")

CSV_SCHEMA_VERSION = 1
RECORD_COLUMNS = ["iteration", "u", "v", "R", "I_S", "I_T", "U", "F", "I_O", "approximate",
                  "hull_size"]


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "nan" if math.isnan(x) else repr(float(x))
    return str(x)


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def record_rows(selection):
    for r in selection.all_records():
        u, v = r.edge if r.edge is not None else ("", "")
        yield [r.iteration, u, v, r.R, r.I_S, r.I_T, r.U, r.F, r.I_O, r.approximate, r.hull_size]


def _digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class RunManifest:
    """Flat ``key=value`` record of how a run was produced."""

    def __init__(self, argv, args):
        self.entries = {
            "command_line": " ".join(argv),
            "library_version": __version__,
            "csv_schema": CSV_SCHEMA_VERSION,
            "started": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        }
        for key, value in sorted(vars(args).items()):
            if key != "func":
                self.entries[f"param.{key}"] = value
        for key in ("graph", "groups"):
            path = getattr(args, key, None)
            if path:
                self.entries[f"digest.{key}"] = "sha256:" + _digest(path)

    def __setitem__(self, key, value):
        self.entries[key] = value

    def write(self, out: Path):
        self.entries["finished"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
        with open(out / "manifest.txt", "w", newline="\n") as fh:
            for key, value in self.entries.items():
                fh.write(f"{key}={value}\n")


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma separated list of numbers: {text!r}")


def _load(args):
    g = load_graph(args.graph, largest_component=args.largest_component)
    ga = load_groups(args.groups, g)
    return g, ga


def _prepare_out(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_optimize(args, manifest):
    g, ga = _load(args)
    out = _prepare_out(args)
    hp = Hyperparams(args.lam, args.k, args.epsilon, args.seed, args.multi_group)
    t0 = time.perf_counter()
    sel = run_algorithm(args.algo, g, ga, hp)
    seconds = time.perf_counter() - t0
    write_csv(out / "records.csv", RECORD_COLUMNS, record_rows(sel))
    write_csv(out / "edges.csv", ["u", "v", "orig_u", "orig_v"],
              ([u, v, g.node_ids[u], g.node_ids[v]] for u, v in sel.edges))
    write_csv(out / "timings.csv", ["iteration", "elapsed"],
              ([r.iteration, r.elapsed] for r in sel.records))
    write_mapping(g, out / "mapping.txt")
    manifest["seconds"] = seconds
    manifest["n"], manifest["m"] = g.n, g.m
    return 0


def cmd_tradeoff(args, manifest):
    g, ga = _load(args)
    out = _prepare_out(args)
    for lam in args.lambdas:
        hp = Hyperparams(lam, args.k, args.epsilon, args.seed)
        sel = run_algorithm(args.algo, g, ga, hp)
        write_csv(out / f"tradeoff_lambda_{lam:g}.csv", ["iteration", "R", "U"],
                  ([r.iteration, r.R, r.U] for r in sel.all_records()))
    return 0


def cmd_correlate(args, manifest):
    g, ga = _load(args)
    check_dense_size(g.n)
    out = _prepare_out(args)
    rows = []
    for lam in args.lambdas:
        data = correlation_data(g, ga, lam)
        write_csv(out / f"correlate_lambda_{lam:g}.csv", ["u", "v", "decrease", "surrogate"],
                  ([int(a), int(b), d, s] for (a, b), d, s
                   in zip(data.pairs, data.decrease, data.surrogate)))
        rows.append([lam, data.pearson])
        print(f"lambda={lam:g} pearson={data.pearson:.6f}")
    write_csv(out / "pearson.csv", ["lambda", "pearson"], rows)
    return 0


def cmd_compare(args, manifest):
    g, ga = _load(args)
    check_dense_size(g.n)
    out = _prepare_out(args)
    t0 = time.perf_counter()
    exact = exact_greedy(g, ga, Hyperparams(args.lam, args.k, seed=args.seed))
    exact_seconds = time.perf_counter() - t0
    summary, hulls = [], []
    for eps in args.epsilons:
        t0 = time.perf_counter()
        fast = fast_greedy(g, ga, Hyperparams(args.lam, args.k, eps, args.seed), metrics="exact")
        fast_seconds = time.perf_counter() - t0
        gap = selection_gap(exact, fast)
        summary.append([eps, gap.eta, gap.theta])
        hulls.extend([eps, it, c] for it, c in enumerate(fast.info["hull_sizes"], 1))
        print(f"epsilon={eps:g} eta={gap.eta:.6f} theta={gap.theta:.6f} "
              f"exact={exact_seconds:.2f}s fast={fast_seconds:.2f}s")
        manifest[f"seconds.fast.{eps:g}"] = fast_seconds
    manifest["seconds.exact"] = exact_seconds
    write_csv(out / "compare.csv", ["epsilon", "eta", "theta"], summary)
    write_csv(out / "hull_sizes.csv", ["epsilon", "iteration", "c"], hulls)
    return 0


def cmd_generate(args, manifest):
    params = BAhParams(args.n, args.m_attach, args.fa, args.h, args.seed)
    g, ga = generate_bah(params)
    out = _prepare_out(args)
    write_graph(g, out / "graph.txt")
    write_groups(g, ga, out / "groups.txt")
    manifest["n"], manifest["m"] = g.n, g.m
    return 0


def cmd_evaluate(args, manifest):
    g, ga = _load(args)
    n = g.n
    if args.sketch:
        d = app_diag(g, args.epsilon, args.seed)
        tr = float(d.sum())
        i_s = n / len(ga.S) * d[ga.S].sum() + tr
        i_t = n / len(ga.T) * d[ga.T].sum() + tr
    else:
        p = pseudoinverse(g)
        m = metrics(p, ga, 0.0)
        tr, i_s, i_t = m.R, m.I_S, m.I_T
    row = [tr, i_s, i_t, i_t - i_s, n * tr]
    header = ["R", "I_S", "I_T", "U", "K"]
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(header)
    w.writerow([_fmt(x) for x in row])
    if args.out:
        write_csv(_prepare_out(args) / "evaluate.csv", header, [row])
    return 0


def _common(p, inputs=True, out_required=True):
    if inputs:
        p.add_argument("--graph", required=True, help="edge-list file")
        p.add_argument("--groups", required=True, help="group file (node_id S|T|O)")
        p.add_argument("--largest-component", action="store_true",
                       help="keep only the largest connected component")
    p.add_argument("--seed", type=int, default=None, help="root seed (generated if omitted)")
    p.add_argument("--threads", type=int, default=None, help="cap on BLAS worker threads")
    p.add_argument("--out", required=out_required, default=None, help="output directory")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fairaccess", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="select k edges with one algorithm")
    _common(p)
    p.add_argument("--algo", default="exact",
                   help="exact, gradient, fast or baseline:<kind>")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--epsilon", type=float, default=0.3)
    p.add_argument("--multi-group", action="store_true",
                   help="include the remainder group in the objective")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("tradeoff", help="resistance and unfairness per lambda")
    _common(p)
    p.add_argument("--algo", default="exact")
    p.add_argument("--lambdas", type=_float_list, default=[0.0, 0.2, 0.5, 0.8, 1.0])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--epsilon", type=float, default=0.3)
    p.set_defaults(func=cmd_tradeoff)

    p = sub.add_parser("correlate", help="exact decrease vs gradient surrogate")
    _common(p)
    p.add_argument("--lambdas", type=_float_list, default=[0.0, 0.5, 1.0])
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("compare", help="exact greedy vs fast at several epsilons")
    _common(p)
    p.add_argument("--lambda", dest="lam", type=float, default=0.5)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--epsilons", type=_float_list, default=[0.3, 0.2, 0.1])
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("generate", help="sample a homophilic preferential-attachment graph")
    _common(p, inputs=False)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m-attach", type=int, default=5)
    p.add_argument("--fa", type=float, default=0.3)
    p.add_argument("--h", type=float, default=0.7)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("evaluate", help="print R, I_S, I_T, U, K")
    _common(p, out_required=False)
    p.add_argument("--sketch", action="store_true", help="estimate instead of exact")
    p.add_argument("--epsilon", type=float, default=0.3)
    p.set_defaults(func=cmd_evaluate)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors (2) and --help/--version (0)
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.seed is None:
        args.seed = secrets.randbits(63)
    try:
        manifest = RunManifest(["fairaccess", *argv], args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.threads:
        from threadpoolctl import threadpool_limits

        limiter = threadpool_limits(limits=args.threads)
    else:
        limiter = nullcontext()
    try:
        with limiter:
            code = args.func(args, manifest)
    except (FairAccessError, ValueError, OSError, MemoryError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if args.out:
        manifest.write(Path(args.out))
    return code


if __name__ == "__main__":
    sys.exit(main())
