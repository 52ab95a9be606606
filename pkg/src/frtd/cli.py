"""``frtd`` command-line entry point.

Every subcommand accepts ``--config FILE`` holding defaults, either as
``key = value`` lines or as a ``run-manifest.json`` written by an earlier
run; flags given on the command line win. Exit status is 0 on success,
1 on usage errors and 2 on data errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .graph import Graph, GraphFormatError, format_edge_list, label_map_csv, load_edge_list

log = logging.getLogger("frtd")

MANIFEST_NAME = "run-manifest.json"
# keys that never come from a config file
_NOT_CONFIGURABLE = {"command", "config", "func", "verbose"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def atomic_write(path: str | Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def read_config(path: str | Path) -> dict:
    """Load ``key = value`` lines or a JSON manifest into a flat dict."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json" or text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"malformed config {path}: {exc}") from None
        return dict(data.get("config", data))
    cfg = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"malformed config {path} line {lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        cfg[key.replace("-", "_")] = value
    return cfg


def _coerce(parser: argparse.ArgumentParser, cfg: dict) -> dict:
    """Convert config strings with the matching argparse action's type."""
    actions = {a.dest: a for a in parser._actions}
    out = {}
    for key, value in cfg.items():
        key = key.replace("-", "_")
        if key in _NOT_CONFIGURABLE:
            continue
        if key not in actions:
            raise UsageError(f"unknown config key {key!r}")
        action = actions[key]
        if isinstance(value, str):
            if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
                value = value.lower() in ("1", "true", "yes", "on")
            elif action.type is not None:
                value = action.type(value)
        out[key] = value
    return out


def _need(args, *names):
    missing = [n for n in names if getattr(args, n, None) in (None, "")]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + n.replace("_", "-") for n in missing))


def _load(path, directed=False) -> Graph:
    return load_edge_list(path, directed=directed)


def _node_index(g: Graph, label: str) -> int:
    try:
        return g.node_labels.index(str(label))
    except ValueError:
        raise GraphFormatError(f"node {label!r} not found") from None


def write_manifest(args, outputs: list[Path], directory: Path | None = None) -> Path:
    config = {k: v for k, v in vars(args).items() if k not in _NOT_CONFIGURABLE}
    manifest = {
        "tool": "frtd",
        "version": __version__,
        "command": args.command,
        "config": config,
        "outputs": [str(p) for p in outputs],
    }
    directory = directory or (outputs[0].parent if outputs else Path(args.manifest_dir or "."))
    return atomic_write(directory / MANIFEST_NAME, json.dumps(manifest, indent=2, sort_keys=True) + "\n")


# --------------------------------------------------------------------------- commands

def frtd_csv(f, labels) -> str:
    k = f.max_steps
    header = ["node", *(f"t{t}" for t in range(1, k + 1)), "tail"]
    return _csv_text(header, ([lab, *row] for lab, row in zip(labels, f.values)))


def cmd_compute(args):
    from .embedding import embed

    _need(args, "input")
    g = _load(args.input, args.directed)
    out = Path(args.output or Path(args.input).with_suffix(".frtd.csv"))
    emb = embed(g, args.max_steps, args.alpha)
    if g.directed:
        fwd, rev = emb
        base = str(out).removesuffix(".csv")
        outputs = [atomic_write(base + ".fwd.csv", frtd_csv(fwd, g.node_labels)),
                   atomic_write(base + ".rev.csv", frtd_csv(rev, g.node_labels))]
    else:
        outputs = [atomic_write(out, frtd_csv(emb, g.node_labels))]
    outputs.append(atomic_write(str(out).removesuffix(".csv") + ".labels.csv", label_map_csv(g)))
    return outputs


def cmd_verify(args):
    from .embedding import compute_frtd
    from .spectral import decompose, frtd_from_spectrum

    _need(args, "input")
    g = _load(args.input)
    f = compute_frtd(g, args.max_steps).values
    sd = decompose(g)
    spec = np.array([frtd_from_spectrum(sd, i, args.max_steps) for i in range(g.n)])
    gap = float(np.abs(f - spec).max())
    print(json.dumps({"n": g.n, "max_steps": args.max_steps, "max_discrepancy": gap}))
    return []


def cmd_equiv(args):
    from .spectral import decompose, nodes_frtd_equivalent

    _need(args, "input_a", "input_b", "node_a", "node_b")
    ga, gb = _load(args.input_a), _load(args.input_b)
    i, j = _node_index(ga, args.node_a), _node_index(gb, args.node_b)
    verdict = nodes_frtd_equivalent(decompose(ga, args.tol), i, decompose(gb, args.tol), j, args.tol)
    print(json.dumps(verdict.to_dict()))
    return []


def cmd_dist(args):
    from .distance import graph_distance, pairwise_distances
    from .embedding import embed

    _need(args, "input_a", "input_b")
    ga, gb = _load(args.input_a, args.directed), _load(args.input_b, args.directed)
    want_graph = args.graph_distance or not args.pairwise
    if want_graph and ga.n != gb.n:
        raise ValueError(f"graph distance needs equal node counts, got {ga.n} and {gb.n}")
    fa, fb = embed(ga, args.max_steps, args.alpha), embed(gb, args.max_steps, args.alpha)
    outputs = []
    if args.pairwise:
        d = pairwise_distances(fa, fb)
        text = _csv_text(["node", *gb.node_labels], ([lab, *row] for lab, row in zip(ga.node_labels, d)))
        outputs.append(atomic_write(args.pairwise, text))
    if want_graph:
        print(json.dumps({"graph_distance": graph_distance(fa, fb)}))
    return outputs


def _read_metadata(path) -> dict[str, str]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if rows and len(rows[0]) == 2 and rows[0][0].lower() in ("node", "label", "name"):
        rows = rows[1:]
    if any(len(r) != 2 for r in rows):
        raise GraphFormatError(f"{path}: metadata must have exactly two columns")
    return {r[0]: r[1] for r in rows}


def cmd_roles(args):
    from .distance import pairwise_distances
    from .embedding import compute_frtd
    from .roles import cluster_report, spectral_cluster

    _need(args, "input", "k")
    g = _load(args.input)
    ra = spectral_cluster(pairwise_distances(compute_frtd(g, args.max_steps)), args.k, seed=args.seed)
    meta = _read_metadata(args.metadata) if args.metadata else None
    report = cluster_report(ra, g.node_labels, meta)
    out = Path(args.output or Path(args.input).with_suffix(".roles.csv"))
    outputs = [atomic_write(out, _csv_text(["node", "cluster"], zip(g.node_labels, ra.labels.tolist())))]
    if report.contingency is not None:
        text = _csv_text(["cluster", *report.categories], report.contingency_rows())
        outputs.append(atomic_write(str(out).removesuffix(".csv") + ".contingency.csv", text))
    return outputs


def _read_ground_truth(path, ga: Graph, gb: Graph) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if rows and rows[0] == ["node_a", "node_b"]:
        rows = rows[1:]
    truth = np.full(ga.n, -1)
    for a, b in rows:
        truth[_node_index(ga, a)] = _node_index(gb, b)
    return truth


def cmd_align(args):
    from .alignment import align

    _need(args, "input_a", "input_b")
    ga, gb = _load(args.input_a), _load(args.input_b)
    res = align(ga, gb, args.method, mu=args.mu, max_steps=args.max_steps, iterations=args.iterations)
    summary = {"method": args.method, "objective": res.objective, "runtime_seconds": res.runtime_seconds}
    if args.ground_truth:
        summary["accuracy"] = res.score(_read_ground_truth(args.ground_truth, ga, gb))
    print(json.dumps(summary))
    outputs = []
    if args.output:
        rows = ((ga.node_labels[i], gb.node_labels[j]) for i, j in enumerate(res.permutation))
        outputs.append(atomic_write(args.output, _csv_text(["node_a", "node_b"], rows)))
    return outputs


def cmd_bench_align(args):
    from .alignment import benchmark

    _need(args, "input")
    g = _load(args.input)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    rows = benchmark(g, args.noise, args.trials, methods, seed=args.seed, mu=args.mu,
                     max_steps=args.max_steps, iterations=args.iterations, workers=args.threads)
    out = Path(args.output or "bench-align.csv")
    acc_rows = [[r["method"], r["trials"], r["accuracy_mean"], r["accuracy_std"],
                 ";".join(_fmt(a) for a in r["accuracies"])] for r in rows]
    outputs = [atomic_write(out, _csv_text(["method", "trials", "accuracy_mean", "accuracy_std",
                                            "accuracies"], acc_rows))]
    # wall-clock timings are not reproducible, so they stay out of the CSV
    timing = {r["method"]: {"runtime_mean": r["runtime_mean"], "runtime_std": r["runtime_std"]} for r in rows}
    atomic_write(str(out).removesuffix(".csv") + ".timing.json", json.dumps(timing, indent=2) + "\n")
    for r in rows:
        print(f"{r['method']}: accuracy {r['accuracy_mean']:.3f} +/- {r['accuracy_std']:.3f}, "
              f"time {r['runtime_mean']:.3f} +/- {r['runtime_std']:.3f} s")
    return outputs


def cmd_randomize(args):
    from .randomization import GibbsConfig, ladder, run_ensemble

    _need(args, "input", "output_dir")
    g = _load(args.input, args.directed)
    cfg = GibbsConfig(
        betas=ladder(args.betas), burn_in=args.burn_in, n_samples=args.samples,
        sample_interval=args.sample_interval, swap_interval=args.swap_interval,
        truncation=args.truncate, edge_move_probability=args.edge_move_prob,
        degree_preserving_only=True if args.degree_preserving else None,
        alpha=args.alpha, init=args.init, energy=args.energy, seed=args.seed,
    )
    res = run_ensemble(g, cfg, workers=args.threads)
    st = res.statistics
    outdir = Path(args.output_dir)
    thermo_rows = zip(st.betas, st.mean_energy, st.var_energy, st.sem_energy, st.mean_distance,
                      st.specific_heat, st.entropy, st.entropy_change, st.acceptance_rate, st.swap_rate)
    outputs = [atomic_write(outdir / "thermo.csv", _csv_text(
        ["beta", "mean_energy", "var_energy", "sem_energy", "mean_graph_distance", "specific_heat",
         "entropy", "entropy_change", "acceptance_rate", "swap_rate"], thermo_rows))]
    stat_rows = []
    for slot, beta in enumerate(st.betas):
        for name, vals in st.node_correlation.items():
            stat_rows.append([beta, "node_correlation_median", name, vals[slot]])
        for name, vals in st.global_ratio.items():
            stat_rows.append([beta, "global_ratio_mean", name, vals[slot]])
    outputs.append(atomic_write(outdir / "statistics.csv",
                                _csv_text(["beta", "statistic", "descriptor", "value"], stat_rows)))
    if args.emit_graphs:
        for slot, beta in enumerate(st.betas):
            for k in range(len(res.samples[slot])):
                path = outdir / "graphs" / f"beta{slot:03d}_sample{k:05d}.edges"
                h = res.sample_graph(slot, k)
                h = Graph(h.adjacency, directed=h.directed, node_labels=g.node_labels)
                outputs.append(atomic_write(path, format_edge_list(h)))
    return outputs


# --------------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="frtd", description="First-return-time node embeddings.")
    p.add_argument("--version", action="version", version=f"frtd {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--config", help="key=value file or run-manifest.json with defaults")
        sp.add_argument("--threads", type=int, default=os.cpu_count() or 1)
        sp.add_argument("--manifest-dir", help="where to put run-manifest.json when no file is written")
        sp.add_argument("-v", "--verbose", action="count", default=0)
        return sp

    def steps(sp, default=50):
        sp.add_argument("--max-steps", type=int, default=default)

    sp = add("compute", cmd_compute, "compute FRTDs and write them as CSV")
    sp.add_argument("--input")
    steps(sp)
    sp.add_argument("--directed", action="store_true")
    sp.add_argument("--alpha", type=float, default=0.15)
    sp.add_argument("--output")

    sp = add("verify", cmd_verify, "compare iterative and spectral FRTDs")
    sp.add_argument("--input")
    steps(sp)

    sp = add("equiv", cmd_equiv, "spectral FRTD-equivalence test for two nodes")
    sp.add_argument("--input-a")
    sp.add_argument("--input-b")
    sp.add_argument("--node-a")
    sp.add_argument("--node-b")
    sp.add_argument("--tol", type=float, default=1e-8)

    sp = add("dist", cmd_dist, "pairwise node distances and graph distance")
    sp.add_argument("--input-a")
    sp.add_argument("--input-b")
    steps(sp)
    sp.add_argument("--directed", action="store_true")
    sp.add_argument("--alpha", type=float, default=0.15)
    sp.add_argument("--pairwise")
    sp.add_argument("--graph-distance", action="store_true")

    sp = add("roles", cmd_roles, "spectral clustering of FRTDs into roles")
    sp.add_argument("--input")
    sp.add_argument("--k", type=int)
    steps(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--metadata")
    sp.add_argument("--output")

    sp = add("align", cmd_align, "align two graphs")
    sp.add_argument("--input-a")
    sp.add_argument("--input-b")
    sp.add_argument("--method", choices=["lap", "fugal-frt", "fugal-lite"], default="fugal-frt")
    sp.add_argument("--mu", type=float, default=1.0)
    steps(sp)
    sp.add_argument("--iterations", type=int, default=15)
    sp.add_argument("--ground-truth")
    sp.add_argument("--output")

    sp = add("bench-align", cmd_bench_align, "corruption benchmark for alignment methods")
    sp.add_argument("--input")
    sp.add_argument("--noise", type=float, default=0.05)
    sp.add_argument("--trials", type=int, default=5)
    sp.add_argument("--methods", default="lap,fugal-frt")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--mu", type=float, default=1.0)
    steps(sp)
    sp.add_argument("--iterations", type=int, default=15)
    sp.add_argument("--output")

    sp = add("randomize", cmd_randomize, "sample the FRTD Gibbs ensemble with parallel tempering")
    sp.add_argument("--input")
    sp.add_argument("--betas", default="0:70:8", help="lo:hi:count or comma list")
    sp.add_argument("--burn-in", type=int, default=10_000)
    sp.add_argument("--samples", type=int, default=100)
    sp.add_argument("--sample-interval", type=int, default=100)
    sp.add_argument("--swap-interval", type=int, default=100)
    sp.add_argument("--truncate", type=int, default=14)
    sp.add_argument("--edge-move-prob", type=float, default=0.4)
    sp.add_argument("--directed", action="store_true")
    sp.add_argument("--degree-preserving", action="store_true")
    sp.add_argument("--alpha", type=float, default=0.15)
    sp.add_argument("--init", choices=["random", "target"], default="random")
    sp.add_argument("--energy", choices=["sum", "distance"], default="sum")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--output-dir")
    sp.add_argument("--emit-graphs", action="store_true")
    return p


def dispatch(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return 1
        if args.config:
            sub = parser._subparsers._group_actions[0].choices[args.command]
            sub.set_defaults(**_coerce(sub, read_config(args.config)))
            args = parser.parse_args(argv)
        if args.threads < 1:
            raise UsageError("--threads must be >= 1")
    except SystemExit as exc:
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"frtd: error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"frtd: error: config file not found: {exc.filename}", file=sys.stderr)
        return 2
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s %(message)s")
    try:
        outputs = args.func(args)
        write_manifest(args, outputs)
    except UsageError as exc:
        print(f"frtd {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"frtd {args.command}: error: file not found: {exc.filename}", file=sys.stderr)
        return 2
    except (GraphFormatError, ValueError, KeyError, IndexError) as exc:
        print(f"frtd {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
