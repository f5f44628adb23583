"""Command-line experiment runner.

Every subcommand prints (or writes to ``--out``) one deterministic document:
JSON with sorted keys, or CSV with a fixed header.  Exact quantities are
serialized as "p/q" strings; numeric renderings come with ``precision_bits``.

Exit codes: 0 ok, 1 a checked property failed (theorem1, selftest),
2 configuration error or undefined quantity, 3 budget exceeded.  On failure
a single ``error=<kind> message=<json string>`` line goes to stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath

from .errors import (
    BudgetExceeded,
    ConfigError,
    GibbsUndefined,
    InfeasibleCondition,
    VanishingConstantTerm,
)
from .exact import DEFAULT_TAU_BUDGET, DEFAULT_TAU_SAMPLES, marginal, marginal_table, partition_exact
from .graph_core import DecoratedGraph, Graph, as_fraction, fraction_str, transpose
from .models import BUILDERS, ModelSpec, build_test_graph
from .poly import InterpolationKind, interpolation_polynomial, is_hardcore_shaped
from .pseudo import (
    SsmRow,
    conditional_pseudo_marginal,
    interpolation_accuracy,
    pseudo_marginal,
    ssm_scan,
    theorem1_check,
)
from .taylor import power_sums_newton, taylor_truncation, taylor_truncation_shifted


# -- graph files ---------------------------------------------------------------

def load_graph(path: str) -> DecoratedGraph:
    """Read the JSON graph format.

    ``{"K": int, "nodes": [{"id": str, "a": ["p/q", ...]}],
    "edges": [{"u": str, "v": str, "A": [[...], ...]}]}``.  Nodes are
    numbered in file order; each matrix is indexed by the colors of
    (lexicographically smaller id, larger id).
    """
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read graph file {path}: {exc}") from exc
    return graph_from_json(doc)


def graph_from_json(doc: dict) -> DecoratedGraph:
    try:
        K = int(doc["K"])
        ids = [str(nd["id"]) for nd in doc["nodes"]]
        weights = [[as_fraction(x) for x in nd["a"]] for nd in doc["nodes"]]
        if len(set(ids)) != len(ids):
            raise ConfigError("duplicate node id")
        index = {s: i for i, s in enumerate(ids)}
        mats, pairs = {}, []
        for e in doc.get("edges", []):
            u, v = str(e["u"]), str(e["v"])
            if u not in index or v not in index:
                raise ConfigError(f"edge ({u}, {v}) references an unknown node")
            A = tuple(tuple(as_fraction(x) for x in row) for row in e["A"])
            lo, hi = sorted((u, v))
            if (u, v) != (lo, hi):
                raise ConfigError(f"edge ({u}, {v}): list the lexicographically smaller id as u")
            iu, iv = index[lo], index[hi]
            mats[(iu, iv)] = A
            pairs.append((iu, iv))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"malformed graph document: {exc}") from exc
    return DecoratedGraph.from_mapping(Graph(len(ids), tuple(pairs)), K, weights, mats)


def graph_to_json(g: DecoratedGraph, ids: Sequence[str] | None = None) -> dict:
    ids = [str(i) for i in range(g.n)] if ids is None else list(ids)
    edges = []
    for (u, v), A in zip(g.edges, g.edge_weights):
        if ids[u] > ids[v]:
            u, v, A = v, u, transpose(A)
        edges.append({"u": ids[u], "v": ids[v], "A": [[fraction_str(x) for x in r] for r in A]})
    edges.sort(key=lambda e: (e["u"], e["v"]))
    return {
        "K": g.K,
        "nodes": [{"id": s, "a": [fraction_str(x) for x in a]} for s, a in zip(ids, g.node_weights)],
        "edges": edges,
    }


# -- argument parsing ----------------------------------------------------------

def parse_params(text: str | None) -> dict[str, str]:
    out = {}
    for part in filter(None, (text or "").split(",")):
        if "=" not in part:
            raise ConfigError(f"expected key=value, got {part!r}")
        k, v = part.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def parse_model(text: str) -> ModelSpec:
    """``kind[:k=v,...]``, e.g. ``hardcore:lambda=1/2``, ``coloring:K=3``,
    ``list:K=3,lists=1+2|2+3|1+3``, ``ising:h=2,b=3``."""
    kind, _, rest = text.partition(":")
    kind = kind.strip()
    raw = parse_params(rest)
    params: dict[str, object] = {}
    for k, v in raw.items():
        if k == "lists":
            params[k] = tuple(tuple(int(c) for c in filter(None, grp.split("+"))) for grp in v.split("|"))
        elif k == "K":
            params[k] = int(v)
        else:
            params[k] = as_fraction(v)
    if kind not in ("hardcore", "coloring", "list", "ising"):
        raise ConfigError(f"unknown model kind {kind!r}")
    return ModelSpec(kind, tuple(sorted(params.items())))


def parse_ints(text: str | None) -> list[int]:
    if text is None or text.strip() == "":
        return []
    try:
        return [int(x) for x in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from exc


def parse_sweep(text: str) -> tuple[str, list[Fraction]]:
    """``param=lo:hi:step`` with rational endpoints, hi included."""
    name, _, rng = text.partition("=")
    parts = rng.split(":")
    if not name or len(parts) != 3:
        raise ConfigError(f"sweep must look like param=lo:hi:step, got {text!r}")
    lo, hi, step = (as_fraction(p) for p in parts)
    if step <= 0 or hi < lo:
        raise ConfigError("sweep needs step > 0 and hi >= lo")
    vals, x = [], lo
    while x <= hi:
        vals.append(x)
        x += step
    return name.strip(), vals


@dataclass
class ExperimentConfig:
    command: str
    graph: DecoratedGraph | None
    base_graph: Graph | None
    model: ModelSpec | None
    kind: InterpolationKind | None
    S: list[int] = field(default_factory=list)
    sigma: list[int] | None = None
    T: list[int] = field(default_factory=list)
    tau: list[int] | None = None
    R: list[int] = field(default_factory=list)
    m: int = 1
    z: Fraction = Fraction(1)
    sweep: tuple[str, list[Fraction]] | None = None
    seed: int | None = None
    budget: int | None = None
    tau_budget: int = DEFAULT_TAU_BUDGET
    samples: int = DEFAULT_TAU_SAMPLES
    precision_bits: int = 53
    fmt: str = "json"
    out: str | None = None


def _common(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--graph", help="JSON graph file")
    src.add_argument("--builder", choices=sorted(BUILDERS), help="named test graph")
    p.add_argument("--params", help="builder parameters k=v,...")
    p.add_argument("--model", help="kind:k=v,... (hardcore, coloring, list, ising)")
    p.add_argument("--kind", help="type1 | type2")
    p.add_argument("--S", dest="S", help="node ids, comma separated")
    p.add_argument("--sigma", help="1-based colors for --S")
    p.add_argument("--T", dest="T", help="conditioning nodes")
    p.add_argument("--tau", help="1-based colors for --T")
    p.add_argument("--R", dest="R", help="radius or comma list")
    p.add_argument("--m", type=int, default=1, help="truncation order")
    p.add_argument("--z", default="1", help="rational evaluation point p/q")
    p.add_argument("--sweep", help="param=lo:hi:step")
    p.add_argument("--seed", type=int)
    p.add_argument("--budget", type=int, help="max K^n colorings enumerated")
    p.add_argument("--tau-budget", type=int, default=DEFAULT_TAU_BUDGET)
    p.add_argument("--samples", type=int, default=DEFAULT_TAU_SAMPLES)
    p.add_argument("--precision-bits", type=int, default=53)
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--format", choices=("json", "csv"), default=None)


def _subgraph_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--pattern", help="pattern as n:u-v,u-v (e.g. 3:0-1,1-2)")
    p.add_argument("--size-max", type=int, help="enumerate connected induced subgraphs up to this size")
    p.add_argument("--beta-k", type=int, help="cluster-coefficient table order (<= 4)")
    p.add_argument("--lambda", dest="lam", default="1", help="fugacity for --beta-k")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zerofree", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "exact": "partition function and marginals",
        "poly": "interpolation polynomial coefficients",
        "taylor": "power sums and truncated log-series",
        "pseudo": "pseudo-marginal (conditional with --T/--tau)",
        "theorem1": "boundary-independence check of pseudo-marginals",
        "ssm-scan": "rho_R decay rows over radii and a parameter sweep",
        "accuracy": "relative error of exp(T_m(1)) for m = 0..--m",
        "subgraph": "induced counts, connected enumeration, cluster coefficients",
        "selftest": "quick invariant suite",
    }
    for name, text in helps.items():
        sp = sub.add_parser(name, help=text)
        _common(sp)
        if name == "subgraph":
            _subgraph_opts(sp)
    return parser


def _positive(name: str, value: int | None) -> None:
    if value is not None and value <= 0:
        raise ConfigError(f"{name} must be positive")


def make_config(ns: argparse.Namespace) -> ExperimentConfig:
    _positive("--budget", ns.budget)
    _positive("--tau-budget", ns.tau_budget)
    _positive("--samples", ns.samples)
    _positive("--precision-bits", ns.precision_bits)
    if ns.m < 0:
        raise ConfigError("--m must be >= 0")
    model = parse_model(ns.model) if ns.model else None
    graph = base = None
    if ns.graph:
        graph = load_graph(ns.graph)
        base = graph.graph
        if model is not None:
            graph = model.build(base)
    elif ns.builder:
        base = build_test_graph(ns.builder, **parse_params(ns.params))
        model = model or ModelSpec("hardcore", (("lambda", Fraction(1)),))
        graph = model.build(base)
    elif ns.command not in ("selftest", "subgraph"):
        raise ConfigError("a graph is required: --graph FILE or --builder NAME")
    kind = InterpolationKind.parse(ns.kind) if ns.kind else None
    if kind is None and graph is not None:
        kind = InterpolationKind.TYPE_I if is_hardcore_shaped(graph) else InterpolationKind.TYPE_II
    S, T = parse_ints(ns.S), parse_ints(ns.T)
    sigma = parse_ints(ns.sigma) if ns.sigma is not None else None
    tau = parse_ints(ns.tau) if ns.tau is not None else None
    if sigma is not None and len(sigma) != len(S):
        raise ConfigError("--sigma must give one color per node in --S")
    if tau is not None and len(tau) != len(T):
        raise ConfigError("--tau must give one color per node in --T")
    default_fmt = "csv" if ns.command in ("ssm-scan", "accuracy") else "json"
    return ExperimentConfig(
        command=ns.command, graph=graph, base_graph=base, model=model, kind=kind,
        S=S, sigma=sigma, T=T, tau=tau, R=parse_ints(ns.R), m=ns.m, z=as_fraction(ns.z),
        sweep=parse_sweep(ns.sweep) if ns.sweep else None, seed=ns.seed, budget=ns.budget,
        tau_budget=ns.tau_budget, samples=ns.samples, precision_bits=ns.precision_bits,
        fmt=ns.format or default_fmt, out=ns.out,
    )


# -- commands ------------------------------------------------------------------

def _num(x, bits: int) -> str:
    return mpmath.nstr(x, max(1, int(bits * 0.30103)))


def _fr(xs) -> list[str]:
    return [fraction_str(x) for x in xs]


def cmd_exact(cfg: ExperimentConfig):
    g = cfg.graph
    out = {"Z": fraction_str(partition_exact(g, cfg.budget)), "n": g.n, "K": g.K}
    if cfg.S:
        table = marginal_table(g, cfg.S, cfg.budget)
        out["S"] = list(table.S)
        out["marginals"] = [
            {"sigma": list(c), "mu": fraction_str(p)} for c, p in sorted(table.table.items())
        ]
        if cfg.sigma is not None:
            out["mu"] = fraction_str(marginal(g, cfg.S, cfg.sigma, budget=cfg.budget))
    return out


def _poly(cfg: ExperimentConfig):
    return interpolation_polynomial(cfg.graph, cfg.kind, budget=cfg.budget)


def cmd_poly(cfg: ExperimentConfig):
    p = _poly(cfg)
    return {"kind": cfg.kind.value, "coefficients": _fr(p.coeffs), "degree": p.degree}


def cmd_taylor(cfg: ExperimentConfig):
    p = _poly(cfg)
    t = taylor_truncation_shifted(p, cfg.m) if cfg.kind is InterpolationKind.TYPE_I else taylor_truncation(p, cfg.m)
    core = p.shift_down(t.shift)
    r = power_sums_newton(core, cfg.m)
    rows = [{"k": k, "power_sum": fraction_str(r[k]), "taylor_coeff": fraction_str(t.coeffs[k - 1])}
            for k in range(1, cfg.m + 1)]
    if cfg.fmt == "csv":
        return ("k", "power_sum", "taylor_coeff"), [[str(x["k"]), x["power_sum"], x["taylor_coeff"]] for x in rows]
    return {
        "kind": cfg.kind.value, "m": cfg.m, "constant": fraction_str(t.constant), "shift": t.shift,
        "rows": rows, "z": fraction_str(cfg.z),
        "exponent_at_z": fraction_str(t.exponent(cfg.z)),
        "value_at_z": _num(t.value(cfg.z, cfg.precision_bits), cfg.precision_bits),
        "precision_bits": cfg.precision_bits,
    }


def cmd_pseudo(cfg: ExperimentConfig):
    if cfg.T:
        nu = conditional_pseudo_marginal(cfg.graph, cfg.S, cfg.sigma, cfg.T, cfg.tau, cfg.kind,
                                         cfg.z, cfg.m, budget=cfg.budget)
    else:
        nu = pseudo_marginal(cfg.graph, cfg.S, cfg.sigma, cfg.kind, cfg.z, cfg.m, budget=cfg.budget)
    return {"kind": cfg.kind.value, **nu.to_json(cfg.precision_bits)}


def cmd_theorem1(cfg: ExperimentConfig):
    if len(cfg.R) != 1:
        raise ConfigError("theorem1 needs a single --R")
    if cfg.sigma is None:
        raise ConfigError("theorem1 needs --S and --sigma")
    rep = theorem1_check(cfg.graph, cfg.S, cfg.sigma, cfg.R[0], cfg.kind, cfg.m, budget=cfg.budget,
                         tau_budget=cfg.tau_budget, samples=cfg.samples, seed=cfg.seed)
    return rep.to_json()


def cmd_ssm_scan(cfg: ExperimentConfig):
    if not cfg.R:
        raise ConfigError("ssm-scan needs --R")
    if cfg.model is None:
        raise ConfigError("ssm-scan needs --model")
    param, values = cfg.sweep if cfg.sweep else (None, None)
    rows = ssm_scan(cfg.base_graph, cfg.model, cfg.S, cfg.R, param=param, values=values,
                    kind=cfg.kind if cfg.m else None, m=cfg.m or None, budget=cfg.budget,
                    tau_budget=cfg.tau_budget, samples=cfg.samples, seed=cfg.seed)
    data = [r.csv_fields(cfg.precision_bits) for r in rows]
    if cfg.fmt == "csv":
        return SsmRow.CSV_HEADER, data
    return {"rows": [dict(zip(SsmRow.CSV_HEADER, d)) for d in data], "precision_bits": cfg.precision_bits}


def cmd_accuracy(cfg: ExperimentConfig):
    rows = interpolation_accuracy(cfg.graph, cfg.kind, cfg.m, precision_bits=cfg.precision_bits,
                                  budget=cfg.budget)
    data = [r.to_json() for r in rows]
    header = ("m", "approx", "Z", "rel_error", "precision_bits")
    if cfg.fmt == "csv":
        return header, [[str(d[h]) for h in header] for d in data]
    return {"kind": cfg.kind.value, "rows": data}


def parse_pattern(text: str) -> Graph:
    n, _, rest = text.partition(":")
    try:
        edges = tuple(tuple(int(x) for x in e.split("-")) for e in filter(None, rest.split(",")))
        return Graph(int(n), edges)
    except ValueError as exc:
        raise ConfigError(f"pattern must look like 3:0-1,1-2, got {text!r}") from exc


def cmd_subgraph(cfg: ExperimentConfig, ns: argparse.Namespace):
    from .subgraphs import (
        PatternGraph,
        beta_table_type1,
        canonical_form,
        connected_induced_subgraphs,
        ind_count,
    )

    out: dict = {}
    host = cfg.base_graph
    if ns.pattern:
        if host is None:
            raise ConfigError("--pattern needs a host graph")
        out["ind"] = ind_count(PatternGraph.from_graph(parse_pattern(ns.pattern)), host)
    if ns.size_max is not None:
        if host is None:
            raise ConfigError("--size-max needs a host graph")
        by_size: dict[int, int] = {}
        by_pattern: dict[str, int] = {}
        for sub in connected_induced_subgraphs(host, ns.size_max):
            by_size[len(sub)] = by_size.get(len(sub), 0) + 1
            label = PatternGraph.from_graph(host.induced(sub)).label()
            by_pattern[label] = by_pattern.get(label, 0) + 1
        out["connected_by_size"] = {str(k): v for k, v in sorted(by_size.items())}
        out["connected_by_pattern"] = by_pattern
        out["connected_total"] = sum(by_size.values())
    if ns.beta_k is not None:
        table = beta_table_type1(ns.beta_k, as_fraction(ns.lam))
        out["beta"] = {
            "k": table.k, "lambda": fraction_str(table.lam),
            "entries": {H.label(): fraction_str(b) for H, b in table.entries.items()},
            "disconnected_nonzero": [H.label() for H in table.disconnected_nonzero()],
        }
    if not out:
        raise ConfigError("subgraph needs --pattern, --size-max or --beta-k")
    return out


def cmd_selftest(cfg: ExperimentConfig):
    from .selftest import run_selftest

    results = run_selftest()
    return {"checks": [{"name": n, "ok": ok} for n, ok in results],
            "passed": sum(ok for _, ok in results), "total": len(results)}


COMMANDS = {
    "exact": cmd_exact, "poly": cmd_poly, "taylor": cmd_taylor, "pseudo": cmd_pseudo,
    "theorem1": cmd_theorem1, "ssm-scan": cmd_ssm_scan, "accuracy": cmd_accuracy,
    "selftest": cmd_selftest,
}


def render(result, fmt: str) -> str:
    if fmt == "csv":
        if not isinstance(result, tuple):
            raise ConfigError("this command has no CSV form; use --format json")
        header, rows = result
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return buf.getvalue()
    if isinstance(result, tuple):
        header, rows = result
        result = {"rows": [dict(zip(header, r)) for r in rows]}
    return json.dumps(result, sort_keys=True, indent=2) + "\n"


def _fail(kind: str, msg: str, code: int) -> int:
    print(f"error={kind} message={json.dumps(msg)}", file=sys.stderr)
    return code


def run(argv: Sequence[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = make_config(ns)
        if cfg.command == "subgraph":
            result = cmd_subgraph(cfg, ns)
        else:
            result = COMMANDS[cfg.command](cfg)
        text = render(result, cfg.fmt)
        if cfg.out:
            with open(cfg.out, "w", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except BudgetExceeded as exc:
        return _fail("budget", str(exc), 3)
    except (ConfigError, GibbsUndefined, InfeasibleCondition, VanishingConstantTerm) as exc:
        return _fail("config", str(exc), 2)
    except AssertionError as exc:
        return _fail("assertion", str(exc), 1)
    if cfg.command == "theorem1" and not result["holds"]:
        return _fail("assertion", f"termwise equality fails: {json.dumps(result['witness'], sort_keys=True)}", 1)
    if cfg.command == "selftest" and result["passed"] != result["total"]:
        failed = [c["name"] for c in result["checks"] if not c["ok"]]
        return _fail("assertion", f"selftest failures: {', '.join(failed)}", 1)
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
