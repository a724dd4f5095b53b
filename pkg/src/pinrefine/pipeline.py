"""End-to-end orchestration: config handling, stage execution, artifact files.

Every stage writes its artifacts under the output directory and can also be
re-run standalone from the files a previous stage left behind. All output is
deterministic: fixed column orders, sorted iteration, floats at six
significant digits, and no timestamps, so re-running a command with the same
inputs reproduces every file byte for byte.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from . import centrality, community, critical, evaluation, graph, ingest, refine
from .centrality import ALL_METHODS, CentralityParams, Ranking
from .community import Partition
from .critical import CriticalSelection, ModuleScore
from .graph import Graph
from .ingest import AnnotationStore, ExpressionTable

logger = logging.getLogger(__name__)

TIERS = ("spin", "dpin", "rdpin", "cmpin")
TIER_LABELS = {"spin": "S-PIN", "dpin": "D-PIN", "rdpin": "RD-PIN", "cmpin": "CM-PIN"}

# Known reference values for specific dataset snapshots. Purely informational:
# they are reported side by side with computed values and never asserted,
# since input data versions drift.
BASELINES = {
    "dip": {
        "spin_edges": 15166,
        "dpin_edges": 9514,
        "rdpin_edges": 5175,
        "cmpin_edges": 3765,
        "spin_avg_degree": 6.3911,
        "spin_avg_clustering": 0.0923,
        "spin_density": 0.0013,
        "modules": 26,
        "modularity": 0.7408,
        "critical_modules": 15,
        "lid_top600_cmpin": 405,
    },
    "biogrid": {
        "spin_edges": 52833,
        "modules": 19,
        "modularity": 0.6532,
        "critical_modules": 15,
    },
}


class ConfigError(ValueError):
    """Invalid configuration or command usage."""


class PipelineStageError(RuntimeError):
    """A pipeline stage failed; carries the stage label."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage} failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class PipelineConfig:
    out: Path
    edges: Path | None = None
    expression: Path | None = None
    localization: Path | None = None
    homology: Path | None = None
    essential: Path | None = None
    t: int = 36
    th1: float = -0.005
    th2: float = 0.5
    th3: float = 0.25
    dmnc_exponent: float = 1.7
    tp_sigma: float = 1.0
    damping: float = 0.85
    tolerance: float = 1e-10
    max_iter: int = 1000
    topk: tuple[int, ...] = evaluation.DEFAULT_TOPK
    baseline: str | None = None
    plots: bool = False

    def params(self) -> CentralityParams:
        return CentralityParams(
            dmnc_exponent=self.dmnc_exponent,
            tp_sigma=self.tp_sigma,
            damping=self.damping,
            tolerance=self.tolerance,
            max_iter=self.max_iter,
        )


_PATH_KEYS = ("out", "edges", "expression", "localization", "homology", "essential")
_FLOAT_KEYS = ("th1", "th2", "th3", "dmnc_exponent", "tp_sigma", "damping", "tolerance")
_INT_KEYS = ("t", "max_iter")


def load_config_file(path: Path) -> dict[str, str]:
    """Read a flat ``key = value`` file, ignoring blanks and # comments."""
    raw: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{line_no}: expected 'key = value', got {stripped!r}")
        key, _, value = stripped.partition("=")
        raw[key.strip()] = value.strip()
    return raw


def make_config(raw: dict[str, str]) -> PipelineConfig:
    """Build and validate a PipelineConfig from string settings."""
    known = set(_PATH_KEYS) | set(_FLOAT_KEYS) | set(_INT_KEYS) | {"topk", "baseline", "plots"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if "out" not in raw or not raw["out"]:
        raise ConfigError("an output directory is required (out = ... or --out)")
    kwargs: dict = {}
    for key in _PATH_KEYS:
        if key in raw and raw[key]:
            kwargs[key] = Path(raw[key])
    for key in _FLOAT_KEYS:
        if key in raw:
            try:
                kwargs[key] = float(raw[key])
            except ValueError:
                raise ConfigError(f"{key} must be a number, got {raw[key]!r}") from None
    for key in _INT_KEYS:
        if key in raw:
            try:
                kwargs[key] = int(raw[key])
            except ValueError:
                raise ConfigError(f"{key} must be an integer, got {raw[key]!r}") from None
    if "topk" in raw:
        try:
            ks = tuple(sorted({int(k) for k in raw["topk"].split(",") if k.strip()}))
        except ValueError:
            raise ConfigError(f"topk must be comma-separated integers, got {raw['topk']!r}") from None
        if not ks or ks[0] < 1:
            raise ConfigError("topk values must be positive")
        kwargs["topk"] = ks
    if "baseline" in raw and raw["baseline"]:
        if raw["baseline"] not in BASELINES:
            raise ConfigError(f"unknown baseline {raw['baseline']!r}; choose from {sorted(BASELINES)}")
        kwargs["baseline"] = raw["baseline"]
    if "plots" in raw:
        value = raw["plots"].lower()
        if value not in {"true", "false", "1", "0", "yes", "no"}:
            raise ConfigError(f"plots must be a boolean, got {raw['plots']!r}")
        kwargs["plots"] = value in {"true", "1", "yes"}
    cfg = PipelineConfig(**kwargs)
    if cfg.t < 1:
        raise ConfigError(f"t must be >= 1, got {cfg.t}")
    if cfg.tp_sigma <= 0:
        raise ConfigError("tp_sigma must be positive")
    if not 0 < cfg.damping < 1:
        raise ConfigError("damping must lie strictly between 0 and 1")
    if cfg.max_iter < 1 or cfg.tolerance <= 0:
        raise ConfigError("max_iter must be >= 1 and tolerance positive")
    return cfg


def resolve_workers() -> int:
    """Worker cap from PINREFINE_THREADS; 0 means one per CPU, unset means 1."""
    value = os.environ.get("PINREFINE_THREADS", "").strip()
    if not value:
        return 1
    try:
        workers = int(value)
    except ValueError:
        raise ConfigError(f"PINREFINE_THREADS must be an integer, got {value!r}") from None
    if workers < 0:
        raise ConfigError("PINREFINE_THREADS must be >= 0")
    return workers if workers > 0 else (os.cpu_count() or 1)


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _require(path: Path | None, what: str) -> Path:
    if path is None:
        raise ConfigError(f"missing required input path: {what}")
    if not path.is_file():
        raise FileNotFoundError(f"{what} file not found: {path}")
    return path


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")


def clear_failure_marker(out: Path) -> None:
    marker = out / "FAILED"
    if marker.exists():
        marker.unlink()


def run_stage(out: Path, stage: str, fn, *args, **kwargs):
    """Run one stage; on failure leave a FAILED marker naming the stage."""
    try:
        return fn(*args, **kwargs)
    except Exception as exc:
        out.mkdir(parents=True, exist_ok=True)
        _write(out / "FAILED", f"stage = {stage}\nerror = {exc}\n")
        raise PipelineStageError(stage, exc) from exc


# -- artifact writers and readers ---------------------------------------------

def _tier_path(out: Path, tier: str) -> Path:
    return out / "networks" / f"{tier}.tsv"


def write_tier(out: Path, tier: str, g: Graph) -> None:
    _write(_tier_path(out, tier), g.to_edge_list().to_tsv())


def write_nodes(out: Path, ids: Iterable[str]) -> None:
    _write(out / "networks" / "nodes.tsv", "".join(f"{pid}\n" for pid in sorted(ids)))


def write_stats(out: Path, graphs: dict[str, Graph]) -> None:
    lines = ["network\tinteractions\tavg_degree\tavg_clustering\tdensity\n"]
    for tier in TIERS:
        if tier not in graphs:
            continue
        s = graph.graph_stats(graphs[tier])
        lines.append(
            f"{TIER_LABELS[tier]}\t{s.edge_count}\t{_fmt(s.avg_degree)}"
            f"\t{_fmt(s.avg_clustering)}\t{_fmt(s.density)}\n"
        )
    _write(out / "networks" / "stats.tsv", "".join(lines))


def load_tier_graph(out: Path, tier: str) -> Graph:
    edge_path = _tier_path(out, tier)
    nodes_path = out / "networks" / "nodes.tsv"
    if not edge_path.is_file():
        raise FileNotFoundError(f"network file not found: {edge_path} (run the earlier stages first)")
    with open(edge_path, encoding="utf-8") as fh:
        edges = ingest.parse_edge_list(fh)
    universe: list[str] = []
    if nodes_path.is_file():
        universe = [line.strip() for line in nodes_path.read_text(encoding="utf-8").splitlines() if line.strip()]
    return graph.build_graph(edges, universe=universe)


def write_partition(out: Path, p: Partition) -> None:
    _write(out / "partition.tsv", p.to_tsv())


def load_partition(out: Path) -> Partition:
    path = out / "partition.tsv"
    if not path.is_file():
        raise FileNotFoundError(f"partition file not found: {path} (run the cluster stage first)")
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("# modules="):
        raise ValueError(f"{path}: missing partition header")
    header = lines[0][2:].split("\t")
    n_modules = int(header[0].split("=", 1)[1])
    q = float(header[1].split("=", 1)[1])
    ids: list[str] = []
    membership: list[int] = []
    for line in lines[1:]:
        if not line.strip():
            continue
        pid, module = line.split("\t")
        ids.append(pid)
        membership.append(int(module))
    return Partition(tuple(ids), tuple(membership), n_modules, q)


_SCORE_COLUMNS = ("module", "corr", "nsl", "tf", "n_nodes", "essential_count",
                  "internal_edges", "boundary_edges")


def write_module_scores(out: Path, scores: list[ModuleScore]) -> None:
    lines = ["\t".join(_SCORE_COLUMNS) + "\n"]
    for s in scores:
        lines.append(
            f"{s.module}\t{_fmt(s.corr)}\t{_fmt(s.nsl)}\t{_fmt(s.tf)}"
            f"\t{s.n_nodes}\t{s.essential_count}\t{s.internal_edges}\t{s.boundary_edges}\n"
        )
    _write(out / "module_scores.tsv", "".join(lines))


def load_module_scores(out: Path) -> list[ModuleScore]:
    path = out / "module_scores.tsv"
    if not path.is_file():
        raise FileNotFoundError(f"module score file not found: {path} (run score-modules first)")
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or tuple(lines[0].split("\t")) != _SCORE_COLUMNS:
        raise ValueError(f"{path}: unexpected column header")
    scores = []
    for line in lines[1:]:
        if not line.strip():
            continue
        f = dict(zip(_SCORE_COLUMNS, line.split("\t")))
        scores.append(ModuleScore(
            module=int(f["module"]), corr=float(f["corr"]), nsl=float(f["nsl"]),
            tf=float(f["tf"]), n_nodes=int(f["n_nodes"]),
            internal_edges=int(f["internal_edges"]), boundary_edges=int(f["boundary_edges"]),
            essential_count=int(f["essential_count"]),
        ))
    return scores


def write_selection(out: Path, sel: CriticalSelection) -> None:
    def ids(s: frozenset[int]) -> str:
        return " ".join(str(i) for i in sorted(s))

    text = (
        f"th1 = {_fmt(sel.th1)}\nth2 = {_fmt(sel.th2)}\nth3 = {_fmt(sel.th3)}\n"
        f"conservatism = {ids(sel.conservatism)}\n"
        f"subcellular = {ids(sel.subcellular)}\n"
        f"topology = {ids(sel.topology)}\n"
        f"critical = {ids(sel.critical)}\n"
    )
    _write(out / "selection.txt", text)


def write_ranking(out: Path, tier: str, r: Ranking) -> None:
    _write(out / "rankings" / tier / f"{r.method}.tsv", r.to_tsv())


def load_ranking(out: Path, tier: str, method: str) -> Ranking:
    path = out / "rankings" / tier / f"{method}.tsv"
    if not path.is_file():
        raise FileNotFoundError(f"ranking file not found: {path} (run the centrality stage first)")
    entries = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        _, pid, score = line.split("\t")
        entries.append((pid, float(score)))
    return Ranking(method, tuple(entries))


# -- stages --------------------------------------------------------------------

@dataclass
class RefineResult:
    spin: Graph
    dpin: Graph
    rdpin: Graph
    counts: dict[str, int] = field(default_factory=dict)


def load_annotations(cfg: PipelineConfig) -> AnnotationStore:
    with open(_require(cfg.localization, "localization"), encoding="utf-8") as fh:
        localization = ingest.parse_localization(fh)
    with open(_require(cfg.homology, "homology"), encoding="utf-8") as fh:
        homology = ingest.parse_homology(fh)
    with open(_require(cfg.essential, "essential"), encoding="utf-8") as fh:
        essential = frozenset(ingest.parse_essential_list(fh))
    return AnnotationStore(localization, homology, essential)


def load_expression(cfg: PipelineConfig) -> ExpressionTable:
    with open(_require(cfg.expression, "expression"), encoding="utf-8") as fh:
        return ingest.parse_expression(fh, cfg.t)


def stage_refine(cfg: PipelineConfig) -> RefineResult:
    """Build the static, co-activity, and co-localization tiers."""
    out = cfg.out
    counts: dict[str, int] = {}

    def build_spin() -> Graph:
        with open(_require(cfg.edges, "edges"), encoding="utf-8") as fh:
            edges = ingest.parse_edge_list(fh)
        counts["edge_rows_dropped_self_loops"] = edges.self_loops_dropped
        counts["edge_rows_dropped_duplicates"] = edges.duplicates_dropped
        return graph.build_graph(edges)

    spin = run_stage(out, "refine/S-PIN", build_spin)
    dpin = run_stage(out, "refine/D-PIN",
                     lambda: refine.build_dpin(spin, load_expression(cfg), cfg.t))
    rdpin = run_stage(out, "refine/RD-PIN",
                      lambda: refine.build_rdpin(dpin, load_annotations(cfg).localization))
    write_nodes(out, spin.ids)
    for tier, g in (("spin", spin), ("dpin", dpin), ("rdpin", rdpin)):
        write_tier(out, tier, g)
    write_stats(out, {"spin": spin, "dpin": dpin, "rdpin": rdpin})
    counts.update(spin_nodes=spin.n, spin_edges=spin.m, dpin_edges=dpin.m, rdpin_edges=rdpin.m)
    return RefineResult(spin, dpin, rdpin, counts)


def clustered_subgraph(rd: Graph) -> Graph:
    """Maximal-component subgraph of the co-localization tier."""
    component = graph.connected_components(rd)[0]
    return graph.build_graph(graph.maximal_component_edges(rd), universe=component)


def stage_cluster(cfg: PipelineConfig, rd: Graph | None = None) -> tuple[Graph, Partition]:
    def run() -> tuple[Graph, Partition]:
        rdpin = rd if rd is not None else load_tier_graph(cfg.out, "rdpin")
        clustered = clustered_subgraph(rdpin)
        partition = community.fast_unfolding(clustered)
        write_partition(cfg.out, partition)
        return clustered, partition

    return run_stage(cfg.out, "cluster", run)


def stage_score_modules(
    cfg: PipelineConfig,
    clustered: Graph | None = None,
    partition: Partition | None = None,
    annotations: AnnotationStore | None = None,
) -> list[ModuleScore]:
    def run() -> list[ModuleScore]:
        store = annotations if annotations is not None else load_annotations(cfg)
        p = partition if partition is not None else load_partition(cfg.out)
        g = clustered if clustered is not None else clustered_subgraph(load_tier_graph(cfg.out, "rdpin"))
        scores = critical.score_modules(g, p, store.homology, store.localization, store.essential)
        write_module_scores(cfg.out, scores)
        return scores

    return run_stage(cfg.out, "score-modules", run)


def stage_build_cm(
    cfg: PipelineConfig,
    rd: Graph | None = None,
    partition: Partition | None = None,
    scores: list[ModuleScore] | None = None,
    graphs: dict[str, Graph] | None = None,
) -> tuple[CriticalSelection, Graph]:
    def run() -> tuple[CriticalSelection, Graph]:
        rdpin = rd if rd is not None else load_tier_graph(cfg.out, "rdpin")
        p = partition if partition is not None else load_partition(cfg.out)
        module_scores = scores if scores is not None else load_module_scores(cfg.out)
        sel = critical.select_critical(module_scores, cfg.th1, cfg.th2, cfg.th3)
        cmpin = critical.build_cmpin(rdpin, p, sel)
        write_selection(cfg.out, sel)
        write_tier(cfg.out, "cmpin", cmpin)
        all_tiers = dict(graphs) if graphs else {
            tier: load_tier_graph(cfg.out, tier)
            for tier in ("spin", "dpin", "rdpin")
            if _tier_path(cfg.out, tier).is_file()
        }
        all_tiers["cmpin"] = cmpin
        write_stats(cfg.out, all_tiers)
        return sel, cmpin

    return run_stage(cfg.out, "build-cm", run)


def stage_centrality(
    cfg: PipelineConfig,
    graphs: dict[str, Graph] | None = None,
    tiers: Iterable[str] | None = None,
    methods: Iterable[str] | None = None,
) -> dict[str, dict[str, Ranking]]:
    tiers = tuple(tiers) if tiers is not None else TIERS
    methods = tuple(methods) if methods is not None else ALL_METHODS
    params = cfg.params()
    workers = resolve_workers()
    rankings: dict[str, dict[str, Ranking]] = {}
    for tier in tiers:
        g = graphs[tier] if graphs and tier in graphs else run_stage(
            cfg.out, f"centrality/{tier}", load_tier_graph, cfg.out, tier)
        rankings[tier] = {}
        for method in methods:
            r = run_stage(cfg.out, f"centrality/{tier}/{method}",
                          centrality.compute, g, method, params, workers)
            write_ranking(cfg.out, tier, r)
            rankings[tier][method] = r
    return rankings


def _metrics_csv(reports: dict[str, evaluation.EvalReport]) -> str:
    lines = [
        "# cutoff for SN/SP/PPV/NPV/FM/ACC and TopP: k = P (gold proteins in ranking)\n",
        "# PRAUC: average-precision step integration over all cutoffs\n",
        "method,SN,SP,PPV,NPV,FM,ACC,TopP,PRAUC\n",
    ]
    for method in ALL_METHODS:
        if method not in reports:
            continue
        rep = reports[method]
        m = rep.metrics
        top_p = rep.jackknife[-1] if rep.jackknife else 0
        lines.append(
            f"{method},{_fmt(m.sn)},{_fmt(m.sp)},{_fmt(m.ppv)},{_fmt(m.npv)},"
            f"{_fmt(m.fm)},{_fmt(m.acc)},{top_p},{_fmt(rep.prauc)}\n"
        )
    return "".join(lines)


def _topk_csv(reports: dict[str, evaluation.EvalReport], ks: tuple[int, ...]) -> str:
    usable = [k for k in ks if any(k in rep.topk_counts for rep in reports.values())]
    lines = ["method," + ",".join(f"top{k}" for k in usable) + "\n"]
    for method in ALL_METHODS:
        if method not in reports:
            continue
        counts = reports[method].topk_counts
        lines.append(method + "," + ",".join(str(counts.get(k, "")) for k in usable) + "\n")
    return "".join(lines)


def stage_evaluate(
    cfg: PipelineConfig,
    rankings: dict[str, dict[str, Ranking]] | None = None,
    tiers: Iterable[str] | None = None,
    methods: Iterable[str] | None = None,
    gold: frozenset[str] | None = None,
) -> dict[str, dict[str, evaluation.EvalReport]]:
    tiers = tuple(tiers) if tiers is not None else TIERS
    methods = tuple(methods) if methods is not None else ALL_METHODS

    def load_gold() -> frozenset[str]:
        with open(_require(cfg.essential, "essential"), encoding="utf-8") as fh:
            return frozenset(ingest.parse_essential_list(fh))

    gold_set = gold if gold is not None else run_stage(cfg.out, "evaluate", load_gold)
    all_reports: dict[str, dict[str, evaluation.EvalReport]] = {}
    for tier in tiers:
        def evaluate_tier(tier: str = tier) -> dict[str, evaluation.EvalReport]:
            reports = {}
            curves = {}
            for method in methods:
                if rankings and tier in rankings and method in rankings[tier]:
                    r = rankings[tier][method]
                else:
                    r = load_ranking(cfg.out, tier, method)
                rep = evaluation.make_report(r, gold_set, cfg.topk)
                _check_cutoff_identity(rep)
                reports[method] = rep
                curve, _ = evaluation.pr_curve_and_auc(r, gold_set)
                curves[method] = curve
                _write(cfg.out / "reports" / "curves" / f"{tier}_{method}_pr.csv",
                       "k,recall,precision\n" + "".join(
                           f"{k},{_fmt(rec)},{_fmt(prec)}\n"
                           for k, (rec, prec) in enumerate(curve, start=1)))
                _write(cfg.out / "reports" / "curves" / f"{tier}_{method}_jackknife.csv",
                       "rank,essential_count\n" + "".join(
                           f"{i},{c}\n" for i, c in enumerate(rep.jackknife, start=1)))
            _write(cfg.out / "reports" / f"{tier}_metrics.csv", _metrics_csv(reports))
            _write(cfg.out / "reports" / f"{tier}_topk.csv", _topk_csv(reports, cfg.topk))
            if cfg.plots:
                _write_tier_plots(cfg.out, tier, reports, curves)
            return reports

        all_reports[tier] = run_stage(cfg.out, f"evaluate/{tier}", evaluate_tier)
    return all_reports


def _check_cutoff_identity(rep: evaluation.EvalReport) -> None:
    """At cutoff k = P the confusion matrix forces SN = PPV and SP = NPV."""
    m = rep.metrics
    if m.sn != m.ppv or m.sp != m.npv or abs(m.fm - m.sn) > 1e-12:
        raise AssertionError(f"cutoff-P metric identity violated for {rep.method}")


def _assert_tier_invariants(graphs: dict[str, Graph]) -> None:
    chain = [graphs[t] for t in TIERS]
    for tighter, looser in zip(chain[1:], chain[:-1]):
        if tighter.ids != looser.ids:
            raise AssertionError("tier node sets differ")
        if not set(tighter.to_edge_list().pairs) <= set(looser.to_edge_list().pairs):
            raise AssertionError("tier edge sets are not nested")


def _metadata_text(cfg: PipelineConfig, counts: dict[str, int | float | str]) -> str:
    import platform

    from . import __version__

    lines = [
        f"tool_version = {__version__}\n",
        f"python_version = {platform.python_version()}\n",
        "random_seeds = none\n",
        "activity_stddev = population\n",
        "activity_rule = strictly greater than threshold\n",
        "missing_annotation_edges = removed\n",
        "prauc_integration = average-precision step rule\n",
    ]
    cfg_items = {
        "t": cfg.t, "th1": _fmt(cfg.th1), "th2": _fmt(cfg.th2), "th3": _fmt(cfg.th3),
        "dmnc_exponent": _fmt(cfg.dmnc_exponent), "tp_sigma": _fmt(cfg.tp_sigma),
        "damping": _fmt(cfg.damping), "tolerance": _fmt(cfg.tolerance),
        "max_iter": cfg.max_iter, "topk": ",".join(str(k) for k in cfg.topk),
    }
    lines.extend(f"{key} = {value}\n" for key, value in sorted(cfg_items.items()))
    lines.extend(f"{key} = {value}\n" for key, value in sorted(counts.items()))
    return "".join(lines)


def _baseline_text(name: str, computed: dict[str, float | int]) -> str:
    reference = BASELINES[name]
    lines = [
        f"# informational comparison against the {name} snapshot reference values;\n",
        "# differences are expected from data-version drift and are never asserted\n",
        "metric\tcomputed\treference\n",
    ]
    for metric in sorted(reference):
        have = computed.get(metric)
        shown = _fmt(have) if isinstance(have, float) else ("" if have is None else str(have))
        ref = reference[metric]
        lines.append(f"{metric}\t{shown}\t{_fmt(ref) if isinstance(ref, float) else ref}\n")
    return "".join(lines)


def run_pipeline(cfg: PipelineConfig) -> dict[str, dict[str, evaluation.EvalReport]]:
    """Run every stage in order and write the full artifact set."""
    cfg.out.mkdir(parents=True, exist_ok=True)
    clear_failure_marker(cfg.out)

    refined = stage_refine(cfg)
    annotations = run_stage(cfg.out, "refine/annotations", load_annotations, cfg)
    clustered, partition = stage_cluster(cfg, rd=refined.rdpin)
    scores = stage_score_modules(cfg, clustered=clustered, partition=partition, annotations=annotations)
    tier_graphs = {"spin": refined.spin, "dpin": refined.dpin, "rdpin": refined.rdpin}
    selection, cmpin = stage_build_cm(cfg, rd=refined.rdpin, partition=partition,
                                      scores=scores, graphs=tier_graphs)
    tier_graphs["cmpin"] = cmpin
    run_stage(cfg.out, "report", _assert_tier_invariants, tier_graphs)

    rankings = stage_centrality(cfg, graphs=tier_graphs)
    reports = stage_evaluate(cfg, rankings=rankings, gold=annotations.essential)

    counts: dict[str, int | float | str] = dict(refined.counts)
    counts.update(
        clustered_nodes=clustered.n,
        clustered_edges=clustered.m,
        modules=partition.n_modules,
        modularity=_fmt(partition.q if partition.q is not None else float("nan")),
        critical_modules=len(selection.critical),
        cmpin_edges=cmpin.m,
    )
    _write(cfg.out / "run_metadata.txt", _metadata_text(cfg, counts))

    if cfg.baseline:
        computed: dict[str, float | int] = {
            "spin_edges": refined.spin.m,
            "dpin_edges": refined.dpin.m,
            "rdpin_edges": refined.rdpin.m,
            "cmpin_edges": cmpin.m,
            "modules": partition.n_modules,
            "modularity": partition.q if partition.q is not None else float("nan"),
            "critical_modules": len(selection.critical),
        }
        spin_stats = graph.graph_stats(refined.spin)
        computed["spin_avg_degree"] = spin_stats.avg_degree
        computed["spin_avg_clustering"] = spin_stats.avg_clustering
        computed["spin_density"] = spin_stats.density
        lid = reports.get("cmpin", {}).get("LID")
        if lid is not None and 600 in lid.topk_counts:
            computed["lid_top600_cmpin"] = lid.topk_counts[600]
        _write(cfg.out / "baseline_comparison.tsv", _baseline_text(cfg.baseline, computed))

    return reports


def sweep_thresholds(
    cfg: PipelineConfig,
    th1_list: list[float],
    th2_list: list[float],
    th3_list: list[float],
    method: str = "LID",
) -> list[dict]:
    """Evaluate every threshold combination on a shared clustering.

    The tiers, partition, and module scores do not depend on the thresholds,
    so they are computed once; each combination then selects modules, builds
    its own module-filtered network, and evaluates the designated method.
    Failed combinations are marked in the output and the sweep continues.
    """
    if not th1_list or not th2_list or not th3_list:
        raise ConfigError("threshold sweep lists must be nonempty")
    if method not in ALL_METHODS:
        raise ConfigError(f"unknown centrality method {method!r}")
    cfg.out.mkdir(parents=True, exist_ok=True)
    clear_failure_marker(cfg.out)

    refined = stage_refine(cfg)
    annotations = run_stage(cfg.out, "refine/annotations", load_annotations, cfg)
    clustered, partition = stage_cluster(cfg, rd=refined.rdpin)
    scores = stage_score_modules(cfg, clustered=clustered, partition=partition, annotations=annotations)

    params = cfg.params()
    workers = resolve_workers()
    rows: list[dict] = []
    usable_ks = [k for k in cfg.topk if k <= refined.spin.n]
    header = (["th1", "th2", "th3", "critical_modules"]
              + [f"top{k}" for k in usable_ks] + ["top_p", "acc", "prauc", "status"])
    for th1 in th1_list:
        for th2 in th2_list:
            for th3 in th3_list:
                row: dict = {"th1": th1, "th2": th2, "th3": th3, "status": "ok"}
                try:
                    sel = critical.select_critical(scores, th1, th2, th3)
                    cmpin = critical.build_cmpin(refined.rdpin, partition, sel)
                    ranking = centrality.compute(cmpin, method, params, workers)
                    rep = evaluation.make_report(ranking, annotations.essential, tuple(usable_ks))
                    row.update(
                        critical_modules=len(sel.critical),
                        top_p=rep.jackknife[-1] if rep.jackknife else 0,
                        acc=rep.metrics.acc,
                        prauc=rep.prauc,
                    )
                    for k in usable_ks:
                        row[f"top{k}"] = rep.topk_counts.get(k, "")
                except Exception as exc:  # keep sweeping; mark the combination
                    logger.warning("sweep combination (%s, %s, %s) failed: %s", th1, th2, th3, exc)
                    row["status"] = f"FAILED: {exc}"
                rows.append(row)

    lines = [",".join(header) + "\n"]
    for row in rows:
        cells = []
        for col in header:
            value = row.get(col, "")
            cells.append(_fmt(value) if isinstance(value, float) else str(value))
        lines.append(",".join(cells) + "\n")
    _write(cfg.out / "sweep.csv", "".join(lines))
    return rows


# -- minimal SVG line plots -----------------------------------------------------

_PALETTE = ("#e64b35", "#4dbbd5", "#00a087", "#3c5488", "#f39b7f",
            "#8491b4", "#91d1c2", "#b09c85", "#7e6148", "#dc0000")


def _svg_plot(series: list[tuple[str, list[float], list[float]]],
              title: str, xlabel: str, ylabel: str) -> str:
    width, height = 720, 480
    left, right, top, bottom = 70, 170, 40, 50
    plot_w, plot_h = width - left - right, height - top - bottom
    xs_all = [x for _, xs, _ in series for x in xs]
    ys_all = [y for _, _, ys in series for y in ys]
    x_min, x_max = (min(xs_all), max(xs_all)) if xs_all else (0.0, 1.0)
    y_min, y_max = (min(ys_all), max(ys_all)) if ys_all else (0.0, 1.0)
    if x_max == x_min:
        x_max = x_min + 1.0
    if y_max == y_min:
        y_max = y_min + 1.0

    def sx(x: float) -> float:
        return left + (x - x_min) / (x_max - x_min) * plot_w

    def sy(y: float) -> float:
        return top + plot_h - (y - y_min) / (y_max - y_min) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">\n',
        f'<rect width="{width}" height="{height}" fill="white"/>\n',
        f'<text x="{left + plot_w / 2:.1f}" y="20" text-anchor="middle" font-size="15">{title}</text>\n',
        f'<line x1="{left}" y1="{top + plot_h}" x2="{left + plot_w}" y2="{top + plot_h}" stroke="black"/>\n',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" stroke="black"/>\n',
        f'<text x="{left + plot_w / 2:.1f}" y="{height - 12}" text-anchor="middle" font-size="12">{xlabel}</text>\n',
        f'<text x="18" y="{top + plot_h / 2:.1f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 18 {top + plot_h / 2:.1f})">{ylabel}</text>\n',
        f'<text x="{left}" y="{height - 30}" font-size="10" text-anchor="middle">{_fmt(x_min)}</text>\n',
        f'<text x="{left + plot_w}" y="{height - 30}" font-size="10" text-anchor="middle">{_fmt(x_max)}</text>\n',
        f'<text x="{left - 8}" y="{top + plot_h:.1f}" font-size="10" text-anchor="end">{_fmt(y_min)}</text>\n',
        f'<text x="{left - 8}" y="{top + 4}" font-size="10" text-anchor="end">{_fmt(y_max)}</text>\n',
    ]
    for idx, (label, xs, ys) in enumerate(series):
        color = _PALETTE[idx % len(_PALETTE)]
        points = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>\n')
        ly = top + 16 * idx
        parts.append(f'<rect x="{left + plot_w + 14}" y="{ly}" width="12" height="3" fill="{color}"/>\n')
        parts.append(f'<text x="{left + plot_w + 32}" y="{ly + 6}" font-size="11">{label}</text>\n')
    parts.append("</svg>\n")
    return "".join(parts)


def _write_tier_plots(
    out: Path,
    tier: str,
    reports: dict[str, evaluation.EvalReport],
    curves: dict[str, tuple[tuple[float, float], ...]],
) -> None:
    jk_series = []
    pr_series = []
    for method in ALL_METHODS:
        if method not in reports:
            continue
        jk = reports[method].jackknife
        jk_series.append((method, [float(i) for i in range(1, len(jk) + 1)],
                          [float(c) for c in jk]))
        curve = curves[method]
        pr_series.append((f"{method} ({_fmt(reports[method].prauc)})",
                          [rec for rec, _ in curve], [prec for _, prec in curve]))
    _write(out / "reports" / "plots" / f"{tier}_jackknife.svg",
           _svg_plot(jk_series, f"{TIER_LABELS[tier]} cumulative essentials",
                     "rank", "essential proteins"))
    _write(out / "reports" / "plots" / f"{tier}_pr.svg",
           _svg_plot(pr_series, f"{TIER_LABELS[tier]} precision-recall",
                     "recall", "precision"))
