"""pinrefine: tiered refinement of protein interaction networks and a
ten-method centrality benchmark for essential-protein prediction."""

from .centrality import (
    ALL_METHODS,
    CentralityParams,
    ConvergenceError,
    Ranking,
    compute,
    compute_local,
    compute_path,
    compute_walk,
)
from .community import Partition, delta_modularity, fast_unfolding, modularity
from .critical import (
    CriticalSelection,
    ModuleScore,
    build_cmpin,
    module_indicator_corr,
    module_nsl,
    module_tf,
    score_modules,
    select_critical,
)
from .evaluation import (
    ConfusionMetrics,
    EvalReport,
    classification_metrics,
    jackknife_curve,
    make_report,
    pr_curve_and_auc,
    topk_counts,
)
from .graph import (
    Graph,
    GraphStats,
    build_graph,
    connected_components,
    graph_stats,
    maximal_component_edges,
)
from .ingest import (
    DEFAULT_COMPARTMENTS,
    AnnotationStore,
    EdgeList,
    ExpressionTable,
    ParseError,
    parse_edge_list,
    parse_essential_list,
    parse_expression,
    parse_homology,
    parse_localization,
)
from .refine import ActivityProfile, activity_threshold, build_dpin, build_rdpin

__version__ = "0.1.0"

__all__ = [
    "ALL_METHODS",
    "ActivityProfile",
    "AnnotationStore",
    "CentralityParams",
    "ConfusionMetrics",
    "ConvergenceError",
    "CriticalSelection",
    "DEFAULT_COMPARTMENTS",
    "EdgeList",
    "EvalReport",
    "ExpressionTable",
    "Graph",
    "GraphStats",
    "ModuleScore",
    "ParseError",
    "Partition",
    "Ranking",
    "activity_threshold",
    "build_cmpin",
    "build_dpin",
    "build_graph",
    "build_rdpin",
    "classification_metrics",
    "compute",
    "compute_local",
    "compute_path",
    "compute_walk",
    "connected_components",
    "delta_modularity",
    "fast_unfolding",
    "graph_stats",
    "jackknife_curve",
    "make_report",
    "maximal_component_edges",
    "modularity",
    "module_indicator_corr",
    "module_nsl",
    "module_tf",
    "parse_edge_list",
    "parse_essential_list",
    "parse_expression",
    "parse_homology",
    "parse_localization",
    "pr_curve_and_auc",
    "score_modules",
    "select_critical",
    "topk_counts",
]
