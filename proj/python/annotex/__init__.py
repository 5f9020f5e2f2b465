from annotex._annotex import (
    Bundle,
    Graph,
    ParseError,
    RuntimeError,
    __version__,
    build_cvd,
    build_mlp,
    build_regression,
    build_tree,
    bundle_to_json,
    coverage,
    criterion,
    evaluate,
    graph_digest,
    graph_to_json,
    metrics,
    parse_bundle,
    parse_graph,
    predict_patient,
    report_json,
    report_markdown,
    verify,
)

__all__ = [
    "Bundle",
    "Graph",
    "ParseError",
    "RuntimeError",
    "__version__",
    "build_cvd",
    "build_mlp",
    "build_regression",
    "build_tree",
    "bundle_to_json",
    "coverage",
    "criterion",
    "evaluate",
    "graph_digest",
    "graph_to_json",
    "metrics",
    "parse_bundle",
    "parse_graph",
    "predict_patient",
    "report_json",
    "report_markdown",
    "verify",
]
