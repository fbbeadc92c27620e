"""Spanning crowns and square-Hamilton certificates in expander graphs."""

from crowns._core import (
    Graph,
    PreconditionError,
    StageFailureError,
    crown_fixture,
    eml_audit,
    estimate_lambda,
    load_edge_list,
    paley,
    random_regular,
    run_pipeline,
    save_edge_list,
    split_matchmakers,
    square_hamilton_order,
    verify_crown,
    verify_square_hamilton,
)

__all__ = [
    "Graph",
    "PreconditionError",
    "StageFailureError",
    "crown_fixture",
    "eml_audit",
    "estimate_lambda",
    "load_edge_list",
    "paley",
    "random_regular",
    "run_pipeline",
    "save_edge_list",
    "split_matchmakers",
    "square_hamilton_order",
    "verify_crown",
    "verify_square_hamilton",
]

__version__ = "0.1.0"
