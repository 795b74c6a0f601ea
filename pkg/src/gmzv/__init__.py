"""Graph-indexed multiple zeta values: direct series, exact reduction, Hecke checks."""
from .combination import IntCombination, MzvIndex, PolylogTerm
from .config import SeriesConfig
from .eisenstein import (
    FormProduct,
    LinearForm,
    PrefixTerm,
    eis_step,
    gmzv_to_mzv,
    gmzv_to_polylog,
    prefix_to_mzv,
    reduce_to_prefix_chains,
    tree_to_form_product,
)
from .graph import (
    DecoratedGraph,
    Edge,
    FlowBasis,
    build_graph,
    homology_rank,
    load_graph,
    normalize_valency_two,
    sign_feasible,
    solve_constraints,
)
from .mzv import EvalResult, evaluate_combination, polylog_multi, zeta_mzv
from .series import TorsionDecoration, gmzv_direct, higher_green_numeric, mordell_tornheim

__all__ = [
    "DecoratedGraph",
    "Edge",
    "EvalResult",
    "FlowBasis",
    "FormProduct",
    "IntCombination",
    "LinearForm",
    "MzvIndex",
    "PolylogTerm",
    "PrefixTerm",
    "SeriesConfig",
    "TorsionDecoration",
    "build_graph",
    "eis_step",
    "evaluate_combination",
    "gmzv_direct",
    "gmzv_to_mzv",
    "gmzv_to_polylog",
    "higher_green_numeric",
    "homology_rank",
    "load_graph",
    "mordell_tornheim",
    "normalize_valency_two",
    "polylog_multi",
    "prefix_to_mzv",
    "reduce_to_prefix_chains",
    "sign_feasible",
    "solve_constraints",
    "tree_to_form_product",
    "zeta_mzv",
]
