"""Workbench for quotient-inductive types at desk scale.

Compile declarations into signatures plus equations, build the quotient
term algebra by staged saturation, and run executable checks of
satisfaction, initiality, and dependent elimination.
"""

from .engine import (
    ClassId,
    Decision,
    QWState,
    SaturationResult,
    check_equations_hold,
    closed_terms,
    find_separator,
    new_qw,
    replay_merges,
)
from .equations import Equation, EquationSystem, SatReport, lift, make_system, sat_check
from .errors import WorkbenchError
from .initiality import (
    DepTarget,
    RecTarget,
    check_coherence,
    check_comp,
    check_rec_hom,
    check_rep_independence,
    check_uniq,
    dep_target,
    qw_elim,
    qw_rec,
    rec_target,
)
from .schema import (
    Classification,
    QITDecl,
    check_positivity,
    classify,
    elaborate,
    parse_decl,
    parse_ground_term,
    pretty_print,
)
from .terms import (
    OMEGA,
    Arity,
    FiniteAlgebra,
    Node,
    OmegaTable,
    OpNode,
    Signature,
    Var,
    check_hom,
    eval_alg,
    iota,
    map_opnode,
    map_term,
    node,
    omega_node,
    omega_table,
    signature,
    subst,
    table_algebra,
    term_from_json,
    term_key,
    term_size,
    term_to_json,
)
from .translate import freeify, from_w_reductions, from_w_suspension

__version__ = "0.1.0"

__all__ = [
    "Arity",
    "ClassId",
    "Classification",
    "Decision",
    "DepTarget",
    "Equation",
    "EquationSystem",
    "FiniteAlgebra",
    "Node",
    "OMEGA",
    "OmegaTable",
    "OpNode",
    "QITDecl",
    "QWState",
    "RecTarget",
    "SatReport",
    "SaturationResult",
    "Signature",
    "Var",
    "WorkbenchError",
    "check_coherence",
    "check_comp",
    "check_equations_hold",
    "check_hom",
    "check_positivity",
    "check_rec_hom",
    "check_rep_independence",
    "check_uniq",
    "classify",
    "closed_terms",
    "dep_target",
    "elaborate",
    "eval_alg",
    "find_separator",
    "freeify",
    "from_w_reductions",
    "from_w_suspension",
    "iota",
    "lift",
    "make_system",
    "map_opnode",
    "map_term",
    "new_qw",
    "node",
    "omega_node",
    "omega_table",
    "parse_decl",
    "parse_ground_term",
    "pretty_print",
    "qw_elim",
    "qw_rec",
    "rec_target",
    "replay_merges",
    "sat_check",
    "signature",
    "subst",
    "table_algebra",
    "term_from_json",
    "term_key",
    "term_size",
    "term_to_json",
]
