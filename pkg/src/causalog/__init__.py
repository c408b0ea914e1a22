"""Causal effect expressions (C-Log) combined with first-order sentences.

Typical use::

    from causalog import parse_theory, load_structure, enumerate_models

    t = parse_theory(open("gear.foc").read())
    exo = load_structure(open("gear_pedal.json").read(), t.vocabulary, t.endogenous)
    for m in enumerate_models(t, exo):
        print(m)
"""
from .grounder import (
    BudgetError, CreationBudgetExceeded, add_reservoir, eliminate_new, ground,
    restore_created,
)
from .parser import ParseError, parse_theory, print_theory
from .process_sim import compare_with_wf, enumerate_processes, simulate
from .structures import (
    Created, Structure, StructureError, equal_modulo_created, load_structure,
)
from .syntax import Theory
from .wf_engine import (
    Budget, ChoiceSpaceOverflow, check_model, enumerate_models, select_validity,
    unsupported_atoms, wfs,
)

__all__ = [
    "Budget", "BudgetError", "ChoiceSpaceOverflow", "Created", "CreationBudgetExceeded",
    "ParseError", "Structure", "StructureError", "Theory", "add_reservoir",
    "check_model", "compare_with_wf", "eliminate_new", "enumerate_models",
    "enumerate_processes", "equal_modulo_created", "ground", "load_structure",
    "parse_theory", "print_theory", "restore_created", "select_validity", "simulate",
    "unsupported_atoms", "wfs",
]
