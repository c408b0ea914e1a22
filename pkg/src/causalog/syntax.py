"""Abstract syntax of FO(C): terms, first-order formulas, causal effect
expressions (CEEs) and theories.

All nodes are frozen dataclasses, so theories can be hashed, compared
structurally and shared freely.  CEE nodes carry an occurrence id (their
path in the theory) which identifies choice points during grounding.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Union

COMPARISONS = ("<", ">", "=<", ">=", "=", "~=")


# ---------------------------------------------------------------- terms

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Plus:
    left: "Term"
    right: "Term"


Term = Union[Var, Const, Num, Plus]


# ------------------------------------------------------------- formulas

@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple = ()

    @property
    def builtin(self) -> bool:
        return self.pred in COMPARISONS


@dataclass(frozen=True)
class Truth:
    value: bool


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    vars: tuple
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    vars: tuple
    body: "Formula"


@dataclass(frozen=True)
class RForall:
    """Restricted universal quantification: for all ``vars`` with ``qual``, ``body``."""
    vars: tuple
    qual: "Formula"
    body: "Formula"


@dataclass(frozen=True)
class RExists:
    vars: tuple
    qual: "Formula"
    body: "Formula"


Formula = Union[Atom, Truth, Not, And, Or, Implies, Forall, Exists, RForall, RExists]
TRUE = Truth(True)
FALSE = Truth(False)


# ----------------------------------------------------------------- CEEs

@dataclass(frozen=True)
class CAtom:
    pred: str
    args: tuple = ()
    oid: str = ""


@dataclass(frozen=True)
class CIf:
    cond: Formula
    body: "CEE"
    oid: str = ""


@dataclass(frozen=True)
class CAnd:
    left: "CEE"
    right: "CEE"
    oid: str = ""


@dataclass(frozen=True)
class COr:
    left: "CEE"
    right: "CEE"
    oid: str = ""


@dataclass(frozen=True)
class CAll:
    vars: tuple
    qual: Formula
    body: "CEE"
    oid: str = ""


@dataclass(frozen=True)
class CSelect:
    vars: tuple
    qual: Formula
    body: "CEE"
    oid: str = ""


@dataclass(frozen=True)
class CNew:
    var: str
    body: "CEE"
    oid: str = ""


CEE = Union[CAtom, CIf, CAnd, COr, CAll, CSelect, CNew]
CEE_TYPES = (CAtom, CIf, CAnd, COr, CAll, CSelect, CNew)


def cee_children(c: CEE) -> tuple:
    if isinstance(c, CAtom):
        return ()
    if isinstance(c, (CAnd, COr)):
        return (c.left, c.right)
    return (c.body,)


def number_occurrences(c: CEE, oid: str) -> CEE:
    """Return ``c`` with occurrence ids re-derived from ``oid`` downwards."""
    if isinstance(c, CAtom):
        return replace(c, oid=oid)
    if isinstance(c, (CAnd, COr)):
        return replace(c, left=number_occurrences(c.left, oid + ".0"),
                       right=number_occurrences(c.right, oid + ".1"), oid=oid)
    return replace(c, body=number_occurrences(c.body, oid + ".0"), oid=oid)


def iter_cee(c: CEE):
    yield c
    for child in cee_children(c):
        yield from iter_cee(child)


# ----------------------------------------------------------- vocabulary

@dataclass(frozen=True)
class Vocabulary:
    predicates: dict = field(default_factory=dict)   # name -> arity
    constants: frozenset = frozenset()
    int_range: Optional[tuple] = None

    def __hash__(self):
        return hash((tuple(sorted(self.predicates.items())), self.constants, self.int_range))

    def arity(self, pred: str) -> int:
        return self.predicates[pred]

    def extend(self, predicates=None, constants=()) -> "Vocabulary":
        preds = dict(self.predicates)
        preds.update(predicates or {})
        return Vocabulary(preds, self.constants | frozenset(constants), self.int_range)


@dataclass(frozen=True)
class Theory:
    vocabulary: Vocabulary
    cees: tuple = ()
    sentences: tuple = ()

    def __post_init__(self):
        cees = tuple(number_occurrences(c, str(i)) for i, c in enumerate(self.cees))
        object.__setattr__(self, "cees", cees)
        object.__setattr__(self, "sentences", tuple(self.sentences))

    @property
    def endogenous(self) -> frozenset:
        return frozenset(p for p, kind in classify_symbols(self).items()
                         if kind == "endogenous")

    @property
    def exogenous(self) -> frozenset:
        return frozenset(self.vocabulary.predicates) - self.endogenous

    def without_sentences(self) -> "Theory":
        return Theory(self.vocabulary, self.cees, ())


def classify_symbols(t: Theory) -> dict:
    """Map every predicate to ``"endogenous"`` or ``"exogenous"``.

    A predicate is endogenous when it heads some atom-expression in a CEE;
    occurrences in conditions, qualifications or FO sentences do not count.
    """
    heads = {n.pred for c in t.cees for n in iter_cee(c) if isinstance(n, CAtom)}
    return {p: ("endogenous" if p in heads else "exogenous")
            for p in sorted(t.vocabulary.predicates)}


# ------------------------------------------------------- free variables

def term_vars(t: Term) -> set:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Plus):
        return term_vars(t.left) | term_vars(t.right)
    return set()


def free_vars(phi) -> set:
    """Free variables of a formula or a CEE."""
    if isinstance(phi, (Atom, CAtom)):
        out = set()
        for a in phi.args:
            out |= term_vars(a)
        return out
    if isinstance(phi, Truth):
        return set()
    if isinstance(phi, Not):
        return free_vars(phi.arg)
    if isinstance(phi, (And, Or, Implies, CAnd, COr)):
        return free_vars(phi.left) | free_vars(phi.right)
    if isinstance(phi, (Forall, Exists)):
        return free_vars(phi.body) - set(phi.vars)
    if isinstance(phi, (RForall, RExists, CAll, CSelect)):
        return (free_vars(phi.qual) | free_vars(phi.body)) - set(phi.vars)
    if isinstance(phi, CIf):
        return free_vars(phi.cond) | free_vars(phi.body)
    if isinstance(phi, CNew):
        return free_vars(phi.body) - {phi.var}
    raise TypeError(f"not a formula or CEE: {phi!r}")


def desugar_restricted(phi: Formula) -> Formula:
    """Replace restricted quantifiers by their guarded classical forms."""
    if isinstance(phi, (Atom, Truth)):
        return phi
    if isinstance(phi, Not):
        return Not(desugar_restricted(phi.arg))
    if isinstance(phi, (And, Or, Implies)):
        return type(phi)(desugar_restricted(phi.left), desugar_restricted(phi.right))
    if isinstance(phi, (Forall, Exists)):
        return type(phi)(phi.vars, desugar_restricted(phi.body))
    if isinstance(phi, RForall):
        return Forall(phi.vars, Implies(desugar_restricted(phi.qual), desugar_restricted(phi.body)))
    if isinstance(phi, RExists):
        return Exists(phi.vars, And(desugar_restricted(phi.qual), desugar_restricted(phi.body)))
    raise TypeError(f"not a formula: {phi!r}")


def formula_preds(phi) -> set:
    """User predicates occurring in a formula (builtins excluded)."""
    if isinstance(phi, Atom):
        return set() if phi.builtin else {phi.pred}
    if isinstance(phi, Truth):
        return set()
    if isinstance(phi, Not):
        return formula_preds(phi.arg)
    if isinstance(phi, (And, Or, Implies)):
        return formula_preds(phi.left) | formula_preds(phi.right)
    if isinstance(phi, (Forall, Exists)):
        return formula_preds(phi.body)
    return formula_preds(phi.qual) | formula_preds(phi.body)


def conjoin(*phis: Formula) -> Formula:
    parts = [p for p in phis if p != TRUE]
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out
