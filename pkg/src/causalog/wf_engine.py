"""Model enumeration for FO(C) theories.

A model is produced by a *choice assignment*: one resolution for every
reachable ``COR``/``SELECT``/``NEW`` choice point.  For a given assignment
the active guarded rules are evaluated under the well-founded semantics;
the assignment yields a model when

* the well-founded fixpoint is total,
* every choice point is resolved consistently with the final state
  (a fired ``SELECT`` picked a satisfier; an unfired one had none; a
  ``NEW`` created an element exactly when its context holds), and
* every FO sentence of the theory holds.

Models are deduplicated up to renaming of created elements.
"""
from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .fo_eval import eval2
from .grounder import (
    BudgetError, CreationBudgetExceeded, GAnd, GOr, Grounder, GTNew, GTOr,
    GTSelect, allocate_fresh, flatten, g_and, g_not, g_or, gsimplify, gval,
    walk,
)
from .parser import print_formula
from .structures import (
    Created, DomainAtom, PartialStructure, Structure, canonical_key,
    default_extension, dumps_structure, structure_to_json,
)
from .syntax import Theory


class ChoiceSpaceOverflow(BudgetError):
    pass


@dataclass(frozen=True)
class Budget:
    max_new: int = 8
    max_elements: int = 256
    max_choice_points: int = 24
    max_assignments: int = 10 ** 6


@dataclass
class ModelSet:
    models: list = field(default_factory=list)        # Structure
    assignments: list = field(default_factory=list)   # dict per model
    budget_hit: bool = False
    budget_reports: list = field(default_factory=list)
    assignments_tried: int = 0

    def __len__(self):
        return len(self.models)

    def __iter__(self):
        return iter(self.models)

    def keys(self, aux=frozenset()):
        return {canonical_key(m, aux) for m in self.models}

    def to_json(self, voc=None) -> dict:
        return {"models": [structure_to_json(m, voc) for m in self.models],
                "count": len(self.models), "budget_hit": self.budget_hit}


# ------------------------------------------------------------- well-founded

def _active(rules, ca):
    if ca is None:
        return list(rules)
    return [r for r in rules if all(ca.get(cp, _MISSING) == res for cp, res in r.commitments)]


_MISSING = object()


def _lfp(rules, start, ok):
    """Least set containing ``start`` closed under rules whose guard passes
    ``ok(guard_values_fn)``."""
    X = set(start)
    pending = [r for r in rules if r[0] not in X]
    changed = True
    while changed:
        changed = False
        rest = []
        for r in pending:
            if r[0] in X:
                continue
            if ok(r[1], X):
                X.add(r[0])
                changed = True
            else:
                rest.append(r)
        pending = rest
    return X


def wf_fixpoint(rules):
    """Alternating fixpoint of propositional rules ``(head, guard)`` whose
    guards are ground formulas over head atoms.  Returns ``(true, possible)``."""
    heads = {h for h, _ in rules}
    simple = []
    for h, g in rules:
        g = gsimplify(g, heads)
        if g is not False:
            simple.append((h, g))
    lower, upper = set(), {h for h, _ in simple}
    while True:
        upper_f = frozenset(upper)

        def certainly(g, X):
            return gval(g, X, upper_f - X) is True

        new_lower = _lfp(simple, (), certainly)
        lower_f = frozenset(new_lower)

        def possibly(g, Y):
            return gval(g, lower_f, Y - lower_f) is not False

        new_upper = _lfp(simple, new_lower, possibly)
        if new_lower == lower and new_upper == upper:
            return lower, upper
        lower, upper = new_lower, new_upper


def _conj(guard):
    return g_and(list(guard))


def wfs(rules, ca, exo: Structure, endogenous=None) -> PartialStructure:
    """Well-founded partial structure of the rules whose commitments agree
    with ``ca``; exogenous atoms are read from ``exo`` and never change."""
    active = _active(rules, ca)
    if endogenous is None:
        endogenous = frozenset(r.head.pred for r in active)
    endogenous = frozenset(endogenous)
    base = exo.drop(endogenous)
    prepared = []
    for r in active:
        g = _fold_exo(_conj(r.guard), base, endogenous)
        prepared.append((r.head, g))
    lower, upper = wf_fixpoint(prepared)
    return PartialStructure(base, endogenous, frozenset(lower), frozenset(upper - lower))


def _fold_exo(g, exo, endogenous):
    if g is True or g is False:
        return g
    if isinstance(g, DomainAtom):
        if g.pred in endogenous:
            return g
        return exo.holds(g.pred, g.args)
    if isinstance(g, GAnd):
        return g_and([_fold_exo(a, exo, endogenous) for a in g.args])
    if isinstance(g, GOr):
        return g_or([_fold_exo(a, exo, endogenous) for a in g.args])
    return g_not(_fold_exo(g.arg, exo, endogenous))


# ------------------------------------------------------------ select validity

def _context_holds(guards, true_atoms):
    return all(gval(g, true_atoms) is True for g in guards)


def _validity_failures(reached, ca, true_atoms):
    """Choice points whose resolution is inconsistent with the final state."""
    bad = []
    for r in reached:
        res = ca.get(r.cp)
        ctx = _context_holds(r.guards, true_atoms)
        node = r.node
        if isinstance(node, GTOr):
            ok = (res in ("left", "right")) if ctx else res is None
        elif isinstance(node, GTNew):
            ok = isinstance(res, Created) if ctx else res is None
        else:
            if not ctx:
                ok = res is None
            elif res is None:
                ok = not any(gval(o.qual, true_atoms) is True for o in node.options)
            else:
                opt = node.option(res)
                ok = opt is not None and gval(opt.qual, true_atoms) is True
        if not ok:
            bad.append(r)
    return bad


# ------------------------------------------------------------------ search

class _Search:
    def __init__(self, t: Theory, exo: Structure, budget: Budget):
        self.t = t
        self.voc = t.vocabulary
        self.endo = t.endogenous
        self.exo = default_extension(exo.drop(self.endo), _exo_voc(t))
        self.budget = budget
        self.grounders = {}
        self.found = {}
        self.count = 0
        self.budget_reports = []

    def grounder(self, domain):
        g = self.grounders.get(domain)
        if g is None:
            g = Grounder(self.t.cees, domain, self.exo, self.endo)
            self.grounders[domain] = g
        return g

    def options(self, r, created):
        node, static = r.node, not r.guards
        if isinstance(node, GTOr):
            return ["left", "right"] if static else ["left", "right", None]
        if isinstance(node, GTSelect):
            opts = [o.value for o in node.options]
            if static and any(o.static for o in node.options):
                return opts
            return opts + [None]
        return ["new"] if static else ["new", None]

    def pick(self, pending):
        def prio(r):
            return (0 if isinstance(r.node, GTNew) else 1, r.cp.sort_key())
        return min(pending, key=prio)

    def children(self, assignment, created, domain):
        """Expand one search node: ``None`` for a leaf (already evaluated),
        else the list of child nodes."""
        g = self.grounder(domain)
        w = walk(g, assignment)
        if len(w.reached) > self.budget.max_choice_points:
            raise ChoiceSpaceOverflow(
                f"{len(w.reached)} ground choice points on one branch exceed the cap "
                f"of {self.budget.max_choice_points}")
        if not w.pending:
            self.leaf(g, w, assignment, domain)
            return None
        r = self.pick(w.pending)
        out = []
        for opt in self.options(r, created):
            if opt == "new":
                try:
                    elem = allocate_fresh(r.cp, created, self.budget.max_new)
                except CreationBudgetExceeded as exc:
                    self.budget_reports.append(f"{exc} (branch: {_describe(assignment)})")
                    continue
                if len(domain) + 1 > self.budget.max_elements:
                    self.budget_reports.append(
                        f"domain would exceed max_elements={self.budget.max_elements} "
                        f"(branch: {_describe(assignment)})")
                    continue
                out.append(({**assignment, r.cp: elem}, created + 1, domain | {elem}))
            else:
                out.append(({**assignment, r.cp: opt}, created, domain))
        return out

    def run(self, assignment=None, created=0, domain=None):
        node = ({} if assignment is None else assignment, created,
                self.exo.domain if domain is None else domain)
        for child in self.children(*node) or ():
            self.run(*child)

    def frontier(self, width):
        """Breadth-first expansion until at least ``width`` open nodes remain
        (or the search is exhausted); leaves met on the way are evaluated."""
        nodes = [({}, 0, self.exo.domain)]
        while nodes and len(nodes) < width:
            nxt = []
            for node in nodes:
                nxt.extend(self.children(*node) or ())
            nodes = nxt
        return nodes

    def leaf(self, g, w, assignment, domain):
        self.count += 1
        if self.count > self.budget.max_assignments:
            raise ChoiceSpaceOverflow(
                f"more than {self.budget.max_assignments} choice assignments")
        base = self.exo.with_domain(domain)
        pf = wfs(w.rules, None, base, self.endo)
        if not pf.total:
            return
        true_atoms = pf.true
        if _validity_failures(w.reached, assignment, true_atoms):
            return
        model = default_extension(base.with_atoms(true_atoms), self.voc)
        for s in self.t.sentences:
            if not eval2(s, model):
                return
        self.keep(canonical_key(model), model, dict(assignment))

    def keep(self, key, model, assignment):
        # among isomorphic witnesses keep the smallest rendering, so the
        # output does not depend on the order branches were explored in
        old = self.found.get(key)
        if old is None or dumps_structure(model, self.voc) < dumps_structure(old[0], self.voc):
            self.found[key] = (model, assignment)


def _exo_voc(t):
    return t.vocabulary.__class__({p: n for p, n in t.vocabulary.predicates.items()
                                   if p not in t.endogenous},
                                  t.vocabulary.constants, t.vocabulary.int_range)


def _describe(assignment):
    return "; ".join(f"{cp}={v}" for cp, v in sorted(assignment.items(),
                                                     key=lambda kv: kv[0].sort_key())) or "root"


def _finish(search: _Search) -> ModelSet:
    items = list(search.found.values())
    items.sort(key=lambda mv: dumps_structure(mv[0], search.voc))
    ms = ModelSet([m for m, _ in items], [a for _, a in items],
                  bool(search.budget_reports), list(search.budget_reports), search.count)
    return ms


def _worker(args):
    t, exo, budget, nodes = args
    s = _Search(t, exo, budget)
    for node in nodes:
        s.run(*node)
    return list(s.found.items()), s.budget_reports, s.count


def enumerate_models(t: Theory, exo: Structure, budget: Optional[Budget] = None,
                     jobs: int = 1) -> ModelSet:
    """All models of ``t`` over the exogenous structure ``exo``.

    With ``jobs > 1`` the open branches of the search are distributed over
    worker processes; the result does not depend on ``jobs``.

    Raises :class:`CreationBudgetExceeded` (with the models found so far in
    ``.partial``) when some branch needed more created elements than the
    budget allows, and :class:`ChoiceSpaceOverflow` when the choice space
    exceeds its caps.
    """
    budget = budget or Budget()
    search = _Search(t, exo, budget)
    if jobs > 1:
        nodes = search.frontier(4 * jobs)
        chunks = [nodes[i::jobs] for i in range(jobs) if nodes[i::jobs]]
        if chunks:
            with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
                results = list(pool.map(_worker, [(t, exo, budget, c) for c in chunks]))
            for found, reports, count in results:
                for k, (m, a) in found:
                    search.keep(k, m, a)
                search.budget_reports.extend(reports)
                search.count += count
        if search.count > budget.max_assignments:
            raise ChoiceSpaceOverflow(f"more than {budget.max_assignments} choice assignments")
    else:
        search.run()
    ms = _finish(search)
    if ms.budget_hit:
        raise CreationBudgetExceeded("; ".join(ms.budget_reports), partial=ms)
    return ms


def select_validity(t: Theory, ca: dict, m: Structure) -> bool:
    """Whether the choices in ``ca`` are consistent with the final state ``m``."""
    endo = t.endogenous
    g = Grounder(t.cees, m.domain, m.drop(endo), endo)
    w = walk(g, ca)
    true_atoms = m.atoms(endo & set(m.relations))
    return not w.pending and not _validity_failures(w.reached, ca, true_atoms)


def unsupported_atoms(t: Theory, m: Structure, ca: dict) -> set:
    """True endogenous atoms of ``m`` that no active rule with a true guard
    causes under the choices ``ca``."""
    endo = t.endogenous
    g = Grounder(t.cees, m.domain, m.drop(endo), endo)
    w = walk(g, ca)
    true_atoms = m.atoms(endo & set(m.relations))
    supported = {r.head for r in w.rules
                 if all(gval(x, true_atoms) is True for x in r.guard)}
    return set(true_atoms) - supported


@dataclass
class CheckResult:
    is_model: bool
    assignment: Optional[dict] = None
    diagnostics: list = field(default_factory=list)

    def __bool__(self):
        return self.is_model


def check_model(t: Theory, m: Structure, budget: Optional[Budget] = None) -> CheckResult:
    """Decide whether ``m`` is a model of ``t`` (up to created-element renaming)."""
    endo = t.endogenous
    m = default_extension(m, t.vocabulary)
    exo = m.drop(endo).without_created()
    models = enumerate_models(t, exo, budget)
    key = canonical_key(m)
    for model, ca in zip(models.models, models.assignments):
        if canonical_key(model) == key:
            return CheckResult(True, ca)
    return CheckResult(False, None, explain_non_model(t, m, models))


def explain_non_model(t: Theory, m: Structure, models: ModelSet) -> list:
    """Human-readable reasons why ``m`` is not a model of ``t``."""
    out = [f"violated sentence: {print_formula(s)}" for s in t.sentences if not eval2(s, m)]
    endo = t.endogenous
    true_atoms = m.atoms(endo & set(m.relations))
    g = Grounder(t.cees, m.domain, m.drop(endo), endo)
    try:
        rules = flatten(g.tree(), g)
    except CreationBudgetExceeded:
        rules = walk(g, {}).rules
    firing = [r for r in rules if all(gval(x, true_atoms) is True for x in r.guard)]
    for a in sorted({str(r.head) for r in firing
                     if not r.commitments and r.head not in true_atoms}):
        out.append(f"unsatisfied effect: {a} is caused but false")
    caused = {r.head for r in firing}
    for a in sorted(str(a) for a in true_atoms if a not in caused):
        out.append(f"unsupported atom: {a} is true but nothing causes it")
    if not out:
        out.append("no choice assignment reproduces this structure")
    return out


def models_to_json(ms: ModelSet, voc=None) -> str:
    return json.dumps(ms.to_json(voc), sort_keys=True)
