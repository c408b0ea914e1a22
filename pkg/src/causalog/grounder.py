"""Grounding of causal effect expressions.

A CEE is compiled, for a fixed finite domain, into a ground tree:
``ALL`` nodes are expanded into conditional conjunctions, variables are
substituted and every ``COR``/``SELECT``/``NEW`` occurrence becomes a
:class:`ChoicePoint`.  Atoms of exogenous predicates and built-in
comparisons are folded to constants while grounding, so the guards left in
the tree mention endogenous atoms only.

Trees are walked either exhaustively (:func:`flatten`) or along one
choice assignment (:func:`walk`), producing :class:`GuardedRule` objects.
"""
from __future__ import annotations

import itertools
from typing import NamedTuple, Optional

from .fo_eval import UNDEFINED, compare, eval_term
from .structures import Created, DomainAtom, Structure, element_key, sort_elements
from .syntax import (
    And, Atom, CAll, CAnd, CAtom, CIf, CNew, COr, CSelect, Exists, Forall,
    Implies, Not, Or, RExists, RForall, Theory, Truth, Var, conjoin, iter_cee,
)


class BudgetError(RuntimeError):
    """A configured search bound was hit."""


class CreationBudgetExceeded(BudgetError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


# ------------------------------------------------------------ ground formulas

class _GFormula:
    __slots__ = ()

    def _key(self):
        return (type(self).__name__, getattr(self, self.__slots__[0]))

    def __eq__(self, other):
        return type(other) is type(self) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())


class GNot(_GFormula):
    __slots__ = ("arg",)

    def __init__(self, arg):
        self.arg = arg


class GAnd(_GFormula):
    __slots__ = ("args",)

    def __init__(self, args):
        self.args = args


class GOr(_GFormula):
    __slots__ = ("args",)

    def __init__(self, args):
        self.args = args


def g_not(f):
    if f is True or f is False:
        return not f
    if isinstance(f, GNot):
        return f.arg
    return GNot(f)


def g_and(parts):
    out = []
    for p in parts:
        if p is False:
            return False
        if p is True:
            continue
        if isinstance(p, GAnd):
            out.extend(p.args)
        else:
            out.append(p)
    if not out:
        return True
    return out[0] if len(out) == 1 else GAnd(tuple(out))


def g_or(parts):
    out = []
    for p in parts:
        if p is True:
            return True
        if p is False:
            continue
        if isinstance(p, GOr):
            out.extend(p.args)
        else:
            out.append(p)
    if not out:
        return False
    return out[0] if len(out) == 1 else GOr(tuple(out))


def gval(f, true, unknown=frozenset()):
    """Kleene value of a ground formula; atoms in ``true`` are true, atoms
    in ``unknown`` unknown, all others false."""
    if f is True or f is False:
        return f
    if isinstance(f, DomainAtom):
        if f in true:
            return True
        return None if f in unknown else False
    if isinstance(f, GAnd):
        out = True
        for a in f.args:
            v = gval(a, true, unknown)
            if v is False:
                return False
            if v is None:
                out = None
        return out
    if isinstance(f, GOr):
        out = False
        for a in f.args:
            v = gval(a, true, unknown)
            if v is True:
                return True
            if v is None:
                out = None
        return out
    v = gval(f.arg, true, unknown)
    return None if v is None else not v


def gsimplify(f, possible):
    """Fold atoms outside ``possible`` to false."""
    if f is True or f is False:
        return f
    if isinstance(f, DomainAtom):
        return f if f in possible else False
    if isinstance(f, GAnd):
        return g_and([gsimplify(a, possible) for a in f.args])
    if isinstance(f, GOr):
        return g_or([gsimplify(a, possible) for a in f.args])
    return g_not(gsimplify(f.arg, possible))


def gatoms(f, out=None):
    out = set() if out is None else out
    if isinstance(f, DomainAtom):
        out.add(f)
    elif isinstance(f, (GAnd, GOr)):
        for a in f.args:
            gatoms(a, out)
    elif isinstance(f, GNot):
        gatoms(f.arg, out)
    return out


def gtext(f) -> str:
    if f is True:
        return "true"
    if f is False:
        return "false"
    if isinstance(f, DomainAtom):
        return str(f)
    if isinstance(f, GNot):
        return "~" + (gtext(f.arg) if isinstance(f.arg, DomainAtom) else f"({gtext(f.arg)})")
    sym = " & " if isinstance(f, GAnd) else " | "
    return sym.join(gtext(a) if isinstance(a, (DomainAtom, GNot)) else f"({gtext(a)})"
                    for a in f.args)


def _has_quantifier(phi) -> bool:
    if isinstance(phi, (Forall, Exists, RForall, RExists)):
        return True
    if isinstance(phi, (Atom, Truth)):
        return False
    if isinstance(phi, Not):
        return _has_quantifier(phi.arg)
    return _has_quantifier(phi.left) or _has_quantifier(phi.right)


# ------------------------------------------------------------------ choice points

class ChoicePoint(NamedTuple):
    kind: str            # "or" | "select" | "new"
    oid: str
    subst: tuple         # ((var, element), ...) sorted by variable

    def sort_key(self):
        return (tuple(int(x) for x in self.oid.split(".")),
                tuple((v, element_key(e)) for v, e in self.subst))

    def __str__(self):
        s = ",".join(f"{v}={e}" for v, e in self.subst)
        return f"{self.kind}@{self.oid}[{s}]"


class GuardedRule(NamedTuple):
    head: DomainAtom
    guard: tuple          # conjunction of ground formulas
    commitments: tuple    # ((ChoicePoint, resolution), ...)


def allocate_fresh(cp: ChoicePoint, counter: int, max_new: int = 8) -> Created:
    """The element created by the ``counter``-th creation on a branch."""
    if cp.kind != "new":
        raise ValueError(f"{cp} is not an object-creation choice point")
    if counter >= max_new:
        raise CreationBudgetExceeded(
            f"creation budget exceeded: {cp} needs element #{counter + 1} but max_new={max_new}")
    return Created(counter + 1, cp.oid)


# ------------------------------------------------------------------ ground tree

class GTAtom:
    __slots__ = ("atom",)
    det = True

    def __init__(self, atom):
        self.atom = atom


class GTIf:
    __slots__ = ("cond", "body", "det", "_rules")

    def __init__(self, cond, body):
        self.cond, self.body, self.det = cond, body, body.det
        self._rules = None


class GTAnd:
    __slots__ = ("children", "det", "_rules")

    def __init__(self, children):
        self.children = children
        self.det = all(c.det for c in children)
        self._rules = None


class GTOr:
    __slots__ = ("cp", "left", "right")
    det = False

    def __init__(self, cp, left, right):
        self.cp, self.left, self.right = cp, left, right


class SelectOption(NamedTuple):
    value: tuple          # the chosen elements, one per variable
    qual: object          # ground qualification
    static: bool          # qualification known true regardless of the process
    body: object


class GTSelect:
    __slots__ = ("cp", "options", "_index")
    det = False

    def __init__(self, cp, options):
        self.cp, self.options = cp, options
        self._index = {o.value: o for o in options}

    def option(self, value):
        return self._index.get(value)


class GTNew:
    __slots__ = ("cp", "node", "env")
    det = False

    def __init__(self, cp, node, env):
        self.cp, self.node, self.env = cp, node, env


_EMPTY = GTAnd(())


class _Ctx:
    """Interpretation context used while grounding: constants, integer
    range and (optionally) the exogenous structure for folding."""

    def __init__(self, exo: Optional[Structure], endogenous, int_range=None, constants=None):
        self.exo = exo
        self.endogenous = endogenous
        self.int_range = exo.int_range if exo is not None else int_range
        self.constants = exo.constants if exo is not None else (constants or {})


class Grounder:
    """Grounds the CEEs of a theory over one fixed domain.

    ``exo`` supplies the values of exogenous predicates; atoms over them are
    folded away.  Bodies of ``NEW`` nodes are grounded lazily, once the
    created element is known, and memoised.
    """

    def __init__(self, cees, domain, exo: Optional[Structure] = None,
                 endogenous=None, int_range=None, constants=None):
        self.cees = tuple(cees)
        self.domain = frozenset(domain)
        self.elems = sort_elements(self.domain)
        self.ctx = _Ctx(exo, endogenous, int_range, constants)
        self._new_bodies = {}
        self._tree = None

    @classmethod
    def for_theory(cls, t: Theory, exo: Structure, domain=None):
        endo = t.endogenous
        return cls(t.cees, exo.domain if domain is None else domain,
                   exo.drop(endo), endo)

    def tree(self):
        if self._tree is None:
            self._tree = GTAnd(tuple(self.ground(c, {}) for c in self.cees))
        return self._tree

    def new_body(self, gnew: GTNew, elem):
        key = (gnew.cp, elem)
        body = self._new_bodies.get(key)
        if body is None:
            env = dict(gnew.env)
            env[gnew.node.var] = elem
            if elem in self.domain:
                body = self.ground(gnew.node.body, env)
            else:
                sub = Grounder(self.cees, self.domain | {elem}, self.ctx.exo,
                               self.ctx.endogenous, self.ctx.int_range, self.ctx.constants)
                body = sub.ground(gnew.node.body, env)
            self._new_bodies[key] = body
        return body

    # formulas -------------------------------------------------------------
    def formula(self, phi, env):
        ctx = self.ctx
        if isinstance(phi, Atom):
            args = tuple(eval_term(t, ctx, env) for t in phi.args)
            if phi.builtin:
                return compare(phi.pred, *args)
            if UNDEFINED in args:
                return False
            exo = ctx.exo
            endo = ctx.endogenous
            if exo is not None and (endo is None or phi.pred not in endo):
                return exo.holds(phi.pred, args)
            return DomainAtom(phi.pred, args)
        if isinstance(phi, Truth):
            return phi.value
        if isinstance(phi, Not):
            return g_not(self.formula(phi.arg, env))
        if isinstance(phi, And):
            left = self.formula(phi.left, env)
            if left is False:
                return False
            return g_and([left, self.formula(phi.right, env)])
        if isinstance(phi, Or):
            left = self.formula(phi.left, env)
            if left is True:
                return True
            return g_or([left, self.formula(phi.right, env)])
        if isinstance(phi, Implies):
            left = g_not(self.formula(phi.left, env))
            if left is True:
                return True
            return g_or([left, self.formula(phi.right, env)])
        if isinstance(phi, (Forall, Exists, RForall, RExists)):
            parts = []
            universal = isinstance(phi, (Forall, RForall))
            for vals in self.tuples(len(phi.vars)):
                e = dict(env)
                e.update(zip(phi.vars, vals))
                body = self.formula(phi.body, e)
                if isinstance(phi, RForall):
                    body = g_or([g_not(self.formula(phi.qual, e)), body])
                elif isinstance(phi, RExists):
                    body = g_and([self.formula(phi.qual, e), body])
                if universal and body is False:
                    return False
                if not universal and body is True:
                    return True
                parts.append(body)
            return g_and(parts) if universal else g_or(parts)
        raise TypeError(f"not a formula: {phi!r}")

    def tuples(self, n):
        if n == 1:
            return ((d,) for d in self.elems)
        return itertools.product(self.elems, repeat=n)

    # CEEs ---------------------------------------------------------------
    @staticmethod
    def _cp(kind, node, env):
        return ChoicePoint(kind, node.oid, tuple(sorted(env.items())))

    def _guarded(self, phi, env, body_fn):
        """Ground ``body_fn()`` under condition ``phi``; None when inert."""
        cond = self.formula(phi, env)
        if cond is False:
            return None
        body = body_fn()
        if body is None:
            return None
        if cond is True and not _has_quantifier(phi):
            return body
        return GTIf(cond, body)

    def ground(self, c, env):
        node = self._ground(c, env)
        return _EMPTY if node is None else node

    def _ground(self, c, env):
        if isinstance(c, CAtom):
            args = tuple(eval_term(t, self.ctx, env) for t in c.args)
            if UNDEFINED in args:
                return None
            return GTAtom(DomainAtom(c.pred, args))
        if isinstance(c, CIf):
            return self._guarded(c.cond, env, lambda: self._ground(c.body, env))
        if isinstance(c, CAnd):
            parts = [p for p in (self._ground(c.left, env), self._ground(c.right, env))
                     if p is not None]
            if not parts:
                return None
            return parts[0] if len(parts) == 1 else GTAnd(tuple(parts))
        if isinstance(c, COr):
            return GTOr(self._cp("or", c, env), self.ground(c.left, env),
                        self.ground(c.right, env))
        if isinstance(c, CAll):
            parts = []
            for vals in self.tuples(len(c.vars)):
                e = dict(env)
                e.update(zip(c.vars, vals))
                sub = self._guarded(c.qual, e, lambda e=e: self._ground(c.body, e))
                if sub is not None:
                    parts.append(sub)
            if not parts:
                return None
            return parts[0] if len(parts) == 1 else GTAnd(tuple(parts))
        if isinstance(c, CSelect):
            options = []
            quantified = _has_quantifier(c.qual)
            for vals in self.tuples(len(c.vars)):
                e = dict(env)
                e.update(zip(c.vars, vals))
                qual = self.formula(c.qual, e)
                if qual is False:
                    continue
                options.append(SelectOption(vals, qual, qual is True and not quantified,
                                            self.ground(c.body, e)))
            return GTSelect(self._cp("select", c, env), tuple(options))
        if isinstance(c, CNew):
            return GTNew(self._cp("new", c, env), c, dict(env))
        raise TypeError(f"not a CEE: {c!r}")


def ground(cee, domain, exo: Optional[Structure] = None, endogenous=None,
           int_range=None, constants=None):
    """Ground a closed CEE over ``domain``.

    Without ``exo`` every user atom stays symbolic; with it, atoms of
    predicates outside ``endogenous`` are evaluated in ``exo``.
    """
    return Grounder((cee,), domain, exo, endogenous, int_range, constants).tree()


# ------------------------------------------------------------------ walking

def _det_rules(node):
    """Rules of a choice-free subtree, with guards relative to the subtree."""
    if isinstance(node, GTAtom):
        return ((node.atom, ()),)
    if node._rules is None:
        out = []
        if isinstance(node, GTIf):
            for head, g in _det_rules(node.body):
                out.append((head, (node.cond,) + g))
        else:
            for child in node.children:
                out.extend(_det_rules(child))
        node._rules = tuple(out)
    return node._rules


class Reached(NamedTuple):
    cp: ChoicePoint
    guards: tuple
    node: object


class Walk(NamedTuple):
    rules: list           # GuardedRule
    reached: list         # Reached, every choice point on the active path
    pending: list         # Reached, those without a resolution


def walk(grounder: Grounder, assignment: dict, tree=None) -> Walk:
    """Collect the rules active under ``assignment`` and the choice points
    reached along the way."""
    rules, reached, pending = [], [], []

    def go(node, guards, commits):
        if node.det:
            for head, g in _det_rules(node):
                rules.append(GuardedRule(head, guards + g, commits))
            return
        if isinstance(node, GTIf):
            go(node.body, guards + (node.cond,), commits)
            return
        if isinstance(node, GTAnd):
            for child in node.children:
                go(child, guards, commits)
            return
        r = Reached(node.cp, guards, node)
        reached.append(r)
        if node.cp not in assignment:
            pending.append(r)
            return
        res = assignment[node.cp]
        if res is None:
            return
        commits = commits + ((node.cp, res),)
        if isinstance(node, GTOr):
            go(node.left if res == "left" else node.right, guards, commits)
        elif isinstance(node, GTSelect):
            opt = node.option(res)
            if opt is not None:
                go(opt.body, guards + (opt.qual,), commits)
        else:
            go(grounder.new_body(node, res), guards, commits)

    go(grounder.tree() if tree is None else tree, (), ())
    return Walk(rules, reached, pending)


def flatten(gt, grounder: Optional[Grounder] = None, max_new: int = 8) -> list:
    """Every guarded rule of a ground tree, across all choice resolutions.

    ``NEW`` bodies are instantiated with provisional fresh elements, one per
    creation choice point, allocated in walk order.
    """
    rules = []
    counter = [0]

    def go(node, guards, commits):
        if node.det:
            for head, g in _det_rules(node):
                rules.append(GuardedRule(head, guards + g, commits))
        elif isinstance(node, GTIf):
            go(node.body, guards + (node.cond,), commits)
        elif isinstance(node, GTAnd):
            for child in node.children:
                go(child, guards, commits)
        elif isinstance(node, GTOr):
            go(node.left, guards, commits + ((node.cp, "left"),))
            go(node.right, guards, commits + ((node.cp, "right"),))
        elif isinstance(node, GTSelect):
            for opt in node.options:
                go(opt.body, guards + (opt.qual,), commits + ((node.cp, opt.value),))
        else:
            if grounder is None:
                raise ValueError("flattening NEW nodes needs the grounder")
            elem = allocate_fresh(node.cp, counter[0], max_new)
            counter[0] += 1
            go(grounder.new_body(node, elem), guards, commits + ((node.cp, elem),))

    go(gt, (), ())
    return rules


def rule_to_json(r: GuardedRule) -> dict:
    guard = " & ".join(gtext(g) if not isinstance(g, GOr) else f"({gtext(g)})"
                       for g in r.guard if g is not True) or "true"
    return {"head": str(r.head), "guard": guard,
            "commitments": [[str(cp), _res_text(res)] for cp, res in r.commitments]}


def _res_text(res):
    if isinstance(res, tuple):
        return ",".join(str(e) for e in res)
    return str(res)


# ------------------------------------------------------- object creation removal

def _fresh_name(base, taken):
    name = base
    while name in taken:
        name += "_"
    taken.add(name)
    return name


def eliminate_new(t: Theory, reserve="Reserve", made="Made") -> Theory:
    """Replace every ``NEW`` node by a ``SELECT`` over spare elements.

    Spare elements are those satisfying the (exogenous) ``Reserve``
    predicate; a selected spare becomes live through ``Made``.  Auxiliary
    ``N_i`` predicates record which node and which instance picked an
    element, and FO sentences keep picks unique.  All other quantifiers are
    relativised to live elements so unused spares stay invisible.
    """
    news = [n for c in t.cees for n in iter_cee(c) if isinstance(n, CNew)]
    if not news:
        return t
    taken = set(t.vocabulary.predicates) | set(t.vocabulary.constants)
    reserve = _fresh_name(reserve, taken)
    made = _fresh_name(made, taken)
    aux_names = {}
    arity = {}

    def live(vs):
        return conjoin(*(Or(Not(Atom(reserve, (Var(v),))), Atom(made, (Var(v),))) for v in vs))

    def rel(phi):
        if isinstance(phi, (Atom, Truth)):
            return phi
        if isinstance(phi, Not):
            return Not(rel(phi.arg))
        if isinstance(phi, (And, Or, Implies)):
            return type(phi)(rel(phi.left), rel(phi.right))
        if isinstance(phi, Forall):
            return Forall(phi.vars, Implies(live(phi.vars), rel(phi.body)))
        if isinstance(phi, Exists):
            return Exists(phi.vars, conjoin(live(phi.vars), rel(phi.body)))
        return type(phi)(phi.vars, conjoin(live(phi.vars), rel(phi.qual)), rel(phi.body))

    def tr(c, enclosing):
        if isinstance(c, CAtom):
            return CAtom(c.pred, c.args)
        if isinstance(c, CIf):
            return CIf(rel(c.cond), tr(c.body, enclosing))
        if isinstance(c, (CAnd, COr)):
            return type(c)(tr(c.left, enclosing), tr(c.right, enclosing))
        if isinstance(c, (CAll, CSelect)):
            inner = enclosing + [v for v in c.vars if v not in enclosing]
            return type(c)(c.vars, conjoin(live(c.vars), rel(c.qual)), tr(c.body, inner))
        i = len(aux_names) + 1
        name = _fresh_name(f"N{i}", taken)
        aux_names[c.oid] = name
        ctx = [v for v in enclosing if v != c.var]
        arity[name] = 1 + len(ctx)
        marker = CAnd(CAtom(name, (Var(c.var),) + tuple(Var(v) for v in ctx)),
                      CAtom(made, (Var(c.var),)))
        return CSelect((c.var,), Atom(reserve, (Var(c.var),)),
                       CAnd(marker, tr(c.body, enclosing + [c.var] if c.var not in enclosing
                                       else enclosing)))

    cees = tuple(tr(c, []) for c in t.cees)
    sentences = [rel(s) for s in t.sentences]
    names = list(aux_names.values())

    def n_atom(name, x, prefix):
        extra = tuple(Var(f"{prefix}{k}") for k in range(arity[name] - 1))
        return Atom(name, (Var(x),) + extra), tuple(v.name for v in extra)

    for i, a in enumerate(names):
        for b in names[i + 1:]:
            na, va = n_atom(a, "x", "y")
            nb, vb = n_atom(b, "x", "z")
            left = Exists(va, na) if va else na
            right = Exists(vb, nb) if vb else nb
            sentences.append(Forall(("x",), Not(And(left, right))))
    for a in names:
        n1, v1 = n_atom(a, "x1", "y")
        n2 = Atom(a, (Var("x2"),) + tuple(Var(v) for v in v1))
        sentences.append(Forall(("x1", "x2") + v1,
                                Implies(And(n1, n2), Atom("=", (Var("x1"), Var("x2"))))))
        if v1:
            na, _ = n_atom(a, "x", "y")
            nb, vz = n_atom(a, "x", "z")
            same = conjoin(*(Atom("=", (Var(y), Var(z))) for y, z in zip(v1, vz)))
            sentences.append(Forall(("x",) + v1 + vz, Implies(And(na, nb), same)))
    preds = dict(arity)
    preds[reserve] = 1
    preds[made] = 1
    return Theory(t.vocabulary.extend(preds), cees, tuple(sentences))


def auxiliary_predicates(original: Theory, transformed: Theory) -> frozenset:
    return frozenset(transformed.vocabulary.predicates) - frozenset(original.vocabulary.predicates)


def add_reservoir(exo: Structure, k: int, reserve="Reserve") -> Structure:
    """Extend ``exo`` with ``k`` spare named elements marked by ``reserve``."""
    names, i = [], 1
    while len(names) < k:
        name = f"r{i}"
        if name not in exo.domain:
            names.append(name)
        i += 1
    rels = dict(exo.relations)
    rels[reserve] = frozenset((n,) for n in names)
    return Structure(exo.domain | frozenset(names), rels, dict(exo.constants), exo.int_range)


def restore_created(m: Structure, reserve="Reserve", made="Made") -> Structure:
    """Turn spares that were picked into created elements and forget the
    unused ones, so models of a transformed theory compare with the
    original's under :func:`equal_modulo_created`."""
    spares = {t[0] for t in m.relations.get(reserve, ())}
    used = sort_elements(t[0] for t in m.relations.get(made, ()))
    mapping = {e: Created(i + 1, "") for i, e in enumerate(used)}
    unused = spares - set(used)
    domain = frozenset(mapping.get(e, e) for e in m.domain if e not in unused)
    rels = {}
    for p, ts in m.relations.items():
        rels[p] = frozenset(tuple(mapping.get(e, e) for e in t) for t in ts
                            if not unused.intersection(t))
    return Structure(domain, rels, dict(m.constants), m.int_range)
