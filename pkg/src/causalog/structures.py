"""Finite structures, partial (three-valued) structures, and the JSON file
format used for exogenous input and for model output.

Domain elements are plain Python values: ``str`` for named elements,
``int`` for integers of the declared range, and :class:`Created` for
elements produced by object creation.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import NamedTuple, Optional


class StructureError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Created:
    """An element created by a ``NEW`` node.

    ``index`` is the creation counter on the branch that made it and ``tag``
    the occurrence id of the creating node.
    """
    index: int
    tag: str = field(default="", compare=True)

    def __str__(self):
        return f"_p{self.index}"

    __repr__ = __str__


class DomainAtom(NamedTuple):
    pred: str
    args: tuple

    def __str__(self):
        if not self.args:
            return self.pred
        return f"{self.pred}({','.join(render_element(a) for a in self.args)})"


def render_element(e) -> str:
    return str(e)


def element_key(e):
    """Total order on domain elements: integers, then names, then created."""
    if isinstance(e, bool):
        raise TypeError("booleans are not domain elements")
    if isinstance(e, int):
        return (0, e, "")
    if isinstance(e, str):
        return (1, 0, e)
    return (2, e.index, e.tag)


def sort_elements(elems):
    return sorted(elems, key=element_key)


def atom_key(a: DomainAtom):
    return (a.pred, tuple(element_key(e) for e in a.args))


@dataclass(frozen=True)
class Structure:
    """A two-valued structure: finite domain, relations and constants."""
    domain: frozenset
    relations: dict            # pred -> frozenset of tuples
    constants: dict = field(default_factory=dict)
    int_range: Optional[tuple] = None

    def __hash__(self):
        return hash((self.domain, frozenset(self.relations.items()), self.int_range))

    def holds(self, pred, args=()) -> bool:
        return tuple(args) in self.relations.get(pred, ())

    @property
    def created(self) -> list:
        return sort_elements(e for e in self.domain if isinstance(e, Created))

    @property
    def named(self) -> list:
        return sort_elements(e for e in self.domain if isinstance(e, str))

    def atoms(self, preds=None) -> frozenset:
        preds = self.relations if preds is None else preds
        return frozenset(DomainAtom(p, t) for p in preds for t in self.relations.get(p, ()))

    def restrict(self, preds) -> "Structure":
        preds = set(preds)
        rels = {p: ts for p, ts in self.relations.items() if p in preds}
        return Structure(self.domain, rels, dict(self.constants), self.int_range)

    def drop(self, preds) -> "Structure":
        return self.restrict(set(self.relations) - set(preds))

    def with_atoms(self, atoms, created=()) -> "Structure":
        rels = {p: set(ts) for p, ts in self.relations.items()}
        for a in atoms:
            rels.setdefault(a.pred, set()).add(a.args)
        return Structure(self.domain | frozenset(created),
                         {p: frozenset(ts) for p, ts in rels.items()},
                         dict(self.constants), self.int_range)

    def with_domain(self, elems) -> "Structure":
        return Structure(self.domain | frozenset(elems), self.relations,
                         self.constants, self.int_range)

    def without_created(self) -> "Structure":
        created = frozenset(self.created)
        rels = {p: frozenset(t for t in ts if not created.intersection(t))
                for p, ts in self.relations.items()}
        return Structure(self.domain - created, rels, dict(self.constants), self.int_range)

    def __str__(self):
        return "{" + ", ".join(str(a) for a in sorted(self.atoms(), key=atom_key)) + "}"


TRUE3, FALSE3, UNKNOWN = True, False, None


@dataclass
class PartialStructure:
    """Three-valued interpretation of the endogenous atoms over a fixed
    two-valued structure for everything else.

    An endogenous atom is true if in ``true``, unknown if in ``unknown``,
    false otherwise.
    """
    base: Structure
    endogenous: frozenset
    true: frozenset = frozenset()
    unknown: frozenset = frozenset()

    @property
    def domain(self):
        return self.base.domain

    @property
    def int_range(self):
        return self.base.int_range

    @property
    def constants(self):
        return self.base.constants

    def value(self, pred, args):
        if pred not in self.endogenous:
            return self.base.holds(pred, args)
        a = DomainAtom(pred, tuple(args))
        if a in self.true:
            return TRUE3
        if a in self.unknown:
            return UNKNOWN
        return FALSE3

    @property
    def total(self) -> bool:
        return not self.unknown

    def to_structure(self) -> Structure:
        if self.unknown:
            raise StructureError("partial structure has unknown atoms")
        return self.base.drop(self.endogenous).with_atoms(self.true)

    @classmethod
    def from_structure(cls, s: Structure, endogenous) -> "PartialStructure":
        endogenous = frozenset(endogenous)
        return cls(s.drop(endogenous), endogenous, s.atoms(endogenous & set(s.relations)))

    def meet(self, other: "PartialStructure") -> "PartialStructure":
        """Greatest lower bound in the precision order."""
        true = self.true & other.true
        unknown = (self.true | self.unknown | other.true | other.unknown) - true
        return PartialStructure(self.base, self.endogenous, true, frozenset(unknown))

    def leq(self, other: "PartialStructure") -> bool:
        """``self`` is at most as precise as ``other``."""
        return (self.true <= other.true
                and other.true | other.unknown <= self.true | self.unknown
                and other.unknown <= self.unknown)


# ------------------------------------------------------------------ JSON I/O

def _parse_element(x, named, lo_hi, created_names):
    if isinstance(x, bool):
        raise StructureError(f"boolean {x!r} is not a domain element")
    if isinstance(x, int):
        if lo_hi is None or not lo_hi[0] <= x <= lo_hi[1]:
            raise StructureError(f"element {x} outside declared domain")
        return x
    if isinstance(x, str):
        if x in created_names:
            return created_names[x]
        if x in named:
            return x
        raise StructureError(f"element {x!r} outside declared domain")
    raise StructureError(f"cannot read domain element {x!r}")


def load_structure(source, voc, endogenous=frozenset(), model=False) -> Structure:
    """Read a structure from JSON text (or an already-decoded dict).

    Without ``model`` the input may only mention exogenous symbols; with
    ``model`` it may interpret everything and may list ``created`` elements.
    """
    data = json.loads(source) if isinstance(source, (str, bytes)) else dict(source)
    if not isinstance(data, dict):
        raise StructureError("structure file must hold a JSON object")
    named = data.pop("domain", [])
    if not isinstance(named, list) or not all(isinstance(n, str) for n in named):
        raise StructureError("'domain' must be a list of names")
    lo_hi = data.pop("int", None)
    if lo_hi is None:
        lo_hi = voc.int_range
    elif (not isinstance(lo_hi, list) or len(lo_hi) != 2
          or not all(isinstance(v, int) for v in lo_hi) or lo_hi[0] > lo_hi[1]):
        raise StructureError("'int' must be [lo, hi] with lo <= hi")
    lo_hi = tuple(lo_hi) if lo_hi is not None else None
    created_names = {}
    for name in data.pop("created", []):
        if not model:
            raise StructureError("'created' is only allowed in model files")
        if not (isinstance(name, str) and name.startswith("_p") and name[2:].isdigit()):
            raise StructureError(f"bad created element name {name!r}")
        created_names[name] = Created(int(name[2:]))
    named_set = set(named)
    constants = {}
    for c in voc.constants:
        value = data.pop(c, c)
        if not isinstance(value, str):
            raise StructureError(f"constant {c} must denote a name")
        named_set.add(value)
        constants[c] = value
    relations = {}
    for key, value in data.items():
        if key not in voc.predicates:
            raise StructureError(f"unknown symbol {key!r}")
        if key in endogenous and not model:
            raise StructureError(f"endogenous symbol {key!r} given a value")
        arity = voc.predicates[key]
        if isinstance(value, bool):
            if arity != 0:
                raise StructureError(f"{key} has arity {arity}; a list of tuples is required")
            relations[key] = frozenset({()}) if value else frozenset()
            continue
        if not isinstance(value, list):
            raise StructureError(f"value of {key} must be a list of tuples")
        tuples = set()
        for row in value:
            if not isinstance(row, list) or len(row) != arity:
                raise StructureError(f"tuple {row!r} of {key} does not have arity {arity}")
            tuples.add(tuple(_parse_element(x, named_set, lo_hi, created_names) for x in row))
        relations[key] = frozenset(tuples)
    for p in voc.predicates:
        if p in endogenous and not model:
            continue
        relations.setdefault(p, frozenset())
    domain = set(named_set) | set(created_names.values())
    if lo_hi is not None:
        domain |= set(range(lo_hi[0], lo_hi[1] + 1))
    return Structure(frozenset(domain), relations, constants, lo_hi)


def default_extension(exo: Structure, voc) -> Structure:
    """Interpret every predicate ``exo`` leaves open as the empty relation."""
    rels = dict(exo.relations)
    for p in voc.predicates:
        rels.setdefault(p, frozenset())
    return Structure(exo.domain, rels, dict(exo.constants), exo.int_range)


def _json_element(e):
    return e if isinstance(e, int) else str(e)


def structure_to_json(s: Structure, voc=None) -> dict:
    """Render ``s`` in the structure file schema.  Zero-arity predicates
    become booleans when ``voc`` tells their arity."""
    arities = voc.predicates if voc is not None else {}
    out = {"domain": s.named}
    if s.int_range is not None:
        out["int"] = list(s.int_range)
    out["created"] = [str(c) for c in s.created]
    for c, v in sorted(s.constants.items()):
        if v != c:
            out[c] = v
    for p in sorted(s.relations):
        ts = s.relations[p]
        if arities.get(p) == 0 or (ts and next(iter(ts)) == ()):
            out[p] = bool(ts)
        else:
            rows = sorted(ts, key=lambda t: tuple(element_key(e) for e in t))
            out[p] = [[_json_element(e) for e in t] for t in rows]
    return out


def dumps_structure(s: Structure, voc=None) -> str:
    return json.dumps(structure_to_json(s, voc), sort_keys=True)


# ------------------------------------------------- comparison modulo renaming

def _rename(e, mapping):
    return mapping.get(e, e)


def canonical_key(s: Structure, aux=frozenset()):
    """A key equal for two structures iff they coincide up to renaming of
    created elements (after dropping the ``aux`` predicates)."""
    created = s.created
    facts = [(p, t) for p, ts in s.relations.items() if p not in aux for t in ts]
    rels_present = tuple(sorted(p for p in s.relations if p not in aux))
    base = (tuple(sort_elements(e for e in s.domain if not isinstance(e, Created))),
            s.int_range, len(created), rels_present)
    if not created:
        return base + (tuple(sorted((p, tuple(map(element_key, t))) for p, t in facts)),)

    def signature(c):
        sig = []
        for p, t in facts:
            if c in t:
                sig.append((p, tuple((-1, 0, "") if e == c else (-1, 1, "") if isinstance(e, Created)
                                     else element_key(e) for e in t)))
        return tuple(sorted(sig))

    groups = {}
    for c in created:
        groups.setdefault(signature(c), []).append(c)
    ordered = [groups[k] for k in sorted(groups)]
    best = None
    for perm in itertools.product(*(itertools.permutations(g) for g in ordered)):
        flat = [c for g in perm for c in g]
        mapping = {c: Created(i + 1, "") for i, c in enumerate(flat)}
        key = tuple(sorted((p, tuple(element_key(_rename(e, mapping)) for e in t))
                           for p, t in facts))
        if best is None or key < best:
            best = key
    return base + (best,)


def equal_modulo_created(m1: Structure, m2: Structure, aux=frozenset()) -> bool:
    """True iff, ignoring ``aux`` predicates, some bijection between the
    created elements of ``m1`` and ``m2`` makes the two structures equal."""
    return canonical_key(m1, aux) == canonical_key(m2, aux)
