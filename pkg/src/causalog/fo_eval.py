"""Evaluation of terms and first-order formulas.

``eval2`` is classical evaluation in a total :class:`Structure`; ``eval3``
is strong Kleene evaluation in a :class:`PartialStructure`, with ``None``
standing for *unknown*.  Arithmetic leaving the declared integer range
yields an undefined term, and an atom with an undefined argument is false.
"""
from __future__ import annotations

import itertools

from .syntax import (
    And, Atom, Const, Exists, Forall, Implies, Not, Num, Or, Plus, RExists,
    RForall, Truth, Var,
)

UNDEFINED = None


def eval_term(t, s, env):
    """Denotation of ``t``, or ``UNDEFINED`` when arithmetic overflows."""
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, Const):
        return s.constants.get(t.name, t.name)
    if isinstance(t, Num):
        return t.value if _in_range(t.value, s.int_range) else UNDEFINED
    if isinstance(t, Plus):
        a, b = eval_term(t.left, s, env), eval_term(t.right, s, env)
        if not _is_int(a) or not _is_int(b):
            return UNDEFINED
        total = a + b
        return total if _in_range(total, s.int_range) else UNDEFINED
    raise TypeError(f"not a term: {t!r}")


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def _in_range(v, rng):
    return rng is not None and rng[0] <= v <= rng[1]


def compare(op, a, b) -> bool:
    """Built-in comparison; ordering tests are false on non-integers."""
    if a is UNDEFINED or b is UNDEFINED:
        return False
    if op == "=":
        return a == b and type(a) is type(b)
    if op == "~=":
        return not (a == b and type(a) is type(b))
    if not (_is_int(a) and _is_int(b)):
        return False
    if op == "<":
        return a < b
    if op == ">":
        return a > b
    if op == "=<":
        return a <= b
    if op == ">=":
        return a >= b
    raise ValueError(f"unknown comparison {op!r}")


def _bind(env, names, values):
    out = dict(env)
    out.update(zip(names, values))
    return out


def _tuples(domain, n):
    if n == 1:
        return ((d,) for d in domain)
    return itertools.product(domain, repeat=n)


def eval2(phi, s, env=None) -> bool:
    """Classical truth of ``phi`` in the total structure ``s``."""
    env = env or {}
    if isinstance(phi, Atom):
        args = tuple(eval_term(t, s, env) for t in phi.args)
        if phi.builtin:
            return compare(phi.pred, *args)
        if UNDEFINED in args:
            return False
        return s.holds(phi.pred, args)
    if isinstance(phi, Truth):
        return phi.value
    if isinstance(phi, Not):
        return not eval2(phi.arg, s, env)
    if isinstance(phi, And):
        return eval2(phi.left, s, env) and eval2(phi.right, s, env)
    if isinstance(phi, Or):
        return eval2(phi.left, s, env) or eval2(phi.right, s, env)
    if isinstance(phi, Implies):
        return (not eval2(phi.left, s, env)) or eval2(phi.right, s, env)
    if isinstance(phi, Forall):
        return all(eval2(phi.body, s, _bind(env, phi.vars, v))
                   for v in _tuples(s.domain, len(phi.vars)))
    if isinstance(phi, Exists):
        return any(eval2(phi.body, s, _bind(env, phi.vars, v))
                   for v in _tuples(s.domain, len(phi.vars)))
    if isinstance(phi, RForall):
        for v in _tuples(s.domain, len(phi.vars)):
            e = _bind(env, phi.vars, v)
            if eval2(phi.qual, s, e) and not eval2(phi.body, s, e):
                return False
        return True
    if isinstance(phi, RExists):
        for v in _tuples(s.domain, len(phi.vars)):
            e = _bind(env, phi.vars, v)
            if eval2(phi.qual, s, e) and eval2(phi.body, s, e):
                return True
        return False
    raise TypeError(f"not a formula: {phi!r}")


# --------------------------------------------------------- Kleene logic

def k_not(a):
    return None if a is None else not a


def k_and(a, b):
    if a is False or b is False:
        return False
    if a is None or b is None:
        return None
    return True


def k_or(a, b):
    if a is True or b is True:
        return True
    if a is None or b is None:
        return None
    return False


def _k_all(values):
    out = True
    for v in values:
        if v is False:
            return False
        if v is None:
            out = None
    return out


def _k_any(values):
    out = False
    for v in values:
        if v is True:
            return True
        if v is None:
            out = None
    return out


def eval3(phi, s, env=None):
    """Strong Kleene value of ``phi`` in the partial structure ``s``:
    ``True``, ``False`` or ``None`` (unknown)."""
    env = env or {}
    if isinstance(phi, Atom):
        args = tuple(eval_term(t, s, env) for t in phi.args)
        if phi.builtin:
            return compare(phi.pred, *args)
        if UNDEFINED in args:
            return False
        return s.value(phi.pred, args)
    if isinstance(phi, Truth):
        return phi.value
    if isinstance(phi, Not):
        return k_not(eval3(phi.arg, s, env))
    if isinstance(phi, And):
        left = eval3(phi.left, s, env)
        return False if left is False else k_and(left, eval3(phi.right, s, env))
    if isinstance(phi, Or):
        left = eval3(phi.left, s, env)
        return True if left is True else k_or(left, eval3(phi.right, s, env))
    if isinstance(phi, Implies):
        left = k_not(eval3(phi.left, s, env))
        return True if left is True else k_or(left, eval3(phi.right, s, env))
    if isinstance(phi, Forall):
        return _k_all(eval3(phi.body, s, _bind(env, phi.vars, v))
                      for v in _tuples(s.domain, len(phi.vars)))
    if isinstance(phi, Exists):
        return _k_any(eval3(phi.body, s, _bind(env, phi.vars, v))
                      for v in _tuples(s.domain, len(phi.vars)))
    if isinstance(phi, RForall):
        return _k_all(k_or(k_not(eval3(phi.qual, s, e)), eval3(phi.body, s, e))
                      for e in (_bind(env, phi.vars, v)
                                for v in _tuples(s.domain, len(phi.vars))))
    if isinstance(phi, RExists):
        return _k_any(k_and(eval3(phi.qual, s, e), eval3(phi.body, s, e))
                      for e in (_bind(env, phi.vars, v)
                                for v in _tuples(s.domain, len(phi.vars))))
    raise TypeError(f"not a formula: {phi!r}")
