"""Causal processes: forward simulation of a theory from its default state.

Each step computes the caused set of the whole theory in the current state
and applies it at once.  Choice points are resolved by a *chooser* the
first time they fire and keep that resolution for the rest of the process.
The process stops at the first step that changes nothing.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Optional

from .grounder import (
    BudgetError, CreationBudgetExceeded, Grounder, GTAnd, GTAtom, GTIf, GTOr,
    GTSelect, allocate_fresh, gval,
)
from .structures import (
    Structure, atom_key, canonical_key, default_extension, dumps_structure,
    structure_to_json,
)
from .syntax import Theory
from .wf_engine import Budget, enumerate_models


class MaxStepsExceeded(RuntimeError):
    pass


class BranchLimitExceeded(BudgetError):
    pass


@dataclass(frozen=True)
class CausedSet:
    atoms: frozenset = frozenset()
    creations: tuple = ()        # ((ChoicePoint, element), ...)


@dataclass
class Trace:
    states: list
    caused: list                 # CausedSet per step
    commitments: list            # {ChoicePoint: resolution} made at each step
    seed: object = None

    @property
    def final(self) -> Structure:
        return self.states[-1]

    @property
    def growth_steps(self) -> int:
        """Number of steps that changed the state."""
        return sum(1 for a, b in zip(self.states, self.states[1:]) if a != b)

    def introduced(self) -> frozenset:
        return frozenset().union(*(c.atoms for c in self.caused)) if self.caused else frozenset()


class SeededChooser:
    """Pick uniformly at random, reproducibly per (seed, choice point)."""

    def __init__(self, seed):
        self.seed = seed

    def __call__(self, cp, candidates):
        rng = random.Random(f"{self.seed}|{cp}")
        return candidates[rng.randrange(len(candidates))]


class ScriptedChooser:
    """Follow a list of option indices, then always take the first option.

    Records every decision so that a caller can backtrack over them.
    """

    def __init__(self, script=()):
        self.script = list(script)
        self.arity = []
        self.decisions = []

    def __call__(self, cp, candidates):
        i = len(self.arity)
        k = self.script[i] if i < len(self.script) else 0
        self.arity.append(len(candidates))
        self.decisions.append((cp, candidates[k]))
        return candidates[k]


def caused_set(gt, true_atoms, committed: dict, chooser, grounder: Grounder,
               counter: int = 0, max_new: int = 8):
    """Caused set of a ground tree in a state, given either as a
    :class:`Structure` or as its set of true atoms.

    Returns ``(CausedSet, new_commitments)``.  Choice points already in
    ``committed`` reuse their resolution; a ``SELECT`` without satisfiers
    causes nothing and stays open.
    """
    if isinstance(true_atoms, Structure):
        true_atoms = true_atoms.atoms()
    atoms, creations, new = set(), [], {}

    def resolution(cp):
        if cp in committed:
            return committed[cp]
        return new.get(cp, _OPEN)

    def go(node):
        if isinstance(node, GTAtom):
            atoms.add(node.atom)
        elif isinstance(node, GTIf):
            if gval(node.cond, true_atoms) is True:
                go(node.body)
        elif isinstance(node, GTAnd):
            for child in node.children:
                go(child)
        elif isinstance(node, GTOr):
            res = resolution(node.cp)
            if res is _OPEN:
                res = new[node.cp] = chooser(node.cp, ["left", "right"])
            go(node.left if res == "left" else node.right)
        elif isinstance(node, GTSelect):
            res = resolution(node.cp)
            if res is _OPEN:
                sat = [o.value for o in node.options if gval(o.qual, true_atoms) is True]
                if not sat:
                    return
                res = new[node.cp] = chooser(node.cp, sat)
            opt = node.option(res)
            if opt is not None:
                go(opt.body)
        else:
            res = resolution(node.cp)
            if res is _OPEN:
                res = new[node.cp] = allocate_fresh(node.cp, counter + len(creations), max_new)
                creations.append((node.cp, res))
            go(grounder.new_body(node, res))

    go(gt)
    return CausedSet(frozenset(atoms), tuple(creations)), new


_OPEN = object()


def simulate(t: Theory, exo: Structure, seed=0, max_steps: int = 1000,
             budget: Optional[Budget] = None, chooser=None) -> Trace:
    """Run one causal process of ``t`` from the default state."""
    budget = budget or Budget()
    chooser = chooser or SeededChooser(seed)
    endo = t.endogenous
    exo = exo.drop(endo)
    state = default_extension(exo, t.vocabulary)
    states, caused, commits = [state], [], []
    committed = {}
    grounders = {}
    counter = 0
    for _ in range(max_steps):
        g = grounders.get(state.domain)
        if g is None:
            g = grounders[state.domain] = Grounder(t.cees, state.domain, exo, endo)
        true_atoms = state.atoms(endo)
        cs, new = caused_set(g.tree(), true_atoms, committed, chooser, g, counter,
                             budget.max_new)
        committed.update(new)
        counter += len(cs.creations)
        created = [e for _, e in cs.creations]
        if len(state.domain) + len(created) > budget.max_elements:
            raise CreationBudgetExceeded(
                f"domain would exceed max_elements={budget.max_elements}")
        nxt = state.with_atoms(cs.atoms, created)
        states.append(nxt)
        caused.append(cs)
        commits.append(new)
        if nxt == state:
            return Trace(states, caused, commits, seed)
        state = nxt
    raise MaxStepsExceeded(f"process did not stabilise within {max_steps} steps")


@dataclass
class ProcessTree:
    """Final states of all processes plus the decision paths leading there."""
    finals: list = field(default_factory=list)
    paths: list = field(default_factory=list)     # [(decisions, final)]

    def __len__(self):
        return len(self.finals)

    def __iter__(self):
        return iter(self.finals)


def enumerate_processes(t: Theory, exo: Structure, budget: Optional[Budget] = None,
                        max_steps: int = 1000, max_branches: int = 10 ** 5) -> ProcessTree:
    """Final states of every causal process, exploring each chooser decision."""
    budget = budget or Budget()
    found = {}
    paths = []
    stack = [[]]
    runs = 0
    while stack:
        script = stack.pop()
        runs += 1
        if runs > max_branches:
            raise BranchLimitExceeded(f"more than {max_branches} process branches")
        ch = ScriptedChooser(script)
        trace = simulate(t, exo, max_steps=max_steps, budget=budget, chooser=ch)
        taken = [script[i] if i < len(script) else 0 for i in range(len(ch.arity))]
        for i in range(len(ch.arity) - 1, len(script) - 1, -1):
            for alt in range(ch.arity[i] - 1, 0, -1):
                stack.append(taken[:i] + [alt])
        final = trace.final
        found.setdefault(canonical_key(final), final)
        paths.append((ch.decisions, final))
    finals = sorted(found.values(), key=lambda m: dumps_structure(m, t.vocabulary))
    return ProcessTree(finals, paths)


@dataclass
class Comparison:
    agree: bool
    only_process: list
    only_wf: list

    def to_json(self, voc=None) -> dict:
        return {"agree": self.agree,
                "only_process": [structure_to_json(m, voc) for m in self.only_process],
                "only_wf": [structure_to_json(m, voc) for m in self.only_wf]}


def compare_with_wf(t: Theory, exo: Structure, budget: Optional[Budget] = None,
                    max_steps: int = 1000) -> Comparison:
    """Compare process final states with the well-founded models of the
    CEEs of ``t`` (FO sentences are ignored on both sides)."""
    bare = t.without_sentences()
    procs = enumerate_processes(bare, exo, budget, max_steps)
    models = enumerate_models(bare, exo, budget)
    pk = {canonical_key(m): m for m in procs.finals}
    wk = {canonical_key(m): m for m in models.models}
    only_p = [pk[k] for k in pk if k not in wk]
    only_w = [wk[k] for k in wk if k not in pk]
    order = lambda m: dumps_structure(m, t.vocabulary)
    return Comparison(not only_p and not only_w, sorted(only_p, key=order),
                      sorted(only_w, key=order))


# ----------------------------------------------------------------- rendering

def _state_text(s: Structure) -> str:
    return "{" + ", ".join(str(a) for a in sorted(s.atoms(), key=atom_key)) + "}"


def trace_to_text(trace: Trace) -> str:
    lines = [f"seed: {trace.seed}", _state_text(trace.states[0])]
    for cs, state in zip(trace.caused, trace.states[1:]):
        label = ", ".join(str(a) for a in sorted(cs.atoms, key=atom_key))
        if cs.creations:
            made = ", ".join(f"new {e}" for _, e in cs.creations)
            label = f"{made}; {label}" if label else made
        lines.append(f"  -[{label}]-> {_state_text(state)}")
    return "\n".join(lines) + "\n"


def trace_to_json(trace: Trace, voc=None) -> str:
    steps = []
    for cs, com in zip(trace.caused, trace.commitments):
        steps.append({
            "caused": sorted(str(a) for a in cs.atoms),
            "created": [str(e) for _, e in cs.creations],
            "commitments": [[str(cp), _res(v)] for cp, v in
                            sorted(com.items(), key=lambda kv: kv[0].sort_key())],
        })
    data = {"seed": trace.seed,
            "states": [structure_to_json(s, voc) for s in trace.states],
            "steps": steps}
    return json.dumps(data, sort_keys=True)


def _res(v):
    if isinstance(v, tuple):
        return [str(e) for e in v]
    return str(v)


def processes_to_dot(tree: ProcessTree) -> str:
    """Branching tree of decisions in DOT format; leaves show final states."""
    lines = ["digraph processes {", '  node [shape=box, fontname="monospace"];',
             '  n0 [label="start"];']
    ids = {(): "n0"}
    for decisions, final in tree.paths:
        prefix = ()
        for cp, choice in decisions:
            nxt = prefix + ((str(cp), _label(choice)),)
            if nxt not in ids:
                ids[nxt] = f"n{len(ids)}"
                lines.append(f'  {ids[nxt]} [label="{_label(choice)}"];')
                lines.append(f'  {ids[prefix]} -> {ids[nxt]} [label="{cp}"];')
            prefix = nxt
        leaf = f"{ids[prefix]}_final"
        if f"  {leaf} " not in "\n".join(lines):
            lines.append(f'  {leaf} [shape=ellipse, label="{_state_text(final)}"];')
            lines.append(f"  {ids[prefix]} -> {leaf};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _label(choice):
    if isinstance(choice, tuple):
        return ",".join(str(e) for e in choice)
    return str(choice)
