"""Random theory generators shared by the property tests.

Each generator returns the theory text, an exogenous structure as a JSON
dict and, where useful, a direct description of the same rules so that an
oracle can work without going through the package.
"""
import itertools
import json
import random

EXO = {"E": 1, "F": 2}
ENDO = {"P": 1, "Q": 1, "R": 2, "S": 0}
VARS = ("x", "y")


def _atom_text(pred, args):
    return pred if not args else f"{pred}({', '.join(args)})"


def random_exo(rng, n):
    names = [f"d{i}" for i in range(n)]
    e = [[a] for a in names if rng.random() < 0.5]
    f = [[a, b] for a in names for b in names if rng.random() < 0.3]
    return {"domain": names, "E": e, "F": f}


def _rand_atom(rng, preds, vars_):
    pred = rng.choice(sorted(preds))
    return pred, tuple(rng.choice(vars_) for _ in range(preds[pred]))


def random_deterministic(rng, max_rules=12, max_domain=5):
    """All/If/Atom theory; returns (text, exo_json, rules).

    ``rules`` are ``(head, body)`` with ``body`` a list of
    ``(negated, pred, args)`` over the variables ``x`` and ``y``.
    """
    n = rng.randint(1, max_domain)
    exo = random_exo(rng, n)
    rules = []
    for _ in range(rng.randint(1, max_rules)):
        head = _rand_atom(rng, ENDO, VARS)
        body = []
        for _ in range(rng.randint(0, 3)):
            pred, args = _rand_atom(rng, {**EXO, **ENDO}, VARS)
            body.append((rng.random() < 0.3, pred, args))
        rules.append((head, body))
    lines = []
    for head, body in rules:
        used = sorted({v for v in head[1]} | {v for _, _, a in body for v in a})
        cond = " & ".join(("~" if neg else "") + _atom_text(p, a) for neg, p, a in body)
        h = _atom_text(*head)
        if not used:
            lines.append(f"IF {cond} THEN {h}." if cond else f"{h}.")
        elif not cond:
            lines.append(f"ALL {', '.join(used)}: {h}.")
        elif rng.random() < 0.5:
            lines.append(f"ALL {', '.join(used)} WHERE {cond}: {h}.")
        else:
            lines.append(f"ALL {', '.join(used)}: IF {cond} THEN {h}.")
    text = _vocab() + "theory {\n  " + "\n  ".join(lines) + "\n}\n"
    return text, exo, rules


def _vocab(extra=""):
    preds = "".join(f"  pred {p}/{k};\n" for p, k in {**EXO, **ENDO}.items())
    return "vocab {\n" + preds + extra + "}\n"


def ground_program(rules, exo):
    """Ground the rules over the exogenous domain, folding exogenous literals."""
    names = exo["domain"]
    facts = {("E", tuple(r)) for r in exo["E"]} | {("F", tuple(r)) for r in exo["F"]}
    program = []
    for (hp, ha), body in rules:
        for values in itertools.product(names, repeat=len(VARS)):
            env = dict(zip(VARS, values))
            head = (hp, tuple(env[v] for v in ha))
            pos, neg, dead = [], [], False
            for negated, p, a in body:
                atom = (p, tuple(env[v] for v in a))
                if p in EXO:
                    if (atom in facts) == negated:
                        dead = True
                        break
                    continue
                (neg if negated else pos).append(atom)
            if not dead:
                program.append((head, tuple(pos), tuple(neg)))
    atoms = {(p, t) for p, k in ENDO.items() for t in itertools.product(names, repeat=k)}
    return program, atoms


def random_choice_theory(rng, max_domain=3, max_effects=4):
    """Negation-free theory whose SELECT qualifications are exogenous.

    Uses atoms, IF with positive conditions, ALL, COR and SELECT.
    """
    n = rng.randint(1, max_domain)
    exo = random_exo(rng, n)

    def qual(vs):
        v = rng.choice(vs)
        return rng.choice([f"E({v})", f"F({v}, {rng.choice(vs)})", f"~E({v})"])

    def cond(vs):
        pred, args = _rand_atom(rng, ENDO, vs) if vs else ("S", ())
        return _atom_text(pred, args)

    def eff(vs, depth):
        k = rng.random()
        if depth == 0 or k < 0.3:
            pred, args = _rand_atom(rng, {p: a for p, a in ENDO.items() if a == 0 or vs}, vs)
            return _atom_text(pred, args)
        if k < 0.45:
            return f"IF {cond(vs)} THEN {eff(vs, depth - 1)}"
        if k < 0.6:
            return f"({eff(vs, depth - 1)} COR {eff(vs, depth - 1)})"
        if k < 0.7:
            return f"({eff(vs, depth - 1)} CAND {eff(vs, depth - 1)})"
        v = "x" if "x" not in vs else "y" if "y" not in vs else None
        if v is None:
            return f"({eff(vs, depth - 1)} COR {eff(vs, depth - 1)})"
        inner = vs + (v,)
        kw = "ALL" if k < 0.85 else "SELECT"
        return f"{kw} {v} WHERE {qual(inner)}: ({eff(inner, depth - 1)})"

    def top():
        if rng.random() < 0.3:
            return eff((), 3)
        kw = "ALL" if rng.random() < 0.7 else "SELECT"
        return f"{kw} x WHERE {qual(('x',))}: ({eff(('x',), 2)})"

    lines = [top() + "." for _ in range(rng.randint(1, max_effects))]
    text = _vocab() + "theory {\n  " + "\n  ".join(lines) + "\n}\n"
    return text, exo


def dumps(exo):
    return json.dumps(exo)


def rng_for(i, salt=""):
    return random.Random(f"{salt}:{i}")
