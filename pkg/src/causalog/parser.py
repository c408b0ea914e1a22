"""Concrete syntax for FO(C) theory files (``.foc``).

Grammar (EBNF)::

    file      = vocab [ theory ] ;
    vocab     = "vocab" "{" { decl ";" } "}" ;
    decl      = "pred" NAME "/" INT
              | "const" NAME { "," NAME }
              | "int" INT ".." INT ;
    theory    = "theory" "{" { stmt "." } "}" ;
    stmt      = "CEE" ":" cee | "FO" ":" formula | cee | formula ;

    cee       = cee_unit { "CAND" cee_unit } | cee_unit { "COR" cee_unit } ;
    cee_unit  = "ALL" vars [ "WHERE" formula ] ":" cee
              | "SELECT" vars [ "WHERE" formula ] ":" cee
              | "NEW" NAME ":" cee
              | "IF" formula "THEN" cee
              | "(" cee ")"
              | atom ;

    formula   = quant | implication ;
    quant     = ("!" | "?") vars [ "WHERE" formula ] ":" formula ;
    implication = disj [ "=>" ( quant | implication ) ] ;
    disj      = conj { "|" conj } ;
    conj      = unary { "&" unary } ;
    unary     = "~" unary | quant | "(" formula ")" | "true" | "false"
              | atom | term CMP term ;
    atom      = PRED [ "(" term { "," term } ")" ] ;
    term      = primary { "+" primary } ;
    primary   = NAME | INT | "(" term ")" ;
    vars      = NAME { "," NAME } ;
    CMP       = "<" | ">" | "=<" | ">=" | "=" | "~=" ;

Mixing CAND and COR without parentheses is rejected.  A statement that
parses completely as a CEE is a CEE; otherwise it is an FO sentence.
Comments run from ``%`` or ``//`` to the end of the line.
"""
from __future__ import annotations

import re

from .syntax import (
    COMPARISONS, FALSE, TRUE, And, Atom, CAll, CAnd, CAtom, CIf, CNew, COr,
    Const, CSelect, Exists, Forall, Implies, Not, Num, Or, Plus, RExists,
    RForall, Theory, Truth, Var, Vocabulary,
)

KEYWORDS = {"ALL", "SELECT", "NEW", "IF", "THEN", "CAND", "COR", "WHERE",
            "true", "false"}

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>(%|//)[^\n]*)
  | (?P<int>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>\.\.|=>|=<|>=|~=|[{}();,:./&|~!?<>=+])
""", re.VERBOSE)


class ParseError(Exception):
    def __init__(self, message, line=None, col=None):
        self.line, self.col = line, col
        where = f"{line}:{col}: " if line is not None else ""
        super().__init__(where + message)


class _Tok:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind, self.text, self.line, self.col = kind, text, line, col

    def __repr__(self):
        return f"{self.text!r}@{self.line}:{self.col}"


def tokenize(source: str) -> list:
    toks, pos, line, line_start = [], 0, 1, 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if not m:
            raise ParseError(f"unexpected character {source[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, line_start = line + 1, m.end()
        elif kind not in ("ws", "comment"):
            toks.append(_Tok(kind, m.group(), line, m.start() - line_start + 1))
        pos = m.end()
    toks.append(_Tok("eof", "<eof>", line, pos - line_start + 1))
    return toks


class _Backtrack(Exception):
    pass


class _Parser:
    def __init__(self, source: str):
        self.toks = tokenize(source)
        self.i = 0
        self.preds: dict = {}
        self.consts: set = set()
        self.int_range = None

    # token helpers
    @property
    def tok(self):
        return self.toks[self.i]

    def peek(self, k=1):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text):
        return self.tok.text == text and self.tok.kind in ("op", "name")

    def error(self, message, tok=None):
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.col)

    def expect(self, text):
        if not self.at(text):
            raise self.error(f"expected {text!r}, found {self.tok.text!r}")
        tok = self.tok
        self.i += 1
        return tok

    def accept(self, text):
        if self.at(text):
            self.i += 1
            return True
        return False

    def name(self):
        tok = self.tok
        if tok.kind != "name" or tok.text in KEYWORDS:
            raise self.error(f"expected a name, found {tok.text!r}")
        self.i += 1
        return tok.text

    def integer(self):
        tok = self.tok
        if tok.kind != "int":
            raise self.error(f"expected an integer, found {tok.text!r}")
        self.i += 1
        return int(tok.text)

    # ------------------------------------------------------- file level
    def parse_file(self) -> Theory:
        self.parse_vocab()
        cees, sentences = [], []
        if self.accept("theory"):
            self.expect("{")
            while not self.at("}"):
                kind, node = self.statement()
                (cees if kind == "cee" else sentences).append(node)
                self.expect(".")
            self.expect("}")
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r} after theory")
        voc = Vocabulary(dict(self.preds), frozenset(self.consts), self.int_range)
        return Theory(voc, tuple(cees), tuple(sentences))

    def declare(self, name, tok):
        if name in self.preds or name in self.consts:
            raise self.error(f"redeclared symbol {name!r}", tok)
        if name in KEYWORDS or name in ("FO", "CEE"):
            raise self.error(f"reserved word {name!r} cannot be declared", tok)

    def parse_vocab(self):
        self.expect("vocab")
        self.expect("{")
        while not self.at("}"):
            tok = self.tok
            if self.accept("pred"):
                ntok = self.tok
                n = self.name()
                self.declare(n, ntok)
                self.expect("/")
                self.preds[n] = self.integer()
            elif self.accept("const"):
                while True:
                    ntok = self.tok
                    n = self.name()
                    self.declare(n, ntok)
                    self.consts.add(n)
                    if not self.accept(","):
                        break
            elif self.accept("int"):
                if self.int_range is not None:
                    raise self.error("integer range declared twice", tok)
                lo = self.integer()
                self.expect("..")
                hi = self.integer()
                if lo > hi:
                    raise self.error("empty integer range", tok)
                self.int_range = (lo, hi)
            else:
                raise self.error(f"expected a declaration, found {tok.text!r}")
            self.expect(";")
        self.expect("}")

    def statement(self):
        if self.tok.text in ("CEE", "FO") and self.peek().text == ":":
            kind = self.tok.text
            self.i += 2
            return ("cee", self.cee(set())) if kind == "CEE" else ("fo", self.formula(set()))
        if self.tok.text in ("ALL", "SELECT", "NEW", "IF"):
            return "cee", self.cee(set())
        start = self.i
        cee_error = None
        try:
            node = self.cee(set(), backtrack=True)
            if self.at("."):
                return "cee", node
        except _Backtrack:
            pass
        except ParseError as exc:
            cee_error = (self.i, exc)
        self.i = start
        try:
            return "fo", self.formula(set())
        except ParseError:
            # report whichever reading got further
            if cee_error is not None and cee_error[0] > self.i:
                raise cee_error[1] from None
            raise

    # ------------------------------------------------------------ CEEs
    def cee(self, scope, backtrack=False):
        first = self.cee_unit(scope, backtrack)
        op = None
        node = first
        while self.at("CAND") or self.at("COR"):
            this = self.tok.text
            if op is not None and this != op:
                raise self.error("CAND and COR mixed without parentheses")
            op = this
            self.i += 1
            right = self.cee_unit(scope, backtrack)
            node = CAnd(node, right) if op == "CAND" else COr(node, right)
        return node

    def vars(self):
        out = [self.name()]
        while self.accept(","):
            out.append(self.name())
        return tuple(out)

    def cee_unit(self, scope, backtrack=False):
        if self.at("ALL") or self.at("SELECT"):
            is_all = self.tok.text == "ALL"
            self.i += 1
            vs = self.vars()
            inner = scope | set(vs)
            qual = self.formula(inner) if self.accept("WHERE") else TRUE
            self.expect(":")
            body = self.cee(inner)
            return (CAll if is_all else CSelect)(vs, qual, body)
        if self.accept("NEW"):
            v = self.name()
            self.expect(":")
            return CNew(v, self.cee(scope | {v}))
        if self.accept("IF"):
            cond = self.formula(scope)
            self.expect("THEN")
            return CIf(cond, self.cee(scope))
        if self.accept("("):
            node = self.cee(scope, backtrack)
            self.expect(")")
            return node
        tok = self.tok
        if tok.kind == "name" and tok.text in self.preds:
            pred, args = self.atom_args(scope)
            return CAtom(pred, args)
        if backtrack:
            raise _Backtrack()
        raise self.error(f"expected a causal effect expression, found {tok.text!r}")

    # -------------------------------------------------------- formulas
    def formula(self, scope):
        if self.at("!") or self.at("?"):
            return self.quant(scope)
        left = self.disj(scope)
        if self.accept("=>"):
            return Implies(left, self.formula(scope))
        return left

    def quant(self, scope):
        universal = self.tok.text == "!"
        self.i += 1
        vs = self.vars()
        inner = scope | set(vs)
        if self.accept("WHERE"):
            qual = self.formula(inner)
            self.expect(":")
            body = self.formula(inner)
            return (RForall if universal else RExists)(vs, qual, body)
        self.expect(":")
        return (Forall if universal else Exists)(vs, self.formula(inner))

    def disj(self, scope):
        node = self.conj(scope)
        while self.accept("|"):
            node = Or(node, self.conj(scope))
        return node

    def conj(self, scope):
        node = self.unary(scope)
        while self.accept("&"):
            node = And(node, self.unary(scope))
        return node

    def unary(self, scope):
        if self.accept("~"):
            return Not(self.unary(scope))
        if self.at("!") or self.at("?"):
            return self.quant(scope)
        if self.at("("):
            self.i += 1
            node = self.formula(scope)
            self.expect(")")
            return node
        if self.accept("true"):
            return TRUE
        if self.accept("false"):
            return FALSE
        tok = self.tok
        if tok.kind == "name" and tok.text in self.preds:
            pred, args = self.atom_args(scope)
            return Atom(pred, args)
        left = self.term(scope)
        op = self.tok
        if op.text not in COMPARISONS:
            raise self.error(f"expected a comparison after term, found {op.text!r}")
        self.i += 1
        return Atom(op.text, (left, self.term(scope)))

    def atom_args(self, scope):
        tok = self.tok
        pred = tok.text
        self.i += 1
        args = []
        if self.accept("("):
            if not self.at(")"):
                args.append(self.term(scope))
                while self.accept(","):
                    args.append(self.term(scope))
            self.expect(")")
        if len(args) != self.preds[pred]:
            raise self.error(f"arity mismatch: {pred} has arity {self.preds[pred]}, "
                             f"used with {len(args)} argument(s)", tok)
        return pred, tuple(args)

    def term(self, scope):
        node = self.term_primary(scope)
        while self.accept("+"):
            node = Plus(node, self.term_primary(scope))
        return node

    def term_primary(self, scope):
        tok = self.tok
        if tok.kind == "int":
            self.i += 1
            return Num(int(tok.text))
        if self.accept("("):
            node = self.term(scope)
            self.expect(")")
            return node
        if tok.kind == "name" and tok.text not in KEYWORDS:
            self.i += 1
            if tok.text in scope:
                return Var(tok.text)
            if tok.text in self.consts:
                return Const(tok.text)
            if tok.text in self.preds:
                raise self.error(f"predicate {tok.text!r} used as a term", tok)
            raise self.error(f"unbound variable {tok.text!r}", tok)
        raise self.error(f"expected a term, found {tok.text!r}")


def parse_theory(source: str) -> Theory:
    """Parse the text of a ``.foc`` file into a :class:`Theory`."""
    return _Parser(source).parse_file()


# ----------------------------------------------------------------- printing

def print_term(t) -> str:
    if isinstance(t, (Var, Const)):
        return t.name
    if isinstance(t, Num):
        return str(t.value)
    right = print_term(t.right)
    if isinstance(t.right, Plus):
        right = f"({right})"
    return f"{print_term(t.left)} + {right}"


def _atom_text(pred, args):
    if pred in COMPARISONS:
        return f"{print_term(args[0])} {pred} {print_term(args[1])}"
    if not args:
        return pred
    return f"{pred}({', '.join(print_term(a) for a in args)})"


_PREC = {Implies: 1, Or: 2, And: 3}


def _prec(phi):
    if isinstance(phi, (Forall, Exists, RForall, RExists)):
        return 0
    return _PREC.get(type(phi), 4)


def print_formula(phi) -> str:
    if isinstance(phi, Atom):
        return _atom_text(phi.pred, phi.args)
    if isinstance(phi, Truth):
        return "true" if phi.value else "false"
    if isinstance(phi, Not):
        inner = print_formula(phi.arg)
        return "~" + (inner if _prec(phi.arg) == 4 and not
                      (isinstance(phi.arg, Atom) and phi.arg.builtin) else f"({inner})")
    if isinstance(phi, (Forall, Exists)):
        q = "!" if isinstance(phi, Forall) else "?"
        return f"{q} {', '.join(phi.vars)}: {print_formula(phi.body)}"
    if isinstance(phi, (RForall, RExists)):
        q = "!" if isinstance(phi, RForall) else "?"
        return (f"{q} {', '.join(phi.vars)} WHERE {_paren_quant(phi.qual)}: "
                f"{print_formula(phi.body)}")
    p = _prec(phi)
    sym = {And: "&", Or: "|", Implies: "=>"}[type(phi)]
    if isinstance(phi, Implies):
        left_ok = _prec(phi.left) > p
        right_ok = _prec(phi.right) >= p or _prec(phi.right) == 0
    else:
        left_ok = _prec(phi.left) >= p
        right_ok = _prec(phi.right) > p
    left = print_formula(phi.left) if left_ok else f"({print_formula(phi.left)})"
    right = print_formula(phi.right) if right_ok else f"({print_formula(phi.right)})"
    return f"{left} {sym} {right}"


def _paren_quant(phi):
    # a quantifier inside a qualification would swallow the ':'
    text = print_formula(phi)
    return f"({text})" if _prec(phi) == 0 else text


def print_cee(c) -> str:
    if isinstance(c, CAtom):
        return _atom_text(c.pred, c.args)
    if isinstance(c, (CAnd, COr)):
        op = "CAND" if isinstance(c, CAnd) else "COR"
        left = print_cee(c.left) if (type(c.left) is type(c) or isinstance(c.left, CAtom)) \
            else f"({print_cee(c.left)})"
        right = print_cee(c.right) if isinstance(c.right, CAtom) else f"({print_cee(c.right)})"
        return f"{left} {op} {right}"
    body = print_cee(c.body) if isinstance(c.body, CAtom) else f"({print_cee(c.body)})"
    if isinstance(c, CIf):
        return f"IF {print_formula(c.cond)} THEN {body}"
    if isinstance(c, CNew):
        return f"NEW {c.var}: {body}"
    kw = "ALL" if isinstance(c, CAll) else "SELECT"
    where = "" if c.qual == TRUE else f" WHERE {_paren_quant(c.qual)}"
    return f"{kw} {', '.join(c.vars)}{where}: {body}"


def print_theory(t: Theory) -> str:
    """Canonical concrete syntax of ``t``; re-parses to an equal theory."""
    voc = t.vocabulary
    lines = ["vocab {"]
    for name in sorted(voc.predicates):
        lines.append(f"  pred {name}/{voc.predicates[name]};")
    for name in sorted(voc.constants):
        lines.append(f"  const {name};")
    if voc.int_range is not None:
        lines.append(f"  int {voc.int_range[0]}..{voc.int_range[1]};")
    lines.append("}")
    lines.append("theory {")
    for c in t.cees:
        lines.append(f"  {print_cee(c)}.")
    for s in t.sentences:
        text = print_formula(s)
        if isinstance(s, Atom) and not s.builtin:
            text = "FO: " + text
        lines.append(f"  {text}.")
    lines.append("}")
    return "\n".join(lines) + "\n"
