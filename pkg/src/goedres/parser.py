"""Text grammar for terms, atoms, order literals/clauses and formulas.

Variables are identifiers built from the stems x, y, z, u, v, w, tau
(optionally followed by digits, underscores or primes).  Truth constants
are written c(m/n), with 0 and 1 as aliases for c(0) and c(1).  Order
literals use '=' and '<'; clauses join literals with '|' and the empty
clause is '[]'.  Quantified atoms are written 'forall x. p(...)' /
'exists x. p(...)'.  Formula files additionally use ~, delta, &, |, ->,
<-> and quantifiers.

Generated symbols carry the '$' prefix and are rejected in user formula
input but accepted in clause files (which are translator output).
"""

from __future__ import annotations

import re
from fractions import Fraction

from .syntax import (
    App,
    Atom,
    Bin,
    Delta,
    EMPTY_CLAUSE,
    Neg,
    OrderClause,
    OrderLit,
    QAtom,
    Quant,
    Signature,
    SyntaxError_,
    TruthConst,
    Var,
)

_VAR_RE = re.compile(r"^(x|y|z|u|v|w|tau)[0-9_']*$")
_TOKEN_RE = re.compile(
    r"""
    \s*(
        -frac
      | <->| ->| [()\[\]{},./|&~=<]
      | \$[A-Za-z][A-Za-z0-9_']*
      | [A-Za-z][A-Za-z0-9_']*
      | [0-9]+
    )
    """,
    re.VERBOSE,
)

KEYWORDS = {"forall", "exists", "delta", "c"}


def is_variable_name(name: str) -> bool:
    return bool(_VAR_RE.match(name))


class ParseError(ValueError):
    def __init__(self, msg, line=None):
        self.line = line
        super().__init__(msg if line is None else "line %d: %s" % (line, msg))


def tokenize(text: str) -> list:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ParseError("bad character %r" % text[pos:].strip()[0])
            break
        out.append(m.group(1))
        pos = m.end()
    return out


class _P:
    def __init__(self, tokens, allow_reserved=True):
        self.toks = tokens
        self.i = 0
        self.allow_reserved = allow_reserved

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self):
        t = self.peek()
        if t is None:
            raise ParseError("unexpected end of input")
        self.i += 1
        return t

    def expect(self, tok):
        t = self.next()
        if t != tok:
            raise ParseError("expected %r, got %r" % (tok, t))
        return t

    def at_end(self):
        return self.i >= len(self.toks)

    # -- names ------------------------------------------------------------

    def _symbol(self, what):
        t = self.next()
        if t.startswith("$"):
            if not self.allow_reserved:
                raise ParseError("reserved symbol %r not allowed here" % t)
            return t
        if t == "-frac" or (t and t[0].isalpha()):
            if t in KEYWORDS:
                raise ParseError("keyword %r cannot name a %s" % (t, what))
            return t
        raise ParseError("expected %s name, got %r" % (what, t))

    # -- terms ------------------------------------------------------------

    def term(self):
        t = self.peek()
        if t == "c":
            raise ParseError("truth constants are not terms")
        name = self._symbol("function")
        if self.peek() == "(":
            self.next()
            args = [self.term()]
            while self.peek() == ",":
                self.next()
                args.append(self.term())
            self.expect(")")
            return App(name, tuple(args))
        if is_variable_name(name):
            return Var(name)
        return App(name, ())

    # -- elements and literals ---------------------------------------------

    def truth_constant(self):
        t = self.next()
        if t == "0":
            return TruthConst(Fraction(0))
        if t == "1":
            return TruthConst(Fraction(1))
        assert t == "c"
        self.expect("(")
        num = int(self.next())
        den = 1
        if self.peek() == "/":
            self.next()
            den = int(self.next())
        self.expect(")")
        return TruthConst(Fraction(num, den))

    def atom(self):
        name = self._symbol("predicate")
        if is_variable_name(name) and self.peek() != "(":
            raise ParseError("a bare variable %r is not an atom" % name)
        args = ()
        if self.peek() == "(":
            self.next()
            lst = [self.term()]
            while self.peek() == ",":
                self.next()
                lst.append(self.term())
            self.expect(")")
            args = tuple(lst)
        return Atom(name, args)

    def element(self):
        t = self.peek()
        if t in ("0", "1", "c"):
            return self.truth_constant()
        if t in ("forall", "exists"):
            quant = self.next()
            var = self.next()
            if not is_variable_name(var):
                raise ParseError("%r is not a variable" % var)
            self.expect(".")
            return QAtom(quant, var, self.atom())
        return self.atom()

    def literal(self):
        left = self.element()
        op = self.next()
        if op not in ("=", "<"):
            raise ParseError("expected '=' or '<', got %r" % op)
        right = self.element()
        return OrderLit(left, op, right)

    def clause(self):
        if self.peek() == "[":
            self.next()
            self.expect("]")
            return EMPTY_CLAUSE
        lits = [self.literal()]
        while self.peek() == "|":
            self.next()
            lits.append(self.literal())
        return OrderClause(frozenset(lits))

    # -- formulas -----------------------------------------------------------
    # decreasing precedence: quantifiers, ~, delta, =, <, &, |, ->, <->

    def formula(self):
        return self._iff()

    def _iff(self):
        f = self._imp()
        while self.peek() == "<->":
            self.next()
            f = Bin("<->", f, self._imp())
        return f

    def _imp(self):
        f = self._or()
        if self.peek() == "->":
            self.next()
            return Bin("->", f, self._imp())
        return f

    def _or(self):
        f = self._and()
        while self.peek() == "|":
            self.next()
            f = Bin("|", f, self._and())
        return f

    def _and(self):
        f = self._lt()
        while self.peek() == "&":
            self.next()
            f = Bin("&", f, self._lt())
        return f

    def _lt(self):
        f = self._eq()
        if self.peek() == "<":
            self.next()
            return Bin("<", f, self._eq())
        return f

    def _eq(self):
        f = self._unary()
        if self.peek() == "=":
            self.next()
            return Bin("=", f, self._unary())
        return f

    def _unary(self):
        t = self.peek()
        if t == "~":
            self.next()
            return Neg(self._unary())
        if t == "delta":
            self.next()
            return Delta(self._unary())
        if t in ("forall", "exists"):
            self.next()
            var = self.next()
            if not is_variable_name(var):
                raise ParseError("%r is not a variable" % var)
            self.expect(".")
            return Quant(t, var, self._unary())
        return self._primary()

    def _primary(self):
        t = self.peek()
        if t == "(":
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        if t in ("0", "1", "c"):
            return self.truth_constant()
        return self.atom()


def _parse(entry, text, allow_reserved=True):
    p = _P(tokenize(text), allow_reserved)
    result = getattr(p, entry)()
    if not p.at_end():
        raise ParseError("trailing input %r" % p.peek())
    return result


def parse_term(text):
    return _parse("term", text)


def parse_element(text):
    return _parse("element", text)


def parse_literal(text):
    return _parse("literal", text)


def parse_clause(text):
    return _parse("clause", text)


def parse_formula(text, allow_reserved=True):
    return _parse("formula", text, allow_reserved)


# ---------------------------------------------------------------------------
# Rendering (inverse of parsing; compact=True omits spaces so values can be
# embedded into key=value trace fields)


def render_term(t, compact=False):
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return t.func
    sep = "," if compact else ", "
    return "%s(%s)" % (t.func, sep.join(render_term(a, compact) for a in t.args))


def render_element(e, compact=False):
    if isinstance(e, TruthConst):
        return repr(e)
    if isinstance(e, Atom):
        if not e.args:
            return e.pred
        sep = "," if compact else ", "
        return "%s(%s)" % (e.pred, sep.join(render_term(t, compact) for t in e.args))
    sep = "." if compact else ". "
    return "%s %s%s%s" % (e.quant, e.var, sep, render_element(e.body, compact))


def render_literal(l, compact=False):
    fmt = "%s%s%s" if compact else "%s %s %s"
    return fmt % (render_element(l.left, compact), l.op, render_element(l.right, compact))


def render_clause(c, compact=False):
    if c.is_empty:
        return "[]"
    sep = "|" if compact else " | "
    return sep.join(render_literal(l, compact) for l in c.lits)


def render_formula(f):
    if isinstance(f, (Atom, TruthConst)):
        return render_element(f)
    if isinstance(f, Neg):
        return "~(%s)" % render_formula(f.sub)
    if isinstance(f, Delta):
        return "delta (%s)" % render_formula(f.sub)
    if isinstance(f, Bin):
        return "(%s %s %s)" % (render_formula(f.left), f.op, render_formula(f.right))
    return "%s %s. (%s)" % (f.quant, f.var, render_formula(f.sub))


# ---------------------------------------------------------------------------
# Files

_ID_RE = re.compile(r"^\[([^\]]+)\]\s*(.*)$")


def iter_content_lines(text):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def parse_clause_file(text):
    """Parse a clause file into an ordered {id: clause} dict.

    Each line holds one clause, optionally prefixed with an [id] label;
    unlabeled clauses get consecutive numeric ids.
    """
    out = {}
    counter = 0
    for lineno, line in iter_content_lines(text):
        m = _ID_RE.match(line)
        if m:
            cid, body = m.group(1).strip(), m.group(2)
        else:
            counter += 1
            while str(counter) in out:
                counter += 1
            cid, body = str(counter), line
        if cid in out:
            raise ParseError("duplicate clause id %r" % cid, lineno)
        try:
            out[cid] = parse_clause(body)
        except (ParseError, SyntaxError_) as exc:
            raise ParseError(str(exc), lineno) from exc
    return out


def parse_formula_file(text, allow_reserved=True):
    """Parse a theory file: one formula per line."""
    out = []
    for lineno, line in iter_content_lines(text):
        try:
            out.append(parse_formula(line, allow_reserved))
        except (ParseError, SyntaxError_) as exc:
            raise ParseError(str(exc), lineno) from exc
    return out


# The namespaces managed by the translator and the prover; user input may
# never introduce symbols from them.  Numeral constructors and the domain
# predicates are usable in input theories but have fixed arities.
_FRESH_PREFIXES = ("$p_", "$w_", "$f0")
_FIXED_ARITIES = {
    "$z": (0, "function"),
    "$s": (1, "function"),
    "frac": (2, "function"),
    "-frac": (2, "function"),
    "nat": (1, "predicate"),
    "rat": (1, "predicate"),
    "time": (1, "predicate"),
    "uni": (1, "predicate"),
}


def _check_symbol(name, arity, kind):
    if any(name.startswith(p) for p in _FRESH_PREFIXES):
        raise SyntaxError_("symbol %r is reserved for generated clauses" % name)
    fixed = _FIXED_ARITIES.get(name)
    if fixed and (arity, kind) != fixed:
        raise SyntaxError_(
            "%r is the reserved %d-ary %s symbol" % (name, fixed[0], fixed[1])
        )


def check_user_formula(phi, signature=None):
    """Reject prover-managed namespaces in a user formula and register its
    symbols in a signature."""
    sig = signature or Signature()

    def walk_term(t):
        if isinstance(t, App):
            _check_symbol(t.func, len(t.args), "function")
            sig.add_function(t.func, len(t.args), reserved=True)
            for a in t.args:
                walk_term(a)

    def walk(f):
        if isinstance(f, Atom):
            _check_symbol(f.pred, len(f.args), "predicate")
            sig.add_predicate(f.pred, len(f.args), reserved=True)
            for t in f.args:
                walk_term(t)
        elif isinstance(f, TruthConst):
            sig.add_truth_constant(f.value)
        elif isinstance(f, (Neg, Delta)):
            walk(f.sub)
        elif isinstance(f, Bin):
            walk(f.left)
            walk(f.right)
        elif isinstance(f, Quant):
            walk(f.sub)
    walk(phi)
    return sig
