"""Structure-preserving translation of theories and goal formulas into
order-clausal form.

Every axiom is seeded as {head = 1} and the goal as {head < 1}, where head
is a fresh '$p_<row>_<col>' predicate applied to the formula's variables
(sorted by name).  Definitions head <-> body are then interpolated by the
shape of the body's top connective, producing a fixed consequent clause set
plus residual definitions for the immediate subformulas.  Column indices
are allocated breadth-first over the definition tree; clauses are emitted
in depth-first preorder.

Negation and delta are rewritten first (~a as a -> 0, delta a as a = 1).
Axioms that already are order literals over atoms, truth constants or
quantified atoms are emitted directly as unit clauses without a fresh head.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .syntax import (
    Atom,
    Bin,
    Delta,
    Neg,
    OrderClause,
    OrderLit,
    QAtom,
    Quant,
    TruthConst,
    Var,
    clause_size,
    formula_size,
    formula_tcons,
    formula_vars,
    SyntaxError_,
)

BOT = TruthConst(Fraction(0))
TOP = TruthConst(Fraction(1))


def fresh_pred(row: int, col: int) -> str:
    return "$p_%d_%d" % (row, col)


def rewrite_neg_delta(phi):
    """Eliminate ~ and delta: ~a becomes a -> 0, delta a becomes a = 1."""
    if isinstance(phi, Neg):
        return Bin("->", rewrite_neg_delta(phi.sub), BOT)
    if isinstance(phi, Delta):
        return Bin("=", rewrite_neg_delta(phi.sub), TOP)
    if isinstance(phi, Bin):
        return Bin(phi.op, rewrite_neg_delta(phi.left), rewrite_neg_delta(phi.right))
    if isinstance(phi, Quant):
        return Quant(phi.quant, phi.var, rewrite_neg_delta(phi.sub))
    return phi


def _as_element(phi):
    """Formula to literal side, if it has that shape."""
    if isinstance(phi, (Atom, TruthConst)):
        return phi
    if isinstance(phi, Quant) and isinstance(phi.sub, Atom):
        try:
            return QAtom(phi.quant, phi.var, phi.sub)
        except SyntaxError_:
            return None
    return None


def literal_shaped(phi):
    """The order literal for an axiom that already is one, else None."""
    if isinstance(phi, Bin) and phi.op in ("=", "<"):
        left = _as_element(phi.left)
        right = _as_element(phi.right)
        if left is not None and right is not None:
            return OrderLit(left, phi.op, right)
    return None


@dataclass
class InterpolationStep:
    """Size accounting for one interpolation step (bound checks)."""

    rule: str
    context_len: int  # |x_bar|
    clause_sizes: int  # total size of the emitted clauses
    residual_sizes: int  # total size of the residual definitions
    exact: int  # the rule's exact consequent size
    bound: int  # 27*(1+|x_bar|) + residual sizes

    @property
    def within_bound(self) -> bool:
        return self.clause_sizes + self.residual_sizes <= self.bound


@dataclass
class TranslationResult:
    clauses: list  # ordered OrderClause list
    indices: list  # issued (row, col) pairs
    steps: list  # InterpolationStep records
    theory_sizes: dict  # {"T": .., "goal": .., "S": ..}

    @property
    def clause_set(self):
        return set(self.clauses)


class _Node:
    def __init__(self, index, head, body):
        self.index = index
        self.head = head
        self.body = body
        self.clauses = []
        self.children = []


# exact size formulas per rule, as functions of |x_bar| (checked against the
# actually emitted clauses)
_EXACT = {
    "and": lambda n: 15 + 10 * n,
    "or": lambda n: 15 + 10 * n,
    "implies": lambda n: 15 + 9 * n,
    "iff": lambda n: 27 + 17 * n,
    "eq": lambda n: 15 + 8 * n,
    "lt": lambda n: 15 + 8 * n,
    "implies_bot": lambda n: 12 + 4 * n,
    "eq_bot": lambda n: 12 + 4 * n,
    "eq_top": lambda n: 12 + 4 * n,
    "bot_lt": lambda n: 12 + 4 * n,
    "lt_top": lambda n: 12 + 4 * n,
    "forall": lambda n: 5 + 2 * n,
    "exists": lambda n: 5 + 2 * n,
}


class Translator:
    def __init__(self):
        self.indices = []
        self.steps = []

    # -- single definition ---------------------------------------------------

    def interpolate(self, node: _Node, alloc):
        """Emit the consequent clauses for one definition and return the
        residual definitions.  `alloc` hands out fresh heads in the node's
        row."""
        head, theta = node.head, node.body
        xbar = head.args
        n = len(xbar)

        def lit(a, op, b):
            return OrderLit(a, op, b)

        def cl(*lits):
            return OrderClause(frozenset(lits))

        def emit(rule, clauses, residuals):
            node.clauses.extend(clauses)
            csize = sum(clause_size(c) for c in clauses)
            rsize = sum(
                formula_size(Bin("<->", h, b)) for h, b in residuals
            )
            exact = _EXACT[rule](n)
            if csize != exact:
                raise AssertionError(
                    "rule %s emitted size %d, expected %d" % (rule, csize, exact)
                )
            self.steps.append(
                InterpolationStep(
                    rule, n, csize, rsize, exact + rsize, 27 * (1 + n) + rsize
                )
            )
            return residuals

        # terminal: atom or truth constant
        elem = theta if isinstance(theta, (Atom, TruthConst)) else None
        if elem is not None:
            node.clauses.append(cl(lit(head, "=", elem)))
            return []

        if isinstance(theta, Quant):
            sub = alloc()
            q = QAtom(theta.quant, theta.var, sub)
            node.clauses.append(cl(lit(head, "=", q)))
            rule = "forall" if theta.quant == "forall" else "exists"
            csize = clause_size(node.clauses[-1])
            exact = _EXACT[rule](n)
            if csize != exact:
                raise AssertionError("quantifier rule size %d != %d" % (csize, exact))
            rsize = formula_size(Bin("<->", sub, theta.sub))
            self.steps.append(
                InterpolationStep(rule, n, csize, rsize, exact + rsize,
                                  27 * (1 + n) + rsize)
            )
            return [(sub, theta.sub)]

        if not isinstance(theta, Bin):
            raise SyntaxError_("cannot interpolate %r" % (theta,))

        op, t1, t2 = theta.op, theta.left, theta.right

        # degenerate comparisons fold to a constant
        if op in ("=", "<"):
            if isinstance(t1, TruthConst) and isinstance(t2, TruthConst):
                value = (
                    TOP
                    if (t1.value == t2.value if op == "=" else t1.value < t2.value)
                    else BOT
                )
                node.clauses.append(cl(lit(head, "=", value)))
                return []
            if op == "=" and isinstance(t1, TruthConst) and t1 in (BOT, TOP):
                t1, t2 = t2, t1  # constant to the right
            if op == "<" and t2 == BOT:
                node.clauses.append(cl(lit(head, "=", BOT)))
                return []
            if op == "<" and t1 == TOP:
                node.clauses.append(cl(lit(head, "=", BOT)))
                return []

        if op == "->" and t2 == BOT:
            p1 = alloc()
            clauses = [
                cl(lit(p1, "=", BOT), lit(head, "=", BOT)),
                cl(lit(BOT, "<", p1), lit(head, "=", TOP)),
            ]
            return emit("implies_bot", clauses, [(p1, t1)])

        if op == "=" and t2 == BOT:
            p1 = alloc()
            clauses = [
                cl(lit(p1, "=", BOT), lit(head, "=", BOT)),
                cl(lit(BOT, "<", p1), lit(head, "=", TOP)),
            ]
            return emit("eq_bot", clauses, [(p1, t1)])

        if op == "=" and t2 == TOP:
            p1 = alloc()
            clauses = [
                cl(lit(p1, "=", TOP), lit(head, "=", BOT)),
                cl(lit(p1, "<", TOP), lit(head, "=", TOP)),
            ]
            return emit("eq_top", clauses, [(p1, t1)])

        if op == "<" and t1 == BOT:
            p1 = alloc()
            clauses = [
                cl(lit(BOT, "<", p1), lit(head, "=", BOT)),
                cl(lit(p1, "=", BOT), lit(head, "=", TOP)),
            ]
            return emit("bot_lt", clauses, [(p1, t2)])

        if op == "<" and t2 == TOP:
            p1 = alloc()
            clauses = [
                cl(lit(p1, "<", TOP), lit(head, "=", BOT)),
                cl(lit(p1, "=", TOP), lit(head, "=", TOP)),
            ]
            return emit("lt_top", clauses, [(p1, t1)])

        p1 = alloc()
        p2 = alloc()
        if op == "&":
            clauses = [
                cl(lit(p1, "<", p2), lit(p1, "=", p2), lit(head, "=", p2)),
                cl(lit(p2, "<", p1), lit(head, "=", p1)),
            ]
            return emit("and", clauses, [(p1, t1), (p2, t2)])
        if op == "|":
            clauses = [
                cl(lit(p1, "<", p2), lit(p1, "=", p2), lit(head, "=", p1)),
                cl(lit(p2, "<", p1), lit(head, "=", p2)),
            ]
            return emit("or", clauses, [(p1, t1), (p2, t2)])
        if op == "->":
            clauses = [
                cl(lit(p1, "<", p2), lit(p1, "=", p2), lit(head, "=", p2)),
                cl(lit(p2, "<", p1), lit(head, "=", TOP)),
            ]
            return emit("implies", clauses, [(p1, t1), (p2, t2)])
        if op == "<->":
            clauses = [
                cl(lit(p1, "<", p2), lit(p1, "=", p2), lit(head, "=", p2)),
                cl(lit(p2, "<", p1), lit(p2, "=", p1), lit(head, "=", p1)),
                cl(lit(p1, "<", p2), lit(p2, "<", p1), lit(head, "=", TOP)),
            ]
            return emit("iff", clauses, [(p1, t1), (p2, t2)])
        if op == "=":
            clauses = [
                cl(lit(p1, "=", p2), lit(head, "=", BOT)),
                cl(lit(p1, "<", p2), lit(p2, "<", p1), lit(head, "=", TOP)),
            ]
            return emit("eq", clauses, [(p1, t1), (p2, t2)])
        if op == "<":
            clauses = [
                cl(lit(p1, "<", p2), lit(head, "=", BOT)),
                cl(lit(p2, "<", p1), lit(p2, "=", p1), lit(head, "=", TOP)),
            ]
            return emit("lt", clauses, [(p1, t1), (p2, t2)])
        raise SyntaxError_("cannot interpolate connective %r" % op)

    # -- one seeded formula --------------------------------------------------

    def translate_formula(self, phi, row: int, goal: bool):
        """Seed one formula in the given row and interpolate to a fixpoint.
        Returns the ordered clause list (seed first, then DFS preorder)."""
        phi = rewrite_neg_delta(phi)
        xbar = tuple(Var(v) for v in sorted(formula_vars(phi)))
        col_counter = [0]

        def new_head():
            col = col_counter[0]
            col_counter[0] += 1
            self.indices.append((row, col))
            return Atom(fresh_pred(row, col), xbar)

        root_head = new_head()
        seed = OrderClause(
            frozenset(
                [OrderLit(root_head, "<" if goal else "=", TOP)]
            )
        )
        root = _Node((row, 0), root_head, phi)
        queue = [root]
        while queue:
            node = queue.pop(0)
            residuals = self.interpolate(node, new_head)
            for head, body in residuals:
                child = _Node((row, int(head.pred.rsplit("_", 1)[1])), head, body)
                node.children.append(child)
                queue.append(child)

        out = [seed]

        def dfs(node):
            out.extend(node.clauses)
            for child in node.children:
                dfs(child)

        dfs(root)
        return out


def translate(theory, goal=None, n0: int = 0, axiom_rows=None) -> TranslationResult:
    """Translate a theory and an optional goal into an order-clausal theory.

    The goal gets row n0 and axiom k (1-based) gets row n0+k, unless
    axiom_rows overrides the assignment.  Axioms that already are order
    literals are emitted directly.  The result lists the goal clauses after
    all axiom clauses when both are present, mirroring a combined problem
    file; callers that need separate parts can translate separately.
    """
    tr = Translator()
    theory = list(theory)
    if axiom_rows is None:
        axiom_rows = [n0 + k for k in range(1, len(theory) + 1)]
    if len(axiom_rows) != len(theory):
        raise ValueError("axiom_rows must match the theory length")

    clauses = []
    for phi, row in zip(theory, axiom_rows):
        phi = rewrite_neg_delta(phi)
        direct = literal_shaped(phi)
        if direct is not None:
            clauses.append(OrderClause(frozenset([direct])))
            continue
        clauses.extend(tr.translate_formula(phi, row, goal=False))
    if goal is not None:
        clauses.extend(tr.translate_formula(goal, n0, goal=True))

    sizes = {
        "T": sum(formula_size(f) for f in theory),
        "goal": formula_size(goal) if goal is not None else 0,
        "S": sum(clause_size(c) for c in clauses),
    }
    return TranslationResult(clauses, tr.indices, tr.steps, sizes)


def introduced_tcons_ok(theory, goal, result) -> bool:
    """The translation introduces no new intermediate truth constants."""
    from .syntax import theory_tcons

    inputs = set()
    for f in list(theory) + ([goal] if goal is not None else []):
        inputs |= {t.value for t in formula_tcons(f)}
    out = {t.value for t in theory_tcons(result.clauses)}
    boundary = {Fraction(0), Fraction(1)}
    return (out - boundary) <= (inputs - boundary)


def ground_check_equisatisfiable(theory, goal, n0: int = 0) -> bool:
    """For ground quantifier-free inputs: brute-force entailment agrees with
    unsatisfiability of the translation."""
    from .oracle import brute_force_sat, entails_ground

    entailed = entails_ground(theory, goal)
    result = translate(theory, goal, n0)
    sat = brute_force_sat(result.clauses).satisfiable
    return entailed == (not sat)
