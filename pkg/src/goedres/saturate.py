"""Fair given-clause saturation over order clauses.

Clauses move from a passive queue to the processed set; each given clause
is combined with the processed set under every enabled rule.  Selection
interleaves age and size so the search is fair; everything is deterministic
for a fixed config.  Every derived clause is recorded as a replayable
ProofStep, so a refutation is a checkable Deduction.

Ground, quantified-atom-free theories take a fast path that enumerates
contradiction chains as simple paths over a literal graph; the general path
extends chains by unification.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import rules
from .proofs import Deduction, ProofStep
from .substitution import (
    NoUnifier,
    canonical_clause,
    mgu,
    rename_apart,
)
from .syntax import (
    Atom,
    OrderClause,
    QAtom,
    TruthConst,
    clause_atoms,
    clause_freevars,
    clause_is_ground,
    clause_qatoms,
    clause_size,
    clause_tcons,
    term_is_ground,
)

TOP = TruthConst(Fraction(1))
BOT = TruthConst(Fraction(0))


@dataclass
class SaturationConfig:
    max_steps: int = 10000
    max_clause_size: int = 200
    max_term_depth: int = 6
    max_chain: int = 8
    admissible: bool = True
    seed: int = 0
    universe: tuple = ()  # ground numerals enabling universe generalization


@dataclass
class SaturationResult:
    status: str  # 'refuted' | 'saturated' | 'bound'
    deduction: Deduction
    derived: int
    inputs: dict

    @property
    def refuted(self):
        return self.status == "refuted"


def _element_head(e):
    if isinstance(e, TruthConst):
        return ("c", e.value)
    if isinstance(e, Atom):
        return ("p", e.pred, len(e.args))
    return ("q", e.quant, e.var, e.body.pred, len(e.body.args))


class _Search:
    def __init__(self, inputs: dict, config: SaturationConfig):
        self.config = config
        self.inputs = dict(inputs)
        self.steps = Deduction([])
        self.next_id = 0
        self.seen: dict = {}  # canonical clause -> step id
        self.passive: list = []  # step ids
        self.processed: list = []
        self.suppressed = False
        self.rng = random.Random(config.seed)
        self.pick_counter = 0
        self.ground = all(
            clause_is_ground(c) and not clause_qatoms(c)
            for c in inputs.values()
        )
        self.qatoms_empty = not any(clause_qatoms(c) for c in inputs.values())
        self.int_tcons = sorted(
            {
                t.value
                for c in inputs.values()
                for t in clause_tcons(c)
                if t.value not in (Fraction(0), Fraction(1))
            }
        )
        self.seen_atoms: set = set()
        self.seen_qatoms: set = set()
        self.tri_done: set = set()
        self.dich_done: set = set()
        self.quant_done: set = set()
        self.wit_done: set = set()
        self.wit_counter = 0
        self.universe_index: dict = {}
        self._ground_emitted: set = set()

    # -- bookkeeping ---------------------------------------------------------

    def add_step(self, step: ProofStep) -> bool:
        """Record a derived clause unless it is a duplicate or out of
        bounds.  Returns True when the empty clause was derived."""
        c = step.clause
        if clause_size(c) > self.config.max_clause_size:
            self.suppressed = True
            return False
        key = canonical_clause(c)
        if key in self.seen:
            return False
        self.seen[key] = step.step_id
        self.steps.add(step)
        self.passive.append(step.step_id)
        return c.is_empty

    def fresh_id(self) -> str:
        self.next_id += 1
        return "d%d" % self.next_id

    def clause_of(self, sid: str) -> OrderClause:
        return self.steps.by_id[sid].clause

    # -- initialization --------------------------------------------------------

    def init(self):
        for cid, c in self.inputs.items():
            step = ProofStep(step_id=cid, rule="input", clause=c)
            if self.add_step(step):
                return True
        constants = {
            t.value for c in self.inputs.values() for t in clause_tcons(c)
        }
        for c in rules.ordtcons(constants):
            step = ProofStep(step_id=self.fresh_id(), rule="ordtcons", clause=c)
            if self.add_step(step):
                return True
        return False

    # -- given-clause selection -------------------------------------------------

    def pick_given(self) -> str:
        self.pick_counter += 1
        if (self.pick_counter + self.config.seed) % 3 == 0:
            idx = 0  # oldest
        else:
            idx = min(
                range(len(self.passive)),
                key=lambda i: (clause_size(self.clause_of(self.passive[i])), i),
            )
        return self.passive.pop(idx)

    # -- rule generation ----------------------------------------------------------

    def generate(self, gid: str):
        g = self.clause_of(gid)
        out = []
        out.extend(self.chains_with(gid))
        out.extend(self.unary_rules(gid, g))
        out.extend(self.commutativity_with(gid, g))
        if self.config.universe:
            out.extend(self.universe_rule(gid, g))
        return out

    def unary_rules(self, gid, g):
        out = []
        new_atoms = clause_atoms(g) - self.seen_atoms
        new_qatoms = clause_qatoms(g) - self.seen_qatoms
        self.seen_atoms |= clause_atoms(g)
        self.seen_qatoms |= clause_qatoms(g)

        for a in sorted(new_atoms, key=repr):
            for b_val in self.int_tcons:
                b = TruthConst(b_val)
                key = (a, b)
                if key in self.tri_done:
                    continue
                self.tri_done.add(key)
                try:
                    clause = rules.trichotomy(a, b, self.qatoms_empty)
                except rules.RuleError:
                    continue
                out.append(
                    ProofStep(
                        step_id=self.fresh_id(),
                        rule="trichotomy",
                        clause=clause,
                        element_a=a,
                        element_b=b,
                    )
                )
            if not self.qatoms_empty:
                partners = sorted(self.seen_atoms - {a}, key=repr)
                for b in partners:
                    if clause_is_ground_elem(a) or clause_is_ground_elem(b):
                        pass
                    key = frozenset([("t", a), ("t", b)])
                    if key in self.tri_done:
                        continue
                    self.tri_done.add(key)
                    a2, b2 = _disjoint_pair(a, b)
                    try:
                        clause = rules.trichotomy(a2, b2, False)
                    except rules.RuleError:
                        continue
                    out.append(
                        ProofStep(
                            step_id=self.fresh_id(),
                            rule="trichotomy",
                            clause=clause,
                            element_a=a2,
                            element_b=b2,
                        )
                    )

        if self.config.admissible:
            for a in sorted(new_atoms | new_qatoms, key=repr):
                if a in self.dich_done:
                    continue
                self.dich_done.add(a)
                out.append(
                    ProofStep(
                        step_id=self.fresh_id(),
                        rule="zero_dichotomy",
                        clause=rules.zero_dichotomy(a),
                        element_a=a,
                    )
                )
                out.append(
                    ProofStep(
                        step_id=self.fresh_id(),
                        rule="one_dichotomy",
                        clause=rules.one_dichotomy(a),
                        element_a=a,
                    )
                )

        for q in sorted(new_qatoms, key=repr):
            if q not in self.quant_done:
                self.quant_done.add(q)
                out.append(
                    ProofStep(
                        step_id=self.fresh_id(),
                        rule="%s_quant" % q.quant,
                        clause=rules.quantification(q),
                        qatom=q,
                    )
                )
            for b in [TOP, BOT]:
                key = (q, b)
                if key in self.wit_done:
                    continue
                self.wit_done.add(key)
                self.wit_counter += 1
                name = "$w_0_%d" % self.wit_counter
                clause, _ = rules.witnessing(q, b, name)
                out.append(
                    ProofStep(
                        step_id=self.fresh_id(),
                        rule="%s_witness" % q.quant,
                        clause=clause,
                        qatom=q,
                        element_b=b,
                        witness=name,
                    )
                )
        return out

    def commutativity_with(self, gid, g):
        if not self.config.admissible:
            return []
        out = []
        pool = [(pid, self.clause_of(pid)) for pid in self.processed]
        for pid, other in pool:
            for first, second in ((gid, pid), (pid, gid)):
                c1, c2 = self.clause_of(first), self.clause_of(second)
                try:
                    clause = rules.and_commutativity(c1, c2)
                except rules.RuleError:
                    continue
                out.append(
                    ProofStep(
                        step_id=self.fresh_id(),
                        rule="and_commutativity",
                        clause=clause,
                        premises=(first, second),
                    )
                )
        return out

    def universe_rule(self, gid, g):
        from .substitution import FreshVars
        from .syntax import replace_term, Var

        out = []
        pool = FreshVars(clause_freevars(g))
        for u in self.config.universe:
            if not _occurs_in_clause(g, u):
                continue
            hole = pool.fresh("x")
            template = OrderClause(
                frozenset(
                    _replace_lit(l, u, Var(hole)) for l in g.literals
                )
            )
            key = canonical_clause(template)
            bucket = self.universe_index.setdefault(key, {})
            bucket[u] = gid
            if len(bucket) == len(self.config.universe):
                premises = tuple(bucket[x] for x in self.config.universe)
                try:
                    clause = rules.universe_forall(
                        template, hole, self.config.universe,
                        [self.clause_of(p) for p in premises],
                    )
                except rules.RuleError:
                    continue
                out.append(
                    ProofStep(
                        step_id=self.fresh_id(),
                        rule="universe_forall",
                        clause=clause,
                        premises=premises,
                        template=template,
                        hole_var=hole,
                        universe=tuple(self.config.universe),
                    )
                )
        return out

    # -- chain search ----------------------------------------------------------

    def chains_with(self, gid):
        pool = self.processed + [gid]
        if self.ground:
            return self._ground_chains(gid, pool)
        return self._general_chains(gid, pool)

    def _ground_chains(self, gid, pool):
        # edges: oriented literal occurrences with precomputed remainders
        edges_from: dict = {}
        remainder: dict = {}
        for pid in pool:
            c = self.clause_of(pid)
            for idx, l in enumerate(c.lits):
                remainder[(pid, idx)] = c.literals - {l}
                variants = [(l.left, l.right, False)]
                if l.op == "=":
                    variants.append((l.right, l.left, True))
                for left, right, flip in variants:
                    edges_from.setdefault(left, []).append(
                        (pid, idx, flip, right, l.op)
                    )

        out = []
        emitted: set = set()  # resolvent literal frozensets already produced
        max_size = self.config.max_clause_size

        def close(path, endpoint, acc):
            if acc in emitted or acc in self._ground_emitted:
                return
            key = canonical_clause(OrderClause(acc))
            if key in self.seen:
                emitted.add(acc)
                return
            premises = tuple(p[0] for p in path)
            selections = tuple((p[1],) for p in path)
            flips = tuple(p[2] for p in path)
            prem = [
                rules.Premise(self.clause_of(pid), sel, flip)
                for pid, sel, flip in zip(premises, selections, flips)
            ]
            try:
                clause, theta, _ = rules.hyperresolve(prem, endpoint, condense=True)
            except rules.RuleError:
                return
            emitted.add(acc)
            out.append(
                ProofStep(
                    step_id=self.fresh_id(),
                    rule="hyper",
                    clause=clause,
                    premises=premises,
                    selections=selections,
                    flips=flips,
                    endpoint=endpoint,
                    condensed=True,
                    subst=theta,
                )
            )

        def dfs(path, start, current, visited, acc, has_strict, uses_given):
            if path and has_strict and uses_given:
                if start == TOP:
                    close(path, "top", acc)
                if current == BOT:
                    close(path, "bottom", acc)
                if current == start:
                    close(path, "cycle", acc)
            if len(path) >= self.config.max_chain:
                return
            for pid, idx, flip, right, op in edges_from.get(current, ()):
                if right in visited and right != start:
                    continue
                new_acc = acc | remainder[(pid, idx)]
                if _lits_size(new_acc) > max_size:
                    self.suppressed = True
                    continue
                dfs(
                    path + [(pid, idx, flip)],
                    start,
                    right,
                    visited | {right},
                    new_acc,
                    has_strict or op == "<",
                    uses_given or pid == gid,
                )

        for start in sorted(edges_from, key=repr):
            dfs([], start, start, {start}, frozenset(), False, False)
        self._ground_emitted |= emitted
        return out

    def _general_chains(self, gid, pool):
        # chain extension by unification; premises are renamed apart lazily
        out = []
        clauses = [(pid, self.clause_of(pid)) for pid in pool]

        def candidates():
            for pid, c in clauses:
                for idx, l in enumerate(c.lits):
                    yield (pid, idx, False, l)
                    if l.op == "=":
                        yield (pid, idx, True, l)

        cand_list = list(candidates())

        def try_close(path):
            prem = [
                rules.Premise(self.clause_of(pid), (idx,), flip)
                for pid, idx, flip in path
            ]
            for endpoint in ("top", "bottom", "cycle"):
                try:
                    clause, theta, _ = rules.hyperresolve(
                        prem, endpoint, condense=True
                    )
                except rules.RuleError:
                    continue
                out.append(
                    ProofStep(
                        step_id=self.fresh_id(),
                        rule="hyper",
                        clause=clause,
                        premises=tuple(p[0] for p in path),
                        selections=tuple((p[1],) for p in path),
                        flips=tuple(p[2] for p in path),
                        endpoint=endpoint,
                        condensed=True,
                        subst=theta,
                    )
                )

        def links_unify(path):
            prem_clauses = [self.clause_of(pid) for pid, _, _ in path]
            renamed, _ = rename_apart(prem_clauses)
            families = []
            chain = []
            for (pid, idx, flip), rc in zip(path, renamed):
                l = rc.lits[idx]
                left, right = (l.right, l.left) if flip else (l.left, l.right)
                chain.append((left, right))
            for (_, r), (l2, _) in zip(chain, chain[1:]):
                families.append([r, l2])
            if not families:
                return True
            try:
                mgu(families)
                return True
            except NoUnifier:
                return False

        def dfs(path, uses_given):
            if path and (uses_given or len(path) >= self.config.max_chain):
                if uses_given:
                    try_close(path)
            if len(path) >= self.config.max_chain:
                return
            for pid, idx, flip, _ in cand_list:
                new_path = path + [(pid, idx, flip)]
                if not links_unify(new_path):
                    continue
                dfs(new_path, uses_given or pid == gid)

        dfs([], False)
        return out

    # -- main loop ----------------------------------------------------------------

    def run(self) -> SaturationResult:
        if self.init():
            return SaturationResult("refuted", self.steps, 0, self.inputs)
        derived = 0
        while self.passive:
            if derived >= self.config.max_steps:
                return SaturationResult("bound", self.steps, derived, self.inputs)
            gid = self.pick_given()
            new_steps = self.generate(gid)
            self.processed.append(gid)
            for step in new_steps:
                before = len(self.steps)
                empty = self.add_step(step)
                derived += len(self.steps) - before
                if empty:
                    self._trim_after(step.step_id)
                    return SaturationResult(
                        "refuted", self.steps, derived, self.inputs
                    )
                if derived >= self.config.max_steps:
                    return SaturationResult(
                        "bound", self.steps, derived, self.inputs
                    )
        status = "bound" if self.suppressed else "saturated"
        return SaturationResult(status, self.steps, derived, self.inputs)

    def _trim_after(self, last_id: str):
        steps = []
        for s in self.steps:
            steps.append(s)
            if s.step_id == last_id:
                break
        self.steps = Deduction(steps)


def clause_is_ground_elem(e) -> bool:
    from .syntax import element_freevars

    return not element_freevars(e)


def _lits_size(lits) -> int:
    from .syntax import lit_size

    return sum(lit_size(l) for l in lits)


def _disjoint_pair(a, b):
    from .substitution import FreshVars, Substitution
    from .syntax import Var, element_freevars
    from .substitution import apply_element

    va, vb = element_freevars(a), element_freevars(b)
    if va & vb:
        pool = FreshVars(va | vb)
        rho = Substitution.of({v: Var(pool.fresh(v)) for v in vb})
        b = apply_element(rho.extend_identity(vb), b)
    return a, b


def _occurs_in_clause(c: OrderClause, t) -> bool:
    from .syntax import subterms

    for a in clause_atoms(c) | {q.body for q in clause_qatoms(c)}:
        for arg in a.args:
            if t in set(subterms(arg)):
                return True
    return False


def _replace_lit(l, old, new):
    from .syntax import OrderLit, replace_term

    def fix_element(e):
        if isinstance(e, Atom):
            return Atom(e.pred, tuple(replace_term(t, old, new) for t in e.args))
        if isinstance(e, QAtom):
            return QAtom(e.quant, e.var, fix_element(e.body))
        return e

    return OrderLit(fix_element(l.left), l.op, fix_element(l.right))


def saturate(inputs, config: SaturationConfig | None = None) -> SaturationResult:
    """Saturate a clause set.  `inputs` is a {id: clause} mapping or an
    iterable of clauses (then ids are assigned 1..n)."""
    if not isinstance(inputs, dict):
        inputs = {str(i): c for i, c in enumerate(inputs, 1)}
    return _Search(inputs, config or SaturationConfig()).run()
