"""Scope-wise SAT abstractions of a prenex NNF problem.

Each quantifier block gets a pair of incremental SAT instances over a shared
variable numbering:

* the claim side encodes what the block's owner must achieve - the matrix for
  an existential block, its negation for a universal one - abstracting away
  everything decided by inner blocks,
* the challenger side encodes the opposite polarity and is used to extract,
  from an unsatisfiable core, which delegations and block variables a winning
  round actually relied on.

Subformulas whose variables lie on both sides of a block boundary are the
interface of that boundary. A claim variable (`claim[n]`) states that the
round being built keeps occurrence `n` alive; an outer variable
(`outer_sat[n]`) states that the outer rounds already took care of the part
of `n` they can see. Interface literals are the only channel between blocks:
a block receives assumptions over the incoming interface and exposes claims
over the outgoing one.

The encoding walks the matrix with the block's polarity applied on the fly,
so node ids are stable across blocks and polarities:

* a literal of the current block becomes a SAT literal,
* a literal of an outer block folds into the parent's outer variable,
* a subtree entirely decided outside folds into the parent's outer variable,
* a subtree reaching exactly this block gets its own claim variable,
* anything decided by inner blocks alone is invisible to claim constraints;
  only the top-level disjunction walk may name it (an inner literal lets the
  round decline the root claim, an inner subtree may be claimed outright,
  with satisfaction either way becoming the inner rounds' burden).

Only claims actually referenced (from the matrix-level clauses, from other
constraints, or exposed on the outgoing interface) get their constraints
emitted.
"""

from __future__ import annotations

from dataclasses import dataclass

from .formula import (AND, LIT, OR, InternalError, QbfProblem, Quantifier,
                      subformulas)
from .sat import Solver


@dataclass(frozen=True)
class InfluenceMap:
    """Innermost and outermost block index touched by every subformula."""

    min_scope: dict[int, int]
    max_scope: dict[int, int]

    def straddles(self, node: int, boundary: int) -> bool:
        return self.min_scope[node] <= boundary < self.max_scope[node]


def compute_influence(problem: QbfProblem) -> InfluenceMap:
    arena = problem.arena
    if problem.matrix_constant() is not None:
        raise ValueError("a constant matrix has no influence structure")
    mins: dict[int, int] = {}
    maxs: dict[int, int] = {}
    for n in reversed(subformulas(arena, problem.matrix)):
        if arena.kinds[n] == LIT:
            s = problem.var_scope[abs(arena.payload[n])]
            mins[n] = maxs[n] = s
        else:
            kids = arena.payload[n]
            mins[n] = min(mins[c] for c in kids)
            maxs[n] = max(maxs[c] for c in kids)
    return InfluenceMap(mins, maxs)


def boundary_interface(problem: QbfProblem, influence: InfluenceMap,
                       boundary: int) -> tuple[int, ...]:
    """Subformulas with variables on both sides of boundary k|k+1, preorder."""
    if boundary <= 0 or boundary >= problem.scope_count:
        return ()
    return tuple(n for n in subformulas(problem.arena, problem.matrix)
                 if influence.straddles(n, boundary))


class ScopeAbstraction:
    """The claim/challenger SAT pair of one quantifier block."""

    def __init__(self, problem: QbfProblem, scope_index: int,
                 influence: InfluenceMap, incoming, exposed, seed: int = 0):
        self.problem = problem
        self.scope_index = scope_index
        self.quantifier = problem.prefix[scope_index - 1].quantifier
        self.influence = influence
        self.incoming = tuple(incoming)  # nodes granted by outer blocks
        self.exposed = tuple(exposed)  # nodes this block may delegate inward
        self.theta = Solver(seed)
        self.dual = Solver(seed)
        self.theta_clauses: list[tuple[int, ...]] = []
        self.dual_clauses: list[tuple[int, ...]] = []
        self.x_var: dict[int, int] = {}
        self.outer_sat: dict[int, int] = {}
        self.claim: dict[int, int] = {}
        self.refinement_count = 0
        self.dual_refinement_count = 0
        self._exposed_set = set(self.exposed)
        self._neg_claim_occ: dict[int, list[tuple[int, ...]]] | None = None

        for v in problem.prefix[scope_index - 1].vars:
            self.x_var[v] = self._fresh()
        for n in self.incoming:
            self.outer_sat[n] = self._fresh()
        for n in self.exposed:
            self._claim_var(n)
        negated = self.quantifier is Quantifier.FORALL
        self._emit(negated, self.theta, self.theta_clauses)
        self._emit(not negated, self.dual, self.dual_clauses)

    @classmethod
    def build(cls, problem: QbfProblem, scope_index: int,
              influence: InfluenceMap | None = None,
              seed: int = 0) -> "ScopeAbstraction":
        influence = influence or compute_influence(problem)
        incoming = boundary_interface(problem, influence, scope_index - 1)
        exposed = boundary_interface(problem, influence, scope_index)
        return cls(problem, scope_index, influence, incoming, exposed, seed)

    # ------------------------------------------------------------------
    # variable management (both solvers allocate in lockstep)

    def _fresh(self) -> int:
        a = self.theta.fresh_var()
        b = self.dual.fresh_var()
        if a != b:
            raise InternalError("solver variable numbering diverged")
        return a

    def _claim_var(self, node: int) -> int:
        sv = self.claim.get(node)
        if sv is None:
            sv = self._fresh()
            self.claim[node] = sv
        return sv

    # ------------------------------------------------------------------
    # encoding

    def _emit(self, negated: bool, solver: Solver,
              sink: list[tuple[int, ...]]) -> None:
        problem, k = self.problem, self.scope_index
        arena = problem.arena
        kinds, payload = arena.kinds, arena.payload
        var_scope = problem.var_scope
        maxs = self.influence.max_scope

        def eff(kind: str) -> str:
            if not negated or kind == LIT:
                return kind
            return OR if kind == AND else AND

        def current_lit(lit: int) -> int:
            if negated:
                lit = -lit
            sv = self.x_var[abs(lit)]
            return sv if lit > 0 else -sv

        def outer_ref(node: int) -> int:
            sv = self.outer_sat.get(node)
            if sv is None:
                raise InternalError(
                    f"node {node} folds outward at block {k} but is not on "
                    "the incoming interface")
            return sv

        seen: set[tuple[int, ...]] = set()

        def add(lits) -> None:
            lits = list(dict.fromkeys(lits))
            key = tuple(sorted(lits))
            if key in seen:
                return
            seen.add(key)
            sink.append(tuple(lits))
            solver.add_clause(lits)

        needed: list[int] = []
        queued: set[int] = set()

        def need(node: int) -> None:
            if node not in queued:
                queued.add(node)
                needed.append(node)

        def child_item(parent: int, child: int) -> int | None:
            """The literal a child contributes to its parent's constraint."""
            if kinds[child] == LIT:
                lit = payload[child]
                s = var_scope[abs(lit)]
                if s == k:
                    return current_lit(lit)
                if s < k:
                    return outer_ref(parent)
                return None  # an inner block's literal: invisible here
            if maxs[child] < k:
                return outer_ref(parent)
            if maxs[child] == k:
                need(child)
                return self._claim_var(child)
            return None  # decided by inner blocks only: invisible here

        # matrix-level clauses: how this block's owner can win the round
        root = problem.matrix
        rkind = eff(kinds[root])
        if rkind == LIT:
            lit = payload[root]
            s = var_scope[abs(lit)]
            if s == k:
                add([current_lit(lit)])
            elif s > k:
                add([-self._claim_var(root)])
            else:
                raise InternalError(f"block {k} lies past the matrix content")
        elif rkind == AND:
            add([self._claim_var(root)])
            need(root)
        else:
            items: list[int] = []
            for c in payload[root]:
                if kinds[c] == LIT:
                    lit = payload[c]
                    s = var_scope[abs(lit)]
                    if s == k:
                        items.append(current_lit(lit))
                    elif s < k:
                        items.append(outer_ref(root))
                    else:
                        items.append(-self._claim_var(root))
                        need(root)
                elif maxs[c] < k:
                    items.append(outer_ref(root))
                else:
                    if eff(kinds[c]) == OR:
                        raise InternalError("nested same-connective node")
                    # any disjunct may win the matrix, even one that inner
                    # blocks still have to finish
                    items.append(self._claim_var(c))
                    need(c)
            add(items)

        for n in self.exposed:
            need(n)

        # constraints of every referenced claim
        i = 0
        while i < len(needed):
            n = needed[i]
            i += 1
            if kinds[n] == LIT:
                continue  # a literal claim carries no constraint of its own
            b = self._claim_var(n)
            if eff(kinds[n]) == AND:
                for c in payload[n]:
                    item = child_item(n, c)
                    if item is not None:
                        add([-b, item])
            else:
                clause = [-b]
                for c in payload[n]:
                    item = child_item(n, c)
                    if item is not None:
                        clause.append(item)
                add(clause)

    # ------------------------------------------------------------------
    # assumptions and model views

    def theta_assumptions(self, granted: dict[int, bool]) -> list[int]:
        """Assumption literals for the claim side: one per incoming node."""
        if set(granted) != set(self.incoming):
            raise InternalError("incoming interface assignment is not total")
        return [self.outer_sat[n] if granted[n] else -self.outer_sat[n]
                for n in self.incoming]

    def dual_assumptions(self, x_values: dict[int, bool],
                         granted: dict[int, bool]) -> list[int]:
        """Challenger assumptions: block variables plus complemented grants."""
        lits = [sv if x_values[v] else -sv for v, sv in self.x_var.items()]
        lits += [-self.outer_sat[n] if granted[n] else self.outer_sat[n]
                 for n in self.incoming]
        return lits

    def x_assignment(self, model: list[int]) -> dict[int, bool]:
        return {v: bool(model[sv]) for v, sv in self.x_var.items()}

    def exposed_claims(self, model: list[int]) -> dict[int, bool]:
        return {n: bool(model[self.claim[n]]) for n in self.exposed}

    def witness_from_core(self, core, granted: dict[int, bool]) -> dict[int, bool]:
        """Incoming-interface part of an unsat core, valued as granted."""
        node_of = {sv: n for n, sv in self.outer_sat.items()}
        out: dict[int, bool] = {}
        for lit in core:
            n = node_of.get(abs(lit))
            if n is not None:
                out[n] = granted[n]
        return out

    # ------------------------------------------------------------------
    # claim maximization (keeps delegation minimal when translating inward)

    def maximize_claims(self, model: list[int]) -> list[int]:
        """Raise claim variables as far as the claim side's clauses allow.

        Works on a copy of a satisfying assignment; child claims are visited
        first (arena ids order children before parents), and sweeps repeat to
        a fixpoint. The result is re-checked to still satisfy every clause.
        """
        model = list(model)
        if self._neg_claim_occ is None:
            occ: dict[int, list[tuple[int, ...]]] = {sv: [] for sv in self.claim.values()}
            for clause in self.theta_clauses:
                for lit in clause:
                    if lit < 0 and -lit in occ:
                        occ[-lit].append(clause)
            self._neg_claim_occ = occ

        def satisfied(lit: int) -> bool:
            val = model[abs(lit)]
            return val == 1 if lit > 0 else val == 0

        ordered = sorted(self.claim.items())
        changed = True
        while changed:
            changed = False
            for node, sv in ordered:
                if model[sv] == 1:
                    continue
                if all(any(satisfied(l) for l in cl if l != -sv)
                       for cl in self._neg_claim_occ[sv]):
                    model[sv] = 1
                    changed = True
        for clause in self.theta_clauses:
            if not any(satisfied(l) for l in clause):
                raise InternalError("claim maximization broke a clause")
        return model

    # ------------------------------------------------------------------
    # refinement

    def refine(self, nodes) -> None:
        """Exclude the current exposed-claim assignment: some node must be claimed."""
        nodes = sorted(set(nodes))
        bad = [n for n in nodes if n not in self._exposed_set]
        if bad:
            raise InternalError(f"refinement names non-interface nodes {bad}")
        if self.refinement_count >= 2 ** len(self.exposed):
            raise InternalError(
                f"block {self.scope_index} exceeded its refinement budget")
        clause = tuple(self.claim[n] for n in nodes)
        self.theta_clauses.append(clause)
        self.theta.add_clause(clause)
        self.refinement_count += 1

    def refine_dual(self, witness: dict[int, bool]) -> None:
        """Teach the challenger an inner outcome.

        ``witness`` is the grant reliance of an inner-game win by this
        block's owner. Grants favor the receiving block, so the win persists
        whenever all the witness's denied grants stay denied; the challenger
        escapes only by settling one of those nodes itself.
        """
        bad = [n for n in witness if n not in self._exposed_set]
        if bad:
            raise InternalError(f"refinement names non-interface nodes {bad}")
        clause = tuple(self.claim[n] for n in sorted(witness)
                       if not witness[n])
        self.dual_clauses.append(clause)
        self.dual.add_clause(clause)
        self.dual_refinement_count += 1

    # ------------------------------------------------------------------
    # introspection

    def _label(self, sat_var: int):
        for v, sv in self.x_var.items():
            if sv == sat_var:
                return ("var", v)
        for n, sv in self.outer_sat.items():
            if sv == sat_var:
                return ("outer", n)
        for n, sv in self.claim.items():
            if sv == sat_var:
                return ("claim", n)
        return ("aux", sat_var)

    def symbolic(self, clauses) -> frozenset:
        """Clauses as sign/role/key triples, independent of SAT numbering."""
        return frozenset(
            frozenset((lit > 0,) + self._label(abs(lit)) for lit in clause)
            for clause in clauses)

    def symbolic_theta(self) -> frozenset:
        return self.symbolic(self.theta_clauses)

    def symbolic_dual(self) -> frozenset:
        return self.symbolic(self.dual_clauses)

    def legend(self) -> dict[int, str]:
        names = self.problem.var_names
        out = {sv: f"x {names[v]}" for v, sv in self.x_var.items()}
        out.update({sv: f"outer n{n}" for n, sv in self.outer_sat.items()})
        out.update({sv: f"claim n{n}" for n, sv in self.claim.items()})
        return out

    def debug_dump(self) -> str:
        lines = [f"c block {self.scope_index} ({self.quantifier.value})"]
        for sv, label in sorted(self.legend().items()):
            lines.append(f"c {sv} = {label}")
        lines.append("c claim side")
        lines.append(self.theta.to_dimacs().rstrip())
        lines.append("c challenger side")
        lines.append(self.dual.to_dimacs().rstrip())
        return "\n".join(lines) + "\n"
