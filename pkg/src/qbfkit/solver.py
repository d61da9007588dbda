"""Game-style solving of prenex NNF problems.

Two algorithms share the same recursive shape: each quantifier block plays
rounds against the blocks inside it, and a round ends when one side's SAT
query comes back unsatisfiable. The assumption-literal core of that query
tells the caller which part of its offer the loss actually relied on, so the
caller can refine with a single clause instead of enumerating assignments.

``solve_assignment`` plays rounds over full variable assignments - each block
proposes values for its own variables given the outer ones. It is simple and
serves as a baseline, but a block may need exponentially many proposals.

``solve_abstraction`` plays rounds over block interfaces: a block only
decides its own variables plus which interface subformulas it claims versus
delegates inward, using the per-block abstractions of
:mod:`qbfkit.abstraction`. Confirmed wins are recorded as proof pairs - which
granted interface nodes and which block variables the win relied on - from
which :mod:`qbfkit.certify` can extract strategy functions.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .abstraction import ScopeAbstraction, compute_influence
from .formula import InternalError, QbfProblem, Quantifier
from .sat import Solver, encode_nnf


@dataclass(frozen=True)
class ProofPair:
    """One confirmed round win at a block.

    ``nodes`` are the incoming interface subformulas, granted as settled by
    the outer blocks, that the win relied on; ``true_vars`` are the block's
    own variables assigned true in the winning round.
    """

    scope: int
    nodes: frozenset
    true_vars: frozenset


@dataclass
class ProofTrace:
    """Proof pairs in the order the solver confirmed them."""

    pairs: list = field(default_factory=list)

    def record(self, pair: ProofPair) -> None:
        self.pairs.append(pair)

    def for_scope(self, scope: int) -> list[ProofPair]:
        return [p for p in self.pairs if p.scope == scope]


@dataclass
class SolveConfig:
    algorithm: str = "abstraction"  # or "assignment"
    seed: int = 0
    adjust: bool = True  # maximize claims before delegating inward
    shrink_cores: bool = False
    record_trace: bool = True


@dataclass
class SolveStats:
    sat_queries: list  # per block, outermost first
    refinements: list  # per block, outermost first
    wall_time: float = 0.0

    @property
    def total_iterations(self) -> int:
        return sum(self.sat_queries)


def _constant_result(problem: QbfProblem, t0: float):
    const = problem.matrix_constant()
    if const is None:
        return None
    stats = SolveStats([0] * problem.scope_count, [0] * problem.scope_count,
                       time.perf_counter() - t0)
    return const, ProofTrace(), stats


def solve_abstraction(problem: QbfProblem, config: SolveConfig | None = None):
    """Solve via interface abstractions.

    Returns ``(value, trace, stats)`` where ``value`` is the truth of the
    problem, ``trace`` collects the confirmed proof pairs, and ``stats``
    counts SAT queries and refinements per block.
    """
    config = config or SolveConfig()
    t0 = time.perf_counter()
    constant = _constant_result(problem, t0)
    if constant is not None:
        return constant
    trace = ProofTrace()
    nblocks = problem.scope_count
    stats = SolveStats([0] * nblocks, [0] * nblocks)
    influence = compute_influence(problem)
    innermost_used = influence.max_scope[problem.matrix]
    blocks: dict[int, ScopeAbstraction] = {}

    def block_for(k: int) -> ScopeAbstraction:
        block = blocks.get(k)
        if block is None:
            block = ScopeAbstraction.build(problem, k, influence, config.seed)
            blocks[k] = block
        return block

    def loss_witness(block: ScopeAbstraction, solver: Solver, core,
                     granted: dict) -> dict:
        if config.shrink_cores and core:
            core = solver.shrink_core(core)
        return block.witness_from_core(core, granted)

    def confirm_win(block: ScopeAbstraction, k: int, x_values: dict,
                    granted: dict) -> dict:
        """Ask the challenger side to refute the round; UNSAT is the proof."""
        stats.sat_queries[k - 1] += 1
        result = block.dual.solve(block.dual_assumptions(x_values, granted))
        if result.sat:
            raise InternalError(
                f"round at block {k} was confirmed by both sides")
        witness = loss_witness(block, block.dual, result.failed, granted)
        if config.record_trace:
            trace.record(ProofPair(
                k,
                frozenset(n for n, v in witness.items() if v),
                frozenset(v for v, val in x_values.items() if val)))
        return witness

    def run(k: int, granted: dict):
        block = block_for(k)
        exists_here = block.quantifier is Quantifier.EXISTS
        while True:
            stats.sat_queries[k - 1] += 1
            result = block.theta.solve(block.theta_assumptions(granted))
            if not result.sat:
                witness = loss_witness(block, block.theta, result.failed,
                                       granted)
                return (not exists_here), witness
            x_values = block.x_assignment(result.model)
            if k == nblocks or innermost_used <= k:
                return exists_here, confirm_win(block, k, x_values, granted)
            model = (block.maximize_claims(result.model)
                     if config.adjust else result.model)
            claims = block.exposed_claims(model)
            inner_exists_wins, inner_witness = run(
                k + 1, {n: not claims[n] for n in block.exposed})
            if inner_exists_wins == exists_here:
                # the delegation worked out; teach the challenger side the
                # inner outcome, then confirm the whole round on it
                block.refine_dual(inner_witness)
                return exists_here, confirm_win(block, k, x_values, granted)
            relied = sorted(n for n, v in inner_witness.items() if v)
            for n in relied:
                if claims[n]:
                    raise InternalError(
                        f"refinement at block {k} would not make progress")
            block.refine(relied)
            stats.refinements[k - 1] += 1

    value, _ = run(1, {})
    stats.wall_time = time.perf_counter() - t0
    return value, trace, stats


def solve_assignment(problem: QbfProblem, config: SolveConfig | None = None):
    """Solve by playing rounds over full variable assignments.

    Returns ``(value, stats)``; this algorithm produces no proof trace.
    """
    config = config or SolveConfig(algorithm="assignment")
    t0 = time.perf_counter()
    constant = _constant_result(problem, t0)
    if constant is not None:
        value, _, stats = constant
        return value, stats
    nblocks = problem.scope_count
    stats = SolveStats([0] * nblocks, [0] * nblocks)
    arena = problem.arena

    # every solver knows all prefix variables so outer assignments can be
    # assumed directly; each block encodes what its owner must achieve
    solvers: list[Solver] = []
    var_maps: list[dict[int, int]] = []
    for scope in problem.prefix:
        solver = Solver(config.seed)
        var_map = {v: solver.fresh_var() for v in problem.all_vars()}
        solver.add_clause([encode_nnf(
            solver, arena, problem.matrix, var_map,
            negate=scope.quantifier is Quantifier.FORALL)])
        solvers.append(solver)
        var_maps.append(var_map)
    challenger = Solver(config.seed)
    challenger_map = {v: challenger.fresh_var() for v in problem.all_vars()}
    challenger.add_clause([encode_nnf(
        challenger, arena, problem.matrix, challenger_map,
        negate=problem.prefix[-1].quantifier is Quantifier.EXISTS)])

    def assumption_lits(var_map: dict[int, int], values: dict) -> list[int]:
        return [var_map[v] if val else -var_map[v]
                for v, val in sorted(values.items())]

    def core_witness(solver: Solver, var_map: dict[int, int], core,
                     values: dict) -> dict:
        if config.shrink_cores and core:
            core = solver.shrink_core(core)
        var_of = {sv: v for v, sv in var_map.items()}
        return {var_of[abs(lit)]: values[var_of[abs(lit)]] for lit in core}

    def run(k: int, alpha: dict):
        scope = problem.prefix[k - 1]
        exists_here = scope.quantifier is Quantifier.EXISTS
        solver, var_map = solvers[k - 1], var_maps[k - 1]
        while True:
            stats.sat_queries[k - 1] += 1
            result = solver.solve(assumption_lits(var_map, alpha))
            if not result.sat:
                witness = core_witness(solver, var_map, result.failed, alpha)
                return (not exists_here), witness
            beta = dict(alpha)
            for v in scope.vars:
                beta[v] = bool(result.model[var_map[v]])
            if k == nblocks:
                stats.sat_queries[k - 1] += 1
                refute = challenger.solve(assumption_lits(challenger_map, beta))
                if refute.sat:
                    raise InternalError(
                        "matrix and its negation both satisfied")
                witness = core_witness(challenger, challenger_map,
                                       refute.failed, beta)
                return exists_here, {v: b for v, b in witness.items()
                                     if v in alpha}
            inner_exists_wins, inner_witness = run(k + 1, beta)
            if inner_exists_wins == exists_here:
                return exists_here, {v: b for v, b in inner_witness.items()
                                     if v in alpha}
            solver.add_clause([-var_map[v] if b else var_map[v]
                               for v, b in sorted(inner_witness.items())])
            stats.refinements[k - 1] += 1

    value, _ = run(1, {})
    stats.wall_time = time.perf_counter() - t0
    return value, stats
