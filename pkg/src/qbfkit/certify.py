"""Strategy extraction from proof traces and certificate checking.

A solved problem yields strategy functions for the winning side: Skolem
functions for the existential variables when the problem is true, Herbrand
functions for the universal variables when it is false. Each function maps
the variables its owner may react to - the outer variables of the opposite
kind - to a move, and substituting the functions into the matrix makes it a
tautology (Skolem) or unsatisfiable (Herbrand) over the remaining variables.

Extraction replays the solver's proof pairs. A pair at block ``k`` says: in
the round where exactly the granted interface nodes ``pair.nodes`` were
settled by outer blocks, assigning ``pair.true_vars`` true (the rest of the
block false) wins. The grant of node ``n`` is itself a formula over outer
variables - the part of ``n`` the outer blocks can see, in the block's
polarity - so each pair becomes a guarded move: its guard is the
conjunction of its grant conditions, pairs at a block are tried in recorded
order, and the first guard that fires supplies the move. Outer strategy
functions are substituted into deeper guards, which keeps every function a
circuit over opposite-kind inputs only.
"""

from __future__ import annotations

from dataclasses import dataclass

from .abstraction import InfluenceMap, compute_influence
from .aiger import FALSE_LIT, TRUE_LIT, Circuit
from .aiger import negate as aig_not
from .formula import (AND, LIT, OR, TRUE, Arena, InternalError, QbfProblem,
                      Quantifier, copy_into, dependencies)
from .parsing import ParseError
from .sat import Solver, encode_nnf
from .solver import ProofPair, ProofTrace


def condition_formula(problem: QbfProblem, node: int,
                      scope_index: int) -> tuple[Arena, int]:
    """The grant condition of an interface node, as a fresh formula.

    For a node on the incoming interface of the given block, this is the
    outer-visible part of the node in the block's polarity: the formula over
    strictly outer variables that holds exactly when the outer rounds have
    settled the node in the block's favor.
    """
    arena = Arena()
    root = _condition_into(problem, compute_influence(problem), node,
                           scope_index, arena)
    return arena, root


def _condition_into(problem: QbfProblem, influence: InfluenceMap, node: int,
                    scope_index: int, dst: Arena) -> int:
    if not influence.straddles(node, scope_index - 1):
        raise InternalError(
            f"node {node} is not on the incoming interface of block "
            f"{scope_index}")
    negated = problem.prefix[scope_index - 1].quantifier is Quantifier.FORALL
    arena = problem.arena
    kind = arena.kinds[node]
    out_kind = kind if not negated else (OR if kind == AND else AND)
    pieces = []
    for child in arena.payload[node]:
        if arena.kinds[child] == LIT:
            lit = arena.payload[child]
            if problem.var_scope[abs(lit)] < scope_index:
                pieces.append(dst.lit(-lit if negated else lit))
        elif influence.max_scope[child] < scope_index:
            pieces.append(copy_into(dst, arena, child, negated))
    return dst.build(out_kind, pieces)


def _encode_formula(circuit: Circuit, arena: Arena, node: int,
                    var_lit: dict[int, int]) -> int:
    """Encode an NNF formula into the circuit, substituting variables."""
    kind = arena.kinds[node]
    if kind == LIT:
        lit = arena.payload[node]
        base = var_lit[abs(lit)]
        return base if lit > 0 else aig_not(base)
    if kind in (AND, OR):
        child_lits = [_encode_formula(circuit, arena, c, var_lit)
                      for c in arena.payload[node]]
        if kind == AND:
            return circuit.and_many(child_lits)
        return circuit.or_many(child_lits)
    return TRUE_LIT if kind == TRUE else FALSE_LIT


def extract_functions(problem: QbfProblem, trace: ProofTrace, value: bool, *,
                      eliminated: dict[int, bool] | None = None,
                      input_vars=None, output_vars=None,
                      names: dict[int, str] | None = None) -> Circuit:
    """Build the winning side's strategy circuit from a proof trace.

    By default the inputs and outputs follow the problem's own prefix; the
    keyword arguments let a caller lay out the certificate for a larger
    prefix (preprocessed-away variables become constant outputs valued per
    ``eliminated``).
    """
    func_q = Quantifier.EXISTS if value else Quantifier.FORALL
    eliminated = eliminated or {}
    names = names or problem.var_names
    if input_vars is None:
        input_vars = [v for v in problem.all_vars()
                      if problem.quantifier_of(v) is not func_q]
    if output_vars is None:
        output_vars = [v for v in problem.all_vars()
                       if problem.quantifier_of(v) is func_q]

    circuit = Circuit()
    circuit.kind = "skolem" if value else "herbrand"
    var_lit = {v: circuit.add_input(names[v]) for v in input_vars}

    strategy: dict[int, int] = {}
    if problem.matrix_constant() is None:
        influence = compute_influence(problem)
        scratch = Arena()
        for k, scope in enumerate(problem.prefix, start=1):
            if scope.quantifier is not func_q:
                continue
            fires: list[tuple[ProofPair, int]] = []
            earlier = FALSE_LIT
            for pair in trace.for_scope(k):
                guard = circuit.and_many(
                    _encode_formula(
                        circuit, scratch,
                        _condition_into(problem, influence, n, k, scratch),
                        var_lit)
                    for n in sorted(pair.nodes))
                fires.append((pair, circuit.and_(guard, aig_not(earlier))))
                earlier = circuit.or_(earlier, guard)
            for v in scope.vars:
                strategy[v] = circuit.or_many(
                    fire for pair, fire in fires if v in pair.true_vars)
                var_lit[v] = strategy[v]

    for v in output_vars:
        if v in strategy:
            lit = strategy[v]
        elif v in eliminated:
            lit = TRUE_LIT if eliminated[v] else FALSE_LIT
        else:
            lit = FALSE_LIT
        circuit.add_output(names[v], lit)
    return circuit


def build_certificate(original: QbfProblem, reduced: QbfProblem,
                      eliminated: dict[int, bool], trace: ProofTrace,
                      value: bool) -> Circuit:
    """Extraction laid out for the original prefix of a preprocessed problem."""
    func_q = Quantifier.EXISTS if value else Quantifier.FORALL
    return extract_functions(
        reduced, trace, value, eliminated=eliminated,
        input_vars=[v for v in original.all_vars()
                    if original.quantifier_of(v) is not func_q],
        output_vars=[v for v in original.all_vars()
                     if original.quantifier_of(v) is func_q],
        names=original.var_names)


@dataclass(frozen=True)
class VerifyResult:
    status: str  # "valid", "invalid" or "ill-formed"
    counterexample: dict[str, bool] | None = None
    reason: str | None = None

    @property
    def valid(self) -> bool:
        return self.status == "valid"


def verify(problem: QbfProblem, circuit: Circuit) -> VerifyResult:
    """Check a strategy circuit against a problem.

    A well-formed certificate has one output per variable of its kind,
    reads only opposite-kind inputs, and respects the prefix order (each
    function's input cone stays within the variables it may react to). A
    valid one leaves the matrix impossible to falsify (Skolem) or to satisfy
    (Herbrand) once its functions are substituted; otherwise the SAT model
    is returned as a counterexample assignment of the input variables.
    """
    if circuit.kind == "skolem":
        func_q = Quantifier.EXISTS
    elif circuit.kind == "herbrand":
        func_q = Quantifier.FORALL
    else:
        return VerifyResult("ill-formed", reason="certificate kind is missing")

    var_of_name = {name: v for v, name in problem.var_names.items()}
    func_vars = [v for v in problem.all_vars()
                 if problem.quantifier_of(v) is func_q]
    expected = {problem.var_names[v] for v in func_vars}
    produced = [name for name, _ in circuit.outputs]
    if len(produced) != len(set(produced)):
        return VerifyResult("ill-formed", reason="duplicate output")
    if set(produced) != expected:
        return VerifyResult(
            "ill-formed",
            reason=f"outputs must be exactly the {circuit.kind} variables")
    opposite = {problem.var_names[v] for v in problem.all_vars()
                if problem.quantifier_of(v) is not func_q}
    stray = sorted(set(circuit.inputs) - opposite)
    if stray:
        return VerifyResult(
            "ill-formed", reason=f"inputs {stray} are not reaction variables")
    output_lit = dict(circuit.outputs)
    for v in func_vars:
        name = problem.var_names[v]
        allowed = {problem.var_names[d] for d in dependencies(problem, v)}
        outside = sorted(circuit.cone_inputs(output_lit[name]) - allowed)
        if outside:
            return VerifyResult(
                "ill-formed",
                reason=f"function for {name} depends on {outside}, "
                "which are not outer variables of the opposite kind")

    solver = Solver()
    true_lit = solver.true_lit()
    sat_var = {cv: solver.fresh_var()
               for cv in range(1, circuit.max_var + 1)}

    def to_sat(lit: int) -> int:
        if lit < 2:
            return true_lit if lit == 1 else -true_lit
        base = sat_var[lit // 2]
        return -base if lit & 1 else base

    for lhs, a, b in circuit.gates:
        gate, lit_a, lit_b = to_sat(lhs), to_sat(a), to_sat(b)
        solver.add_clause([-gate, lit_a])
        solver.add_clause([-gate, lit_b])
        solver.add_clause([gate, -lit_a, -lit_b])

    var_map = {var_of_name[name]: to_sat(circuit.input_lit(name))
               for name in circuit.inputs}
    var_map.update({var_of_name[name]: to_sat(lit)
                    for name, lit in circuit.outputs})
    root = encode_nnf(solver, problem.arena, problem.matrix, var_map,
                      negate=func_q is Quantifier.EXISTS)
    solver.add_clause([root])
    result = solver.solve([])
    if not result.sat:
        return VerifyResult("valid")
    counterexample = {problem.var_names[v]: bool(result.model_value(lit))
                      for v, lit in sorted(var_map.items())
                      if problem.quantifier_of(v) is not func_q}
    failure = ("the matrix can be falsified" if circuit.kind == "skolem"
               else "the matrix can be satisfied")
    return VerifyResult("invalid", counterexample=counterexample,
                        reason=f"{failure} under the strategy")


# ----------------------------------------------------------------------
# proof trace serialization

def write_trace(problem: QbfProblem, trace: ProofTrace) -> str:
    """Render a proof trace; `g` lines relate node ids to source gates."""
    lines = []
    for node in sorted(problem.node_gate):
        lines.append(f"g {node} {problem.node_gate[node]}")
    for pair in trace.pairs:
        parts = ["p", str(pair.scope),
                 "t", *(str(n) for n in sorted(pair.nodes)),
                 "x", *(str(v) for v in sorted(pair.true_vars))]
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n" if lines else ""


def read_trace(text: str) -> ProofTrace:
    trace = ProofTrace()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith("g "):
            continue
        tokens = line.split()
        if tokens[0] != "p" or len(tokens) < 3 or "t" not in tokens \
                or "x" not in tokens:
            raise ParseError(f"line {lineno}: bad proof pair {raw!r}")
        try:
            scope = int(tokens[1])
            t_at = tokens.index("t")
            x_at = tokens.index("x")
            if not (t_at == 2 and x_at > t_at):
                raise ValueError
            nodes = frozenset(int(tok) for tok in tokens[t_at + 1:x_at])
            true_vars = frozenset(int(tok) for tok in tokens[x_at + 1:])
        except ValueError:
            raise ParseError(f"line {lineno}: bad proof pair {raw!r}") from None
        trace.record(ProofPair(scope, nodes, true_vars))
    return trace
