"""Truth-preserving simplification applied before solving.

Three rules run to a fixpoint:

* structural folding - tautological disjunctions become true, contradictory
  conjunctions become false (constants then fold away entirely),
* forced literals - a literal that is a conjunct of the whole matrix fixes an
  existential variable to its polarity, and makes the problem false when the
  variable is universal,
* pure literals - a variable occurring under one polarity only is fixed to
  the polarity that satisfies its occurrences when existential, and to the
  opposite one when universal.

Every eliminated variable gets a recorded constant value, which is exactly
the certificate function the eliminated variable contributes; certificates of
the reduced problem extend to the original one by adding those constants.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .formula import (AND, FALSE, LIT, OR, TRUE, Arena, QbfProblem, Quantifier,
                      Scope, merge_adjacent, subformulas)


@dataclass
class PreprocessInfo:
    """What preprocessing removed: variable -> its constant function value."""

    eliminated: dict[int, bool] = field(default_factory=dict)
    rounds: int = 0


def _rebuild(dst: Arena, src: Arena, node: int, subst: dict[int, bool]) -> int:
    """Copy a subtree applying a substitution; fold constants and clashes."""
    kind = src.kinds[node]
    if kind == LIT:
        lit = src.payload[node]
        value = subst.get(abs(lit))
        if value is None:
            return dst.lit(lit)
        return dst.const(value if lit > 0 else not value)
    if kind in (TRUE, FALSE):
        return dst.const(kind == TRUE)
    out = dst.build(kind, [_rebuild(dst, src, c, subst) for c in src.payload[node]])
    out_kind = dst.kinds[out]
    if out_kind in (AND, OR):
        lits = {dst.payload[c] for c in dst.payload[out] if dst.kinds[c] == LIT}
        if any(-l in lits for l in lits):
            return dst.const(out_kind == OR)
    return out


def _forced_literals(arena: Arena, matrix: int) -> list[int]:
    """Literals that are conjuncts of the whole matrix."""
    kind = arena.kinds[matrix]
    if kind == LIT:
        return [arena.payload[matrix]]
    if kind == AND:
        return [arena.payload[c] for c in arena.payload[matrix]
                if arena.kinds[c] == LIT]
    return []


def _polarities(arena: Arena, matrix: int) -> tuple[set[int], set[int]]:
    pos: set[int] = set()
    neg: set[int] = set()
    for n in subformulas(arena, matrix):
        if arena.kinds[n] == LIT:
            lit = arena.payload[n]
            (pos if lit > 0 else neg).add(abs(lit))
    return pos, neg


def preprocess(problem: QbfProblem) -> tuple[QbfProblem, PreprocessInfo]:
    """Simplify a problem; the result has the same truth value.

    Variable ids and names carry over unchanged, so certificates for the
    reduced problem talk about the original variables directly.
    """
    info = PreprocessInfo()
    quantifier = {v: problem.quantifier_of(v) for v in problem.all_vars()}
    src, matrix = problem.arena, problem.matrix
    subst: dict[int, bool] = {}
    while True:
        info.rounds += 1
        dst = Arena()
        matrix = _rebuild(dst, src, matrix, subst)
        src = dst
        if src.kinds[matrix] in (TRUE, FALSE):
            break
        subst = {}
        for lit in _forced_literals(src, matrix):
            v = abs(lit)
            if quantifier[v] is Quantifier.EXISTS:
                subst[v] = lit > 0
            else:
                # the universal player falsifies the forced literal
                info.eliminated[v] = not (lit > 0)
                matrix = src.const(False)
                break
        if src.kinds[matrix] == FALSE:
            break
        pos, neg = _polarities(src, matrix)
        for v in pos ^ neg:  # one polarity only
            polarity = v in pos
            if quantifier[v] is Quantifier.EXISTS:
                subst.setdefault(v, polarity)
            else:
                subst.setdefault(v, not polarity)
        if not subst:
            break
        info.eliminated.update(subst)

    prefix = merge_adjacent(
        Scope(s.quantifier, tuple(v for v in s.vars if v not in info.eliminated))
        for s in problem.prefix)
    names = {v: problem.var_names[v] for v in quantifier if v not in info.eliminated}
    reduced = QbfProblem.make(src, prefix, matrix, names)
    return reduced, info
