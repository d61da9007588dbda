"""Tests for both solving algorithms."""

import random

import pytest

from qbfkit.formula import InternalError
from qbfkit.parsing import parse_qcir, parse_qdimacs
from qbfkit.solver import (ProofPair, SolveConfig, solve_abstraction,
                           solve_assignment)

from helpers import brute_force, random_problem

EXAMPLE_QCIR = """\
#QCIR-G14
forall(x)
exists(y)
output(f)
g = and(-x, y)
f = or(x, g)
"""

PARITY2_QCIR = """\
#QCIR-G14
exists(x1, x2)
forall(z)
output(root)
a1 = and(x1, -x2)
a2 = and(-x1, x2)
p = or(a1, a2)
n1 = and(x1, x2)
n2 = and(-x1, -x2)
np = or(n1, n2)
c1 = or(z, p)
c2 = or(-z, np)
root = and(c1, c2)
"""


def test_example_is_true_with_expected_trace():
    problem = parse_qcir(EXAMPLE_QCIR)
    (psi2,) = [c for c in problem.arena.payload[problem.matrix]
               if problem.arena.kinds[c] != "lit"]
    value, trace, stats = solve_abstraction(problem)
    assert value is True
    assert trace.pairs == [ProofPair(2, frozenset({psi2}), frozenset({2}))]
    assert stats.refinements == [1, 0]
    assert stats.sat_queries == [2, 2]
    assert stats.total_iterations == 4
    assert stats.wall_time > 0


def test_parity_is_false_with_two_refinements():
    problem = parse_qcir(PARITY2_QCIR)
    c1, c2 = problem.arena.payload[problem.matrix]
    value, trace, stats = solve_abstraction(problem)
    assert value is False
    assert stats.refinements == [2, 0]
    assert {(p.scope, p.nodes) for p in trace.pairs} == {
        (2, frozenset({c1})), (2, frozenset({c2}))}


def test_plain_disjunction_confirms_with_empty_reliance():
    problem = parse_qcir(
        "#QCIR-G14\nexists(x)\nforall(y)\noutput(f)\nf = or(x, y)\n")
    value, trace, stats = solve_abstraction(problem)
    assert value is True
    assert trace.pairs[-1] == ProofPair(1, frozenset(), frozenset({1}))


def test_constant_matrices_and_empty_prefix():
    for text, expected in [("#QCIR-G14\noutput(g)\ng = and()\n", True),
                           ("#QCIR-G14\noutput(g)\ng = or()\n", False)]:
        problem = parse_qcir(text)
        value, trace, stats = solve_abstraction(problem)
        assert value is expected
        assert trace.pairs == []
        assert stats.total_iterations == 0
        value, stats = solve_assignment(problem)
        assert value is expected


def test_unused_inner_block_is_never_visited():
    problem = parse_qdimacs("p cnf 2 1\ne 1 0\na 2 0\n1 0\n")
    value, trace, stats = solve_abstraction(problem)
    assert value is True
    assert stats.sat_queries[1] == 0  # the y block never ran a query


def test_variable_used_only_inside():
    problem = parse_qdimacs("p cnf 2 1\na 1 0\ne 2 0\n2 0\n")
    value, _, _ = solve_abstraction(problem)
    assert value is True
    value, _ = solve_assignment(problem)
    assert value is True


def test_trace_recording_can_be_disabled():
    problem = parse_qcir(EXAMPLE_QCIR)
    value, trace, _ = solve_abstraction(problem, SolveConfig(record_trace=False))
    assert value is True
    assert trace.pairs == []


def test_expansion_example_and_parity():
    value, stats = solve_assignment(parse_qcir(EXAMPLE_QCIR))
    assert value is True
    value, stats = solve_assignment(parse_qcir(PARITY2_QCIR))
    assert value is False
    assert stats.refinements[0] == 4  # one proposal per x-assignment


def test_solvers_agree_with_brute_force():
    rng = random.Random(2024)
    checked = 0
    while checked < 150:
        problem = random_problem(rng)
        expected = brute_force(problem)
        value, trace, _ = solve_abstraction(problem)
        assert value is expected, parse_failure(problem, expected, value)
        value, _ = solve_assignment(problem)
        assert value is expected
        checked += 1


def parse_failure(problem, expected, got):
    from qbfkit.parsing import write_qcir
    return f"expected {expected}, got {got} on:\n{write_qcir(problem)}"


def test_config_variants_agree_with_brute_force():
    rng = random.Random(77)
    for flags in (SolveConfig(adjust=False), SolveConfig(shrink_cores=True),
                  SolveConfig(adjust=False, shrink_cores=True)):
        checked = 0
        while checked < 40:
            problem = random_problem(rng)
            expected = brute_force(problem)
            value, _, _ = solve_abstraction(problem, flags)
            assert value is expected, parse_failure(problem, expected, value)
            checked += 1


def test_runs_are_deterministic():
    problem = parse_qcir(PARITY2_QCIR)
    first = solve_abstraction(problem)
    second = solve_abstraction(parse_qcir(PARITY2_QCIR))
    assert first[0] == second[0]
    assert first[1].pairs == second[1].pairs
    assert first[2].sat_queries == second[2].sat_queries


def test_trace_for_scope_filters_pairs():
    problem = parse_qcir(PARITY2_QCIR)
    _, trace, _ = solve_abstraction(problem)
    assert trace.for_scope(1) == []
    assert len(trace.for_scope(2)) == 2
