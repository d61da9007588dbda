"""NNF formula arena, prenex quantifier prefix, and assignment algebra."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

LIT = "lit"
AND = "and"
OR = "or"
TRUE = "true"
FALSE = "false"

_DUAL = {AND: OR, OR: AND, TRUE: FALSE, FALSE: TRUE}
_NEUTRAL = {AND: TRUE, OR: FALSE}
_ABSORBING = {AND: FALSE, OR: TRUE}


class InternalError(Exception):
    """An internal invariant was violated; any result would be untrustworthy."""


class Quantifier(Enum):
    EXISTS = "e"
    FORALL = "a"

    @property
    def complement(self) -> "Quantifier":
        return Quantifier.FORALL if self is Quantifier.EXISTS else Quantifier.EXISTS


class Arena:
    """Append-only store of NNF nodes.

    Every occurrence of a subformula gets its own slot: the matrix is a tree,
    not a DAG, so positional identity is stable under negation and per-scope
    encoding. Constants may exist in the arena but `build` folds them away, so
    they never remain inside a normalized matrix.
    """

    __slots__ = ("kinds", "payload", "shape")

    def __init__(self) -> None:
        self.kinds: list[str] = []
        # literal for "lit" nodes, child tuple for "and"/"or", () for constants
        self.payload: list = []
        self.shape: list[int] = []

    def __len__(self) -> int:
        return len(self.kinds)

    def _add(self, kind: str, payload, shape: int) -> int:
        self.kinds.append(kind)
        self.payload.append(payload)
        self.shape.append(shape)
        return len(self.kinds) - 1

    def kind(self, node: int) -> str:
        return self.kinds[node]

    def children(self, node: int) -> tuple[int, ...]:
        if self.kinds[node] == LIT:
            return ()
        return self.payload[node]

    def literal(self, node: int) -> int:
        if self.kinds[node] != LIT:
            raise ValueError(f"node {node} is not a literal")
        return self.payload[node]

    def lit(self, literal: int) -> int:
        """Create a literal leaf. `literal` is a signed variable id."""
        if literal == 0:
            raise ValueError("literal must be a nonzero signed variable id")
        return self._add(LIT, literal, hash((LIT, literal)))

    def const(self, value: bool) -> int:
        kind = TRUE if value else FALSE
        return self._add(kind, (), hash(kind))

    def build(self, kind: str, children) -> int:
        """Normalizing constructor for And/Or nodes.

        Flattens same-connective children, folds constants, removes
        structurally duplicate children, and collapses trivial arities, so the
        result satisfies the matrix invariants (no constant inside, no nested
        same connective, >= 2 distinct children).
        """
        if kind not in (AND, OR):
            raise ValueError(f"build expects '{AND}' or '{OR}', got {kind!r}")
        neutral, absorbing = _NEUTRAL[kind], _ABSORBING[kind]
        flat: list[int] = []
        for child in children:
            ck = self.kinds[child]
            if ck == kind:
                flat.extend(self.payload[child])
            elif ck == neutral:
                continue
            elif ck == absorbing:
                return child
            else:
                flat.append(child)
        kept: list[int] = []
        by_shape: dict[int, list[int]] = {}
        for child in flat:
            bucket = by_shape.setdefault(self.shape[child], [])
            if any(structural_equal(self, child, self, seen) for seen in bucket):
                continue
            bucket.append(child)
            kept.append(child)
        if not kept:
            return self._add(neutral, (), hash(neutral))
        if len(kept) == 1:
            return kept[0]
        shape = hash((kind, tuple(self.shape[c] for c in kept)))
        return self._add(kind, tuple(kept), shape)

    def negated(self, node: int) -> int:
        """Build the NNF negation of `node` as fresh nodes (De Morgan)."""
        kind = self.kinds[node]
        if kind == LIT:
            return self.lit(-self.payload[node])
        if kind in (TRUE, FALSE):
            return self.const(kind == FALSE)
        return self.build(_DUAL[kind], [self.negated(c) for c in self.payload[node]])


def structural_equal(arena_a: Arena, a: int, arena_b: Arena, b: int) -> bool:
    """Structural (shape and literal) equality, ignoring node identity."""
    if arena_a is arena_b and a == b:
        return True
    if arena_a.shape[a] != arena_b.shape[b]:
        return False
    ka, kb = arena_a.kinds[a], arena_b.kinds[b]
    if ka != kb:
        return False
    if ka == LIT:
        return arena_a.payload[a] == arena_b.payload[b]
    if ka in (TRUE, FALSE):
        return True
    ca, cb = arena_a.payload[a], arena_b.payload[b]
    if len(ca) != len(cb):
        return False
    return all(structural_equal(arena_a, x, arena_b, y) for x, y in zip(ca, cb))


def copy_into(dst: Arena, src: Arena, node: int, negate: bool = False) -> int:
    """Copy a subtree into another arena, optionally negating it."""
    kind = src.kinds[node]
    if kind == LIT:
        lit = src.payload[node]
        return dst.lit(-lit if negate else lit)
    if kind in (TRUE, FALSE):
        return dst.const((kind == TRUE) != negate)
    out_kind = _DUAL[kind] if negate else kind
    return dst.build(out_kind, [copy_into(dst, src, c, negate) for c in src.payload[node]])


def subformulas(arena: Arena, node: int) -> list[int]:
    """All subformula occurrences of `node`, in deterministic preorder."""
    out: list[int] = []
    stack = [node]
    while stack:
        n = stack.pop()
        out.append(n)
        if arena.kinds[n] in (AND, OR):
            stack.extend(reversed(arena.payload[n]))
    return out


def direct_subformulas(arena: Arena, node: int) -> tuple[int, ...]:
    return arena.children(node)


def node_vars(arena: Arena, node: int) -> set[int]:
    """Variables occurring in the subtree rooted at `node`."""
    out: set[int] = set()
    for n in subformulas(arena, node):
        if arena.kinds[n] == LIT:
            out.add(abs(arena.payload[n]))
    return out


def evaluate(arena: Arena, node: int, values) -> int:
    """Evaluate under a total assignment (mapping var -> 0/1).

    Raises ValueError when a variable of the subtree is unassigned.
    """
    kind = arena.kinds[node]
    if kind == TRUE:
        return 1
    if kind == FALSE:
        return 0
    if kind == LIT:
        lit = arena.payload[node]
        val = values.get(abs(lit))
        if val is None:
            raise ValueError(f"variable {abs(lit)} is unassigned")
        return int(bool(val)) if lit > 0 else 1 - int(bool(val))
    if kind == AND:
        result = 1
        for c in arena.payload[node]:
            result &= evaluate(arena, c, values)
        return result
    result = 0
    for c in arena.payload[node]:
        result |= evaluate(arena, c, values)
    return result


@dataclass
class PartialAssignment:
    """Three-valued assignment over a fixed variable domain.

    Values are 0, 1, or None (undefined). The domain is the key set of
    `values` and is fixed at construction.
    """

    values: dict[int, int | None]

    @classmethod
    def total(cls, mapping) -> "PartialAssignment":
        return cls({v: int(bool(x)) for v, x in mapping.items()})

    @classmethod
    def undefined(cls, domain) -> "PartialAssignment":
        return cls({v: None for v in domain})

    @classmethod
    def of(cls, domain, defined) -> "PartialAssignment":
        vals: dict[int, int | None] = {v: None for v in domain}
        for v, x in defined.items():
            if v not in vals:
                raise ValueError(f"variable {v} outside the domain")
            vals[v] = int(bool(x))
        return cls(vals)

    @property
    def domain(self) -> frozenset[int]:
        return frozenset(self.values)

    def __getitem__(self, var: int) -> int | None:
        return self.values[var]

    def defined_items(self) -> dict[int, int]:
        return {v: x for v, x in self.values.items() if x is not None}

    def true_vars(self) -> set[int]:
        return {v for v, x in self.values.items() if x == 1}

    def compatible_with(self, other: "PartialAssignment") -> bool:
        """Whether self refines into `other`: same domain, defined entries agree."""
        if self.domain != other.domain:
            return False
        return all(other.values[v] == x for v, x in self.values.items() if x is not None)

    def combine(self, other: "PartialAssignment") -> "PartialAssignment":
        """Union of two assignments over disjoint domains."""
        if self.domain & other.domain:
            raise ValueError("combine requires disjoint domains")
        merged = dict(self.values)
        merged.update(other.values)
        return PartialAssignment(merged)

    def complement(self) -> "PartialAssignment":
        """Flip every defined value; undefined entries stay undefined."""
        return PartialAssignment(
            {v: (None if x is None else 1 - x) for v, x in self.values.items()}
        )

    def restrict(self, domain) -> "PartialAssignment":
        dom = set(domain)
        return PartialAssignment({v: x for v, x in self.values.items() if v in dom})


@dataclass(frozen=True)
class Scope:
    """One maximal quantifier block of the prefix."""

    quantifier: Quantifier
    vars: tuple[int, ...]


def merge_adjacent(scopes) -> list[Scope]:
    """Merge adjacent blocks with the same quantifier, dropping empty ones."""
    merged: list[Scope] = []
    for scope in scopes:
        if not scope.vars:
            continue
        if merged and merged[-1].quantifier is scope.quantifier:
            merged[-1] = Scope(scope.quantifier, merged[-1].vars + scope.vars)
        else:
            merged.append(scope)
    return merged


@dataclass
class QbfProblem:
    """A closed prenex NNF problem: prefix plus matrix over an arena."""

    arena: Arena
    prefix: list[Scope]
    matrix: int
    var_names: dict[int, str]
    var_scope: dict[int, int] = field(default_factory=dict)
    # parser provenance: arena node -> originating QCIR gate id (informational)
    node_gate: dict[int, int] = field(default_factory=dict)

    @classmethod
    def make(cls, arena: Arena, prefix, matrix: int,
             var_names: dict[int, str] | None = None,
             node_gate: dict[int, int] | None = None) -> "QbfProblem":
        prefix = list(prefix)
        var_scope: dict[int, int] = {}
        for index, scope in enumerate(prefix, start=1):
            if not scope.vars:
                raise ValueError(f"scope {index} is empty")
            for v in scope.vars:
                if v in var_scope:
                    raise ValueError(f"variable {v} bound twice")
                var_scope[v] = index
        unbound = node_vars(arena, matrix) - set(var_scope)
        if unbound:
            raise ValueError(f"unbound matrix variables: {sorted(unbound)}")
        names = dict(var_names or {})
        for v in var_scope:
            names.setdefault(v, str(v))
        return cls(arena, prefix, matrix, names, var_scope, dict(node_gate or {}))

    @property
    def scope_count(self) -> int:
        return len(self.prefix)

    def quantifier_of(self, var: int) -> Quantifier:
        return self.prefix[self.var_scope[var] - 1].quantifier

    def all_vars(self) -> list[int]:
        """All prefix variables, outermost scope first."""
        return [v for scope in self.prefix for v in scope.vars]

    def matrix_constant(self) -> bool | None:
        """The matrix's truth value when it folded to a constant, else None."""
        kind = self.arena.kinds[self.matrix]
        if kind == TRUE:
            return True
        if kind == FALSE:
            return False
        return None


def dependencies(problem: QbfProblem, var: int) -> list[int]:
    """Variables the certificate function for `var` may depend on.

    Existential variables depend on outer universals, universal variables on
    outer existentials; the problem being closed, there are no free variables.
    """
    scope_index = problem.var_scope.get(var)
    if scope_index is None:
        raise ValueError(f"variable {var} is not bound by the prefix")
    want = problem.prefix[scope_index - 1].quantifier.complement
    deps: list[int] = []
    for scope in problem.prefix[: scope_index - 1]:
        if scope.quantifier is want:
            deps.extend(scope.vars)
    return deps


def problems_equal(a: QbfProblem, b: QbfProblem) -> bool:
    """Structural equality by variable name: prefix shape and matrix shape."""
    if len(a.prefix) != len(b.prefix):
        return False
    for sa, sb in zip(a.prefix, b.prefix):
        if sa.quantifier is not sb.quantifier:
            return False
        if tuple(a.var_names[v] for v in sa.vars) != tuple(b.var_names[v] for v in sb.vars):
            return False

    def eq(na: int, nb: int) -> bool:
        ka, kb = a.arena.kinds[na], b.arena.kinds[nb]
        if ka != kb:
            return False
        if ka == LIT:
            la, lb = a.arena.payload[na], b.arena.payload[nb]
            if (la > 0) != (lb > 0):
                return False
            return a.var_names[abs(la)] == b.var_names[abs(lb)]
        if ka in (TRUE, FALSE):
            return True
        ca, cb = a.arena.payload[na], b.arena.payload[nb]
        return len(ca) == len(cb) and all(eq(x, y) for x, y in zip(ca, cb))

    return eq(a.matrix, b.matrix)
