"""And-inverter graph circuits with ASCII AIGER serialization.

Strategy functions are stored as combinational AIGs in the ``aag`` text
format: literal 0 is the constant false, 1 true, input ``i`` (0-based) gets
literal ``2 * (i + 1)``, and-gates follow the inputs, and negation toggles
the low bit. The symbol table names every input and output after a problem
variable, and a trailing comment section records which kind of strategy the
circuit carries.
"""

from __future__ import annotations

from .parsing import ParseError

FALSE_LIT = 0
TRUE_LIT = 1


def negate(lit: int) -> int:
    return lit ^ 1


class Circuit:
    """A combinational and-inverter graph built bottom-up."""

    def __init__(self):
        self.inputs: list[str] = []
        self._input_lit: dict[str, int] = {}
        self._gates: list[tuple[int, int]] = []  # operand pair per gate
        self._cache: dict[tuple[int, int], int] = {}
        self.outputs: list[tuple[str, int]] = []
        self.kind: str | None = None

    # ------------------------------------------------------------------
    # construction

    def add_input(self, name: str) -> int:
        if name in self._input_lit:
            raise ValueError(f"duplicate input {name!r}")
        lit = 2 * (len(self.inputs) + 1)
        self.inputs.append(name)
        self._input_lit[name] = lit
        return lit

    def input_lit(self, name: str) -> int:
        return self._input_lit[name]

    def and_(self, a: int, b: int) -> int:
        if a > b:
            a, b = b, a
        if a == FALSE_LIT or a == negate(b):
            return FALSE_LIT
        if a == TRUE_LIT or a == b:
            return b
        cached = self._cache.get((a, b))
        if cached is not None:
            return cached
        lit = 2 * (len(self.inputs) + len(self._gates) + 1)
        self._gates.append((a, b))
        self._cache[(a, b)] = lit
        return lit

    def or_(self, a: int, b: int) -> int:
        return negate(self.and_(negate(a), negate(b)))

    def and_many(self, lits) -> int:
        out = TRUE_LIT
        for lit in lits:
            out = self.and_(out, lit)
        return out

    def or_many(self, lits) -> int:
        out = FALSE_LIT
        for lit in lits:
            out = self.or_(out, lit)
        return out

    def add_output(self, name: str, lit: int) -> None:
        self.outputs.append((name, lit))

    @property
    def max_var(self) -> int:
        return len(self.inputs) + len(self._gates)

    @property
    def gates(self) -> list[tuple[int, int, int]]:
        """(lhs, rhs0, rhs1) triples in topological order."""
        first = len(self.inputs) + 1
        return [(2 * (first + i), a, b)
                for i, (a, b) in enumerate(self._gates)]

    # ------------------------------------------------------------------
    # semantics

    def evaluate(self, values: dict[str, bool]) -> dict[str, bool]:
        """Output values under an assignment of the named inputs."""
        val = [False, True] + [None] * (2 * self.max_var)
        for name in self.inputs:
            lit = self._input_lit[name]
            bit = bool(values[name])
            val[lit], val[lit + 1] = bit, not bit
        for lhs, a, b in self.gates:
            bit = val[a] and val[b]
            val[lhs], val[lhs + 1] = bit, not bit
        return {name: val[lit] for name, lit in self.outputs}

    def cone_inputs(self, lit: int) -> set[str]:
        """Names of the inputs the given literal structurally depends on."""
        ninputs = len(self.inputs)
        seen: set[int] = set()
        stack = [lit // 2]
        names: set[str] = set()
        while stack:
            v = stack.pop()
            if v == 0 or v in seen:
                continue
            seen.add(v)
            if v <= ninputs:
                names.add(self.inputs[v - 1])
            else:
                a, b = self._gates[v - ninputs - 1]
                stack.extend((a // 2, b // 2))
        return names


def write_aiger(circuit: Circuit) -> str:
    lines = [f"aag {circuit.max_var} {len(circuit.inputs)} 0 "
             f"{len(circuit.outputs)} {len(circuit._gates)}"]
    lines += [str(circuit.input_lit(name)) for name in circuit.inputs]
    lines += [str(lit) for _, lit in circuit.outputs]
    lines += [f"{lhs} {a} {b}" for lhs, a, b in circuit.gates]
    lines += [f"i{i} {name}" for i, name in enumerate(circuit.inputs)]
    lines += [f"o{i} {name}" for i, (name, _) in enumerate(circuit.outputs)]
    if circuit.kind is not None:
        lines += ["c", circuit.kind]
    return "\n".join(lines) + "\n"


def read_aiger(text: str) -> Circuit:
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty AIGER file")
    header = lines[0].split()
    if len(header) != 6 or header[0] != "aag":
        raise ParseError(f"bad AIGER header: {lines[0]!r}")
    try:
        maxvar, nin, nlatch, nout, nand = (int(tok) for tok in header[1:])
    except ValueError:
        raise ParseError(f"bad AIGER header: {lines[0]!r}") from None
    if nlatch != 0:
        raise ParseError("latches are not supported")
    if maxvar != nin + nand:
        raise ParseError("header size fields are inconsistent")
    body = lines[1:]
    if len(body) < nin + nout + nand:
        raise ParseError("truncated AIGER file")

    circuit = Circuit()
    for i in range(nin):
        lit = _aiger_int(body[i])
        if lit != 2 * (i + 1):
            raise ParseError(f"input {i} has unexpected literal {lit}")
        circuit.add_input(f"i{i}")  # placeholder until the symbol table
    out_lits = [_aiger_int(body[nin + i]) for i in range(nout)]
    defined = nin
    for i in range(nand):
        parts = body[nin + nout + i].split()
        if len(parts) != 3:
            raise ParseError(f"bad and-gate line: {body[nin + nout + i]!r}")
        lhs, a, b = (_aiger_int(p) for p in parts)
        if lhs != 2 * (defined + 1):
            raise ParseError(f"and-gate defines unexpected literal {lhs}")
        if lhs % 2 or a // 2 > defined or b // 2 > defined:
            raise ParseError(f"and-gate {lhs} uses undefined operands")
        circuit._gates.append((min(a, b), max(a, b)))
        defined += 1
    for lit in out_lits:
        if lit // 2 > maxvar:
            raise ParseError(f"output literal {lit} is out of range")

    out_names = [f"o{i}" for i in range(nout)]
    rest = body[nin + nout + nand:]
    comment_at = None
    for offset, line in enumerate(rest):
        if line == "c":
            comment_at = offset
            break
        tag, _, name = line.partition(" ")
        if not name or tag[0] not in "io" or not tag[1:].isdigit():
            raise ParseError(f"bad symbol table entry: {line!r}")
        index = int(tag[1:])
        if tag[0] == "i":
            if index >= nin:
                raise ParseError(f"symbol for unknown input: {line!r}")
            old = circuit.inputs[index]
            if name != old and name in circuit._input_lit:
                raise ParseError(f"duplicate input name {name!r}")
            circuit.inputs[index] = name
            circuit._input_lit[name] = circuit._input_lit.pop(old)
        else:
            if index >= nout:
                raise ParseError(f"symbol for unknown output: {line!r}")
            out_names[index] = name
    circuit.outputs = list(zip(out_names, out_lits))
    if comment_at is not None:
        comment = [ln for ln in rest[comment_at + 1:] if ln.strip()]
        if comment and comment[0] in ("skolem", "herbrand"):
            circuit.kind = comment[0]
    return circuit


def _aiger_int(line: str) -> int:
    try:
        value = int(line)
    except ValueError:
        raise ParseError(f"expected a literal, got {line!r}") from None
    if value < 0:
        raise ParseError(f"negative literal {value}")
    return value
