"""Boolean circuits over and/or/not with named inputs.

Gates are ``(kind, inputs)`` pairs indexed by position; every gate's inputs
precede it, so the gate list is a topological order. The builder hash-conses
gates and folds constants, which keeps translations of numerals and static
index computations from producing dead logic.

Two evaluators are provided: a forward one that runs over the gate list with
Python integers as bit-parallel lanes (one lane per assignment), and an
independent demand-driven one that starts from the output and recomputes
gates on an explicit stack.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass

CONST0, CONST1, INPUT, AND, OR, NOT = "const0", "const1", "input", "and", "or", "not"
KINDS = (CONST0, CONST1, INPUT, AND, OR, NOT)


class CircuitError(ValueError):
    pass


class MissingInput(CircuitError):
    pass


class Builder:
    """Incremental circuit construction with hash-consing."""

    def __init__(self):
        self.gates: list[tuple[str, tuple]] = []
        self.table: dict = {}
        self.inputs: dict[str, int] = {}
        self.names: dict[int, str] = {}
        self.neg: dict[int, int] = {}
        self.FALSE = self._make(CONST0, ())
        self.TRUE = self._make(CONST1, ())

    def _make(self, kind, ins):
        key = (kind, ins)
        g = self.table.get(key)
        if g is None:
            g = len(self.gates)
            self.gates.append(key)
            self.table[key] = g
        return g

    def input(self, name: str) -> int:
        if name in self.inputs:
            return self.inputs[name]
        g = len(self.gates)
        self.gates.append((INPUT, ()))
        self.inputs[name] = g
        self.names[g] = name
        return g

    def const(self, b) -> int:
        return self.TRUE if b else self.FALSE

    def not_(self, x: int) -> int:
        if x == self.TRUE:
            return self.FALSE
        if x == self.FALSE:
            return self.TRUE
        kind, ins = self.gates[x]
        if kind == NOT:
            return ins[0]
        g = self._make(NOT, (x,))
        self.neg[x] = g
        self.neg[g] = x
        return g

    def _nary(self, kind, xs, unit, zero):
        ins = set()
        for x in xs:
            if x == zero:
                return zero
            if x != unit:
                ins.add(x)
        if not ins:
            return unit
        for x in ins:
            if self.neg.get(x) in ins:
                return zero
        if len(ins) == 1:
            return next(iter(ins))
        return self._make(kind, tuple(sorted(ins)))

    def and_(self, *xs) -> int:
        return self._nary(AND, xs, self.TRUE, self.FALSE)

    def or_(self, *xs) -> int:
        return self._nary(OR, xs, self.FALSE, self.TRUE)

    def xor(self, a: int, b: int) -> int:
        return self.or_(self.and_(a, self.not_(b)), self.and_(self.not_(a), b))

    def xnor(self, a: int, b: int) -> int:
        return self.not_(self.xor(a, b))

    def mux(self, s: int, a: int, b: int) -> int:
        """``a`` if ``s`` else ``b``."""
        if s == self.TRUE or a == b:
            return a
        if s == self.FALSE:
            return b
        return self.or_(self.and_(s, a), self.and_(self.not_(s), b))

    def implies(self, a: int, b: int) -> int:
        return self.or_(self.not_(a), b)

    def freeze(self, outputs, meta: dict | None = None) -> "PropCircuit":
        """Compact to the gates reachable from ``outputs`` (inputs are
        always kept) and renumber in creation order."""
        outputs = tuple(outputs)
        live = set(self.inputs.values())
        stack = list(outputs)
        while stack:
            g = stack.pop()
            if g in live:
                continue
            live.add(g)
            stack.extend(self.gates[g][1])
        order = sorted(live)
        new_id = {g: k for k, g in enumerate(order)}
        gates = tuple((self.gates[g][0], tuple(new_id[x] for x in self.gates[g][1])) for g in order)
        inputs = tuple((name, new_id[g]) for name, g in self.inputs.items())
        return PropCircuit(inputs, gates, tuple(new_id[o] for o in outputs), dict(meta or {}))


@dataclass(frozen=True)
class PropCircuit:
    inputs: tuple  # ((name, gate id), ...)
    gates: tuple  # ((kind, input ids), ...) in topological order
    outputs: tuple
    meta: dict

    @property
    def output(self) -> int:
        return self.outputs[0]

    @property
    def input_names(self) -> list[str]:
        return [n for n, _ in self.inputs]

    def size(self) -> int:
        """Number of and/or/not gates."""
        return sum(1 for k, _ in self.gates if k in (AND, OR, NOT))

    def to_json(self) -> dict:
        names = {g: n for n, g in self.inputs}
        gates = []
        for g, (kind, ins) in enumerate(self.gates):
            d = {"id": g, "kind": kind, "inputs": list(ins)}
            if kind == INPUT:
                d["name"] = names[g]
            gates.append(d)
        return {"inputs": [n for n, _ in self.inputs], "outputs": list(self.outputs),
                "gates": gates, "meta": self.meta}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, d: dict) -> "PropCircuit":
        gates, inputs = [], []
        for k, g in enumerate(d["gates"]):
            if g["id"] != k or g["kind"] not in KINDS:
                raise CircuitError(f"bad gate record {g!r}")
            ins = tuple(g["inputs"])
            if any(not 0 <= x < k for x in ins):
                raise CircuitError(f"gate {k} is not in topological order")
            if g["kind"] == INPUT:
                inputs.append((g["name"], k))
            gates.append((g["kind"], ins))
        return cls(tuple(inputs), tuple(gates), tuple(d["outputs"]), dict(d.get("meta", {})))


def _lanes(circuit: PropCircuit, values: dict, mask: int) -> list[int]:
    vals = [0] * len(circuit.gates)
    for name, g in circuit.inputs:
        if name not in values:
            raise MissingInput(f"no value for input {name}")
        vals[g] = values[name] & mask
    for g, (kind, ins) in enumerate(circuit.gates):
        if kind == AND:
            v = mask
            for x in ins:
                v &= vals[x]
            vals[g] = v
        elif kind == OR:
            v = 0
            for x in ins:
                v |= vals[x]
            vals[g] = v
        elif kind == NOT:
            vals[g] = mask ^ vals[ins[0]]
        elif kind == CONST1:
            vals[g] = mask
    return vals


def eval_packed(circuit: PropCircuit, values: dict, width: int) -> list[int]:
    """Evaluate ``width`` assignments at once: bit t of ``values[name]`` is
    the input's value in assignment t. Returns one lane mask per output."""
    mask = (1 << width) - 1
    vals = _lanes(circuit, values, mask)
    return [vals[o] for o in circuit.outputs]


def eval_circuit(circuit: PropCircuit, bits: dict) -> int:
    """Value (0 or 1) of the first output under a complete assignment."""
    return eval_packed(circuit, {k: int(bool(v)) for k, v in bits.items()}, 1)[0]


def eval_demand(circuit: PropCircuit, bits: dict, output: int | None = None) -> int:
    """Independent evaluator: recompute from the output downwards."""
    names = {g: n for n, g in circuit.inputs}
    root = circuit.output if output is None else output
    memo: dict[int, int] = {}
    stack = [root]
    while stack:
        g = stack[-1]
        if g in memo:
            stack.pop()
            continue
        kind, ins = circuit.gates[g]
        pending = [x for x in ins if x not in memo]
        if pending:
            stack.extend(pending)
            continue
        stack.pop()
        if kind == INPUT:
            if names[g] not in bits:
                raise MissingInput(f"no value for input {names[g]}")
            memo[g] = int(bool(bits[names[g]]))
        elif kind == CONST0:
            memo[g] = 0
        elif kind == CONST1:
            memo[g] = 1
        elif kind == NOT:
            memo[g] = 1 - memo[ins[0]]
        elif kind == AND:
            memo[g] = int(all(memo[x] for x in ins))
        else:
            memo[g] = int(any(memo[x] for x in ins))
    return memo[root]


def lane_pattern(k: int, m: int) -> int:
    """Bit t of the result is bit k of t, for t < 2**m."""
    period = 1 << (k + 1)
    unit = ((1 << (1 << k)) - 1) << (1 << k)
    return unit * (((1 << (1 << m)) - 1) // ((1 << period) - 1))


def is_tautology(circuit: PropCircuit, chunk: int = 16) -> tuple[bool, dict | None]:
    """Exhaustive scan of all input assignments of the first output, in
    bit-parallel chunks of 2**chunk assignments. Returns (True, None) or
    (False, counterexample)."""
    names = circuit.input_names
    k = len(names)
    low = min(k, chunk)
    width = 1 << low
    mask = (1 << width) - 1
    base = {names[i]: lane_pattern(i, low) for i in range(low)}
    for hi in range(1 << (k - low)):
        values = dict(base)
        for i in range(low, k):
            values[names[i]] = mask if (hi >> (i - low)) & 1 else 0
        out = eval_packed(circuit, values, width)[0]
        if out != mask:
            t = ((mask ^ out) & -(mask ^ out)).bit_length() - 1
            assignment = (hi << low) | t
            return False, {names[i]: (assignment >> i) & 1 for i in range(k)}
    return True, None


def random_circuit(rng: random.Random, n_inputs: int = 6, n_gates: int = 40) -> PropCircuit:
    """Random circuit without hash-consing shortcuts, for evaluator tests."""
    gates = [(INPUT, ()) for _ in range(n_inputs)]
    gates.append((CONST1, ()))
    for _ in range(n_gates):
        kind = rng.choice((AND, OR, NOT))
        if kind == NOT:
            ins = (rng.randrange(len(gates)),)
        else:
            ins = tuple(rng.sample(range(len(gates)), min(len(gates), rng.randint(2, 4))))
        gates.append((kind, ins))
    inputs = tuple((f"x{i}", i) for i in range(n_inputs))
    return PropCircuit(inputs, tuple(gates), (len(gates) - 1,), {})
