"""Tseitin export of a circuit's negation to DIMACS CNF, and an exhaustive
checker for small instances.

Input gates get variables 1..k in input order and are listed in ``c input``
comment lines; every other reachable gate gets a fresh variable defined by
its clauses, and a final unit clause asserts that the output is false. The
CNF is unsatisfiable exactly when the circuit is a tautology.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import AND, CONST0, CONST1, INPUT, NOT, OR, PropCircuit, lane_pattern


@dataclass
class Cnf:
    num_vars: int
    clauses: list  # lists of non-zero ints
    primary: list  # (name, var) of the circuit inputs

    def dimacs(self) -> str:
        lines = [f"c input {name} {v}" for name, v in self.primary]
        lines.append(f"p cnf {self.num_vars} {len(self.clauses)}")
        lines += [" ".join(map(str, cl)) + " 0" for cl in self.clauses]
        return "\n".join(lines) + "\n"


def export_cnf(circuit: PropCircuit, output: int | None = None) -> Cnf:
    root = circuit.output if output is None else output
    live, stack = set(), [root]
    while stack:
        g = stack.pop()
        if g not in live:
            live.add(g)
            stack.extend(circuit.gates[g][1])
    var = {}
    primary = []
    for name, g in circuit.inputs:
        var[g] = len(var) + 1
        primary.append((name, var[g]))
    clauses = []
    for g in sorted(live):
        kind, ins = circuit.gates[g]
        if kind == INPUT:
            continue
        v = var[g] = len(var) + 1
        if kind == CONST1:
            clauses.append([v])
        elif kind == CONST0:
            clauses.append([-v])
        elif kind == NOT:
            a = var[ins[0]]
            clauses += [[-v, -a], [v, a]]
        elif kind == AND:
            clauses += [[-v, var[x]] for x in ins]
            clauses.append([v] + [-var[x] for x in ins])
        elif kind == OR:
            clauses += [[v, -var[x]] for x in ins]
            clauses.append([-v] + [var[x] for x in ins])
    clauses.append([-var[root]])
    return Cnf(len(var), clauses, primary)


def parse_dimacs(text: str) -> Cnf:
    primary, clauses, nv, cur = [], [], 0, []
    for line in text.splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "c":
            if len(parts) == 4 and parts[1] == "input":
                primary.append((parts[2], int(parts[3])))
            continue
        if parts[0] == "p":
            nv = int(parts[2])
            continue
        for tok in parts:
            lit = int(tok)
            if lit == 0:
                clauses.append(cur)
                cur = []
            else:
                cur.append(lit)
    if cur:
        clauses.append(cur)
    return Cnf(nv, clauses, primary)


class Undetermined(ValueError):
    """Unit propagation did not fix every variable from the primary ones."""


def exhaustive_unsat(cnf: Cnf, max_primary: int = 20, chunk: int = 14) -> tuple[bool, dict | None]:
    """Decide satisfiability by enumerating the primary variables and unit
    propagating the rest, all assignments of a chunk in parallel. Returns
    (True, None) if unsatisfiable, else (False, satisfying primary values)."""
    prim = [v for _, v in cnf.primary]
    if len(prim) > max_primary:
        raise ValueError(f"{len(prim)} primary variables exceed the scan limit {max_primary}")
    k = len(prim)
    low = min(k, chunk)
    width = 1 << low
    full = (1 << width) - 1
    for hi in range(1 << (k - low)):
        pos = [0] * (cnf.num_vars + 1)  # lanes where the variable is true
        neg = [0] * (cnf.num_vars + 1)  # lanes where it is false
        for i, v in enumerate(prim):
            if i < low:
                p = lane_pattern(i, low)
            else:
                p = full if (hi >> (i - low)) & 1 else 0
            pos[v], neg[v] = p, full ^ p
        conflict = _propagate(cnf, pos, neg, full)
        open_lanes = full ^ conflict
        for v in range(1, cnf.num_vars + 1):
            if open_lanes & ~(pos[v] | neg[v]) & full:
                raise Undetermined(f"variable {v} is not fixed by propagation")
        if open_lanes:
            t = (open_lanes & -open_lanes).bit_length() - 1
            a = (hi << low) | t
            return False, {name: (a >> i) & 1 for i, (name, _) in enumerate(cnf.primary)}
    return True, None


def _propagate(cnf: Cnf, pos: list, neg: list, full: int) -> int:
    conflict = 0
    changed = True
    while changed:
        changed = False
        for cl in cnf.clauses:
            # lanes where every literal is false, and where all but one are
            false_all = full
            falses = []
            for lit in cl:
                f = neg[lit] if lit > 0 else pos[-lit]
                falses.append(f)
                false_all &= f
            conflict |= false_all
            for idx, lit in enumerate(cl):
                others = full
                for j, f in enumerate(falses):
                    if j != idx:
                        others &= f
                v = abs(lit)
                known = pos[v] | neg[v]
                force = others & ~known & full
                if force:
                    if lit > 0:
                        pos[v] |= force
                    else:
                        neg[v] |= force
                    changed = True
    return conflict
