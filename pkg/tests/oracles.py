"""Brute-force reference implementations used only by the tests.

None of these reuse the production algorithms they check: the Steiner
oracle is an exact dynamic program over the full grid, the depth oracle
enumerates every path of a denser precedence relation, and the qubit-usage
oracle enumerates every topological order.
"""

from __future__ import annotations

import itertools
import math
import random

import numpy as np

from flasq.circuit import Circuit, CircuitBuilder, GateKind, GridCoord


# -- rectilinear Steiner trees ----------------------------------------------

def steiner_optimum(terminals: list[tuple[int, int]]) -> int:
    """Exact rectilinear Steiner tree length (Dreyfus-Wagner on the bounding grid).

    Every point of the bounding box is a candidate Steiner point, which
    contains the Hanan grid and therefore an optimal tree.
    """
    terms = list(dict.fromkeys(terminals))
    if len(terms) <= 1:
        return 0
    rows = [t[0] for t in terms]
    cols = [t[1] for t in terms]
    grid = np.array([(r, c) for r in range(min(rows), max(rows) + 1) for c in range(min(cols), max(cols) + 1)])
    dist = np.abs(grid[:, None, :] - grid[None, :, :]).sum(axis=2).astype(float)
    index = {(int(r), int(c)): i for i, (r, c) in enumerate(grid)}
    k = len(terms)
    full = (1 << k) - 1
    dp = np.full((1 << k, len(grid)), np.inf)
    for i, t in enumerate(terms):
        dp[1 << i] = dist[index[t]]
    for s in range(1, full + 1):
        if s & (s - 1) == 0:
            continue
        merged = np.full(len(grid), np.inf)
        sub = (s - 1) & s
        while sub:
            if sub < (s ^ sub):
                merged = np.minimum(merged, dp[sub] + dp[s ^ sub])
            sub = (sub - 1) & s
        dp[s] = (merged[:, None] + dist).min(axis=0)
    return int(round(dp[full][index[terms[0]]]))


# -- random circuits ----------------------------------------------------------

_ONE_QUBIT = [GateKind.H, GateKind.S, GateKind.T, GateKind.TDG, GateKind.X,
              GateKind.MEASURE_Z, GateKind.RZ, GateKind.RX, GateKind.TX, GateKind.MEASURE_Y]
_TWO_QUBIT = [GateKind.CNOT, GateKind.CZ, GateKind.SWAP, GateKind.MOVE]
_THREE_QUBIT = [GateKind.AND, GateKind.TOFFOLI, GateKind.AND_DG]


def random_circuit(rng: random.Random, max_ops: int = 12, max_data: int = 4, ancilla: bool = True) -> Circuit:
    """A valid random circuit with at most ``max_ops`` ops.

    Ancillae, when used, are allocated, touched, and freed in order so the
    circuit is always valid.
    """
    b = CircuitBuilder("random")
    n_data = rng.randint(1, max_data)
    coords = rng.sample([(r, c) for r in range(4) for c in range(4)], n_data + 3)
    data = [b.add_qubit(f"d{i}", GridCoord(*coords[i])) for i in range(n_data)]
    budget = rng.randint(0, max_ops)
    ops = 0
    live_anc: list[str] = []
    n_anc = 0
    while ops < budget:
        live = data + live_anc
        choice = rng.random()
        if ancilla and choice < 0.12 and n_anc < 3 and ops + 1 < budget:
            q = f"a{n_anc}"
            b.alloc(q, GridCoord(*coords[n_data + n_anc]))
            n_anc += 1
            live_anc.append(q)
        elif ancilla and choice < 0.22 and live_anc:
            q = live_anc.pop(rng.randrange(len(live_anc)))
            b.dealloc(q)
        else:
            pool = _ONE_QUBIT + (_TWO_QUBIT if len(live) >= 2 else []) + (_THREE_QUBIT if len(live) >= 3 else [])
            kind = rng.choice(pool)
            targets = rng.sample(live, kind.arity)
            eps = 10 ** rng.uniform(-12, -1) if kind.is_rotation else None
            b.apply(kind, *targets, epsilon=eps)
        ops += 1
    return b.build()


# -- measurement depth --------------------------------------------------------

def reference_depth(kind: GateKind, epsilon: float | None) -> float:
    if kind in (GateKind.T, GateKind.TDG, GateKind.TX, GateKind.TXDG, GateKind.AND, GateKind.AND_DG):
        return 1.0
    if kind is GateKind.TOFFOLI:
        return 2.0
    if kind in (GateKind.RZ, GateKind.RX):
        return 0.53 * math.log2(1 / epsilon) + 4.86
    return 0.0


def exhaustive_max_path(circuit: Circuit) -> float:
    """Largest node-weight sum over every path of the 'shares a qubit, comes later' relation."""
    n = len(circuit.ops)
    w = [reference_depth(g.kind, g.epsilon) for g in circuit.ops]
    succ = [[j for j in range(i + 1, n) if set(circuit.ops[i].targets) & set(circuit.ops[j].targets)]
            for i in range(n)]
    best = 0.0

    def walk(i: int, acc: float) -> None:
        nonlocal best
        acc += w[i]
        best = max(best, acc)
        for j in succ[i]:
            walk(j, acc)

    for i in range(n):
        walk(i, 0.0)
    return best


# -- qubit usage --------------------------------------------------------------

def min_peak_over_orders(circuit: Circuit) -> int:
    """Smallest achievable peak live-qubit count over all valid schedules."""
    ops = circuit.ops
    n = len(ops)
    before = [{i for i in range(j) if set(ops[i].targets) & set(ops[j].targets)} for j in range(n)]
    n_data = sum(1 for q in circuit.qubits if q.kind.value == "data")
    best = math.inf
    for perm in itertools.permutations(range(n)):
        done: set[int] = set()
        live = peak = n_data
        ok = True
        for j in perm:
            if not before[j] <= done:
                ok = False
                break
            done.add(j)
            if ops[j].kind is GateKind.ALLOC:
                live += 1
                peak = max(peak, live)
            elif ops[j].kind is GateKind.DEALLOC:
                live -= 1
        if ok:
            best = min(best, peak)
    return int(best)


# -- classical reversible simulation ----------------------------------------

def simulate_classical(circuit: Circuit, inputs: dict[str, int], stop_at: int | None = None) -> dict[str, int]:
    """Run the X/CNOT/And/AndDg subset of a circuit on computational basis states.

    Rotations are diagonal and leave basis states unchanged. Raises
    AssertionError if an AND target is not clean or an uncomputation or
    deallocation finds the wrong value.
    """
    state = dict(inputs)
    for seq, g in enumerate(circuit.ops):
        if stop_at is not None and seq >= stop_at:
            break
        t = g.targets
        if g.kind is GateKind.ALLOC:
            state[t[0]] = 0
        elif g.kind is GateKind.DEALLOC:
            assert state.pop(t[0]) == 0, f"op {seq}: ancilla {t[0]} not clean"
        elif g.kind is GateKind.CNOT:
            state[t[1]] ^= state[t[0]]
        elif g.kind is GateKind.X:
            state[t[0]] ^= 1
        elif g.kind is GateKind.AND:
            assert state[t[2]] == 0, f"op {seq}: AND target dirty"
            state[t[2]] = state[t[0]] & state[t[1]]
        elif g.kind is GateKind.AND_DG:
            assert state[t[2]] == state[t[0]] & state[t[1]], f"op {seq}: bad AND uncompute"
            state[t[2]] = 0
        elif g.kind in (GateKind.RZ, GateKind.Z, GateKind.T, GateKind.S):
            pass
        else:
            raise AssertionError(f"op {seq}: {g.kind} is not classical")
    return state
