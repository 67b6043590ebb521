"""Circuit-level FLASQ estimate: volume, T-count, depth bound and qubit usage.

The estimate separately enforces two lower bounds on the number of logical
timesteps ``L``: the fluid ancilla must supply the total volume ``V`` with
``A = N_tot - Q`` patches, and every chain of dependent measurements must
wait one reaction time per step.
"""

from __future__ import annotations

import dataclasses
import enum
import heapq
import math
from collections import Counter
from collections.abc import Mapping

from flasq.circuit import Circuit, GateKind, GridCoord, QubitKind, check, predecessor_lists
from flasq.cost_model import (
    CostModelParams,
    Cultivation,
    cost_from_signature,
    gate_path_length,
    gate_t_count,
    integer_rotation_t_count,
    measurement_depth,
)
from flasq.exceptions import InsufficientQubits


class Constraint(str, enum.Enum):
    SPACETIME = "spacetime"
    REACTION = "reaction"


@dataclasses.dataclass(frozen=True)
class FlasqEstimate:
    """Outputs of the FLASQ model for one circuit and one set of parameters.

    Attributes:
        V: Total fluid ancilla volume in blocks.
        M: Expected number of magic states consumed.
        D: Upper bound on measurement depth, in logical timesteps.
        Q: Peak number of simultaneously live circuit qubits.
        A: Fluid ancilla patches, ``N_tot - Q``.
        L: Logical timesteps.
        S: Total spacetime volume in blocks, ``L*Q + V``.
        limiting_constraint: Which bound sets ``L``.
        n_tot: Logical patches available.
        t_react: Reaction time in logical timesteps used for the estimate.
    """

    V: float
    M: float
    D: float
    Q: int
    A: int
    L: float
    S: float
    limiting_constraint: Constraint
    n_tot: int
    t_react: float

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["limiting_constraint"] = self.limiting_constraint.value
        return d


def _layout(circuit: Circuit, layout: Mapping[str, GridCoord] | None) -> Mapping[str, GridCoord]:
    return circuit.layout if layout is None else layout


def ancilla_volume(
    circuit: Circuit,
    params: CostModelParams,
    cultivation: Cultivation | None = None,
    layout: Mapping[str, GridCoord] | None = None,
) -> float:
    """Sum of per-gate ancilla volumes, in blocks."""
    lay = _layout(circuit, layout)
    return math.fsum(
        cost_from_signature(g.kind, g.epsilon, gate_path_length(g, lay), params, cultivation)
        for g in circuit.ops
    )


def t_count(circuit: Circuit, integerize: bool = False) -> float:
    """Total expected T-count.

    Args:
        circuit: The circuit.
        integerize: Round each rotation's T-count up to a whole number.
    """
    total = 0.0
    for g in circuit.ops:
        if integerize and g.kind.is_rotation:
            total += integer_rotation_t_count(g.epsilon)
        else:
            total += gate_t_count(g)
    return total


def _longest_path(weights: list[float], preds: list[tuple[int, ...]]) -> float:
    # ops are already in a topological order of the dependency DAG
    finish = [0.0] * len(weights)
    for i, w in enumerate(weights):
        start = max((finish[p] for p in preds[i]), default=0.0)
        finish[i] = start + w
    return max(finish, default=0.0)


def measurement_depth_bound(circuit: Circuit) -> float:
    """Weighted longest path through the compute DAG (node weight = measurement depth)."""
    check(circuit)
    return _longest_path([measurement_depth(g) for g in circuit.ops], predecessor_lists(circuit))


def _greedy_peak(circuit: Circuit, preds: list[tuple[int, ...]]) -> int:
    n = len(circuit.ops)
    succs: list[list[int]] = [[] for _ in range(n)]
    missing = [len(p) for p in preds]
    for i, ps in enumerate(preds):
        for p in ps:
            succs[p].append(i)
    deallocs: list[int] = []
    normal: list[int] = []
    allocs: list[int] = []

    def push(i: int) -> None:
        kind = circuit.ops[i].kind
        heap = deallocs if kind is GateKind.DEALLOC else allocs if kind is GateKind.ALLOC else normal
        heapq.heappush(heap, i)

    for i in range(n):
        if missing[i] == 0:
            push(i)
    live = sum(1 for q in circuit.qubits if q.kind is QubitKind.DATA)
    peak = live
    while deallocs or normal or allocs:
        heap = deallocs or normal or allocs
        i = heapq.heappop(heap)
        kind = circuit.ops[i].kind
        if kind is GateKind.ALLOC:
            live += 1
            peak = max(peak, live)
        elif kind is GateKind.DEALLOC:
            live -= 1
        for j in succs[i]:
            missing[j] -= 1
            if missing[j] == 0:
                push(j)
    return peak


def maximum_qubit_usage(circuit: Circuit) -> int:
    """Peak live qubit count along a greedy late-allocate, early-free schedule.

    Among ready ops, ``Dealloc`` goes first, then ordinary ops by original
    position, and ``Alloc`` only when nothing else can run.
    """
    check(circuit)
    return _greedy_peak(circuit, predecessor_lists(circuit))


def combine(V: float, M: float, D: float, Q: int, n_tot: int, t_react: float) -> FlasqEstimate:
    """Apply the two timestep bounds to precomputed circuit totals."""
    A = n_tot - Q
    if A <= 0:
        raise InsufficientQubits(Q, n_tot)
    spacetime = V / A
    reaction = t_react * D
    limiting = Constraint.SPACETIME if spacetime >= reaction else Constraint.REACTION
    L = max(spacetime, reaction)
    return FlasqEstimate(V, M, D, Q, A, L, L * Q + V, limiting, n_tot, t_react)


@dataclasses.dataclass(frozen=True)
class CircuitProfile:
    """Parameter-independent summary of a circuit for repeated estimates.

    Gates are grouped by (kind, epsilon, path length) so re-evaluating the
    total volume for a new code distance or cultivation point costs one
    formula evaluation per distinct group.
    """

    name: str
    M: float
    D: float
    Q: int
    groups: tuple[tuple[GateKind, float | None, float, int], ...]
    n_rotations: int

    @classmethod
    def of(cls, circuit: Circuit) -> CircuitProfile:
        check(circuit)
        preds = predecessor_lists(circuit)
        lay = circuit.layout
        counts = Counter((g.kind, g.epsilon, gate_path_length(g, lay)) for g in circuit.ops)
        return cls(
            name=circuit.name,
            M=math.fsum(gate_t_count(g) for g in circuit.ops),
            D=_longest_path([measurement_depth(g) for g in circuit.ops], preds),
            Q=_greedy_peak(circuit, preds),
            groups=tuple((k, e, p, n) for (k, e, p), n in sorted(
                counts.items(), key=lambda kv: (kv[0][0].value, kv[0][1] or 0.0, kv[0][2]))),
            n_rotations=sum(n for (k, _, _), n in counts.items() if k.is_rotation),
        )

    def ancilla_volume(self, params: CostModelParams, cultivation: Cultivation | None) -> float:
        return math.fsum(
            n * cost_from_signature(k, e, p, params, cultivation) for k, e, p, n in self.groups
        )

    def estimate(
        self,
        n_tot: int,
        params: CostModelParams,
        cultivation: Cultivation | None = None,
        reaction_limit: bool = True,
    ) -> FlasqEstimate:
        t_react = params.t_react if reaction_limit else 0.0
        return combine(self.ancilla_volume(params, cultivation), self.M, self.D, self.Q, n_tot, t_react)


def estimate(
    circuit: Circuit,
    n_tot: int,
    params: CostModelParams,
    cultivation: Cultivation | None = None,
    layout: Mapping[str, GridCoord] | None = None,
    reaction_limit: bool = True,
) -> FlasqEstimate:
    """Run the FLASQ model on ``circuit`` with ``n_tot`` logical patches.

    Args:
        circuit: A valid circuit.
        n_tot: Total logical patches on the device.
        params: Cost column and hardware constants.
        cultivation: Cultivation operating point; required if the circuit
            consumes magic states.
        layout: Optional replacement for the circuit's own qubit positions.
        reaction_limit: If False, ignore the reaction-time bound on ``L``.

    Raises:
        InsufficientQubits: if ``n_tot`` does not exceed the peak qubit usage.
    """
    check(circuit)
    preds = predecessor_lists(circuit)
    V = ancilla_volume(circuit, params, cultivation, layout)
    M = math.fsum(gate_t_count(g) for g in circuit.ops)
    D = _longest_path([measurement_depth(g) for g in circuit.ops], preds)
    Q = _greedy_peak(circuit, preds)
    return combine(V, M, D, Q, n_tot, params.t_react if reaction_limit else 0.0)
