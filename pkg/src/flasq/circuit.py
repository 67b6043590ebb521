"""Logical circuit representation on a 2D grid of surface code patches.

A :class:`Circuit` is an immutable, ordered list of :class:`Gate` applications
acting on named qubits that sit at fixed :class:`GridCoord` positions. Data
qubits are live for the whole circuit; algorithmic ancillae are live between
an explicit ``Alloc`` and ``Dealloc`` marker.
"""

from __future__ import annotations

import dataclasses
import enum
import functools
import json
from collections.abc import Callable, Iterable, Mapping
from pathlib import Path
from typing import Any

import networkx as nx

from flasq.exceptions import CircuitValidationError


@dataclasses.dataclass(frozen=True, order=True)
class GridCoord:
    """Integer position of a logical patch on the 2D grid."""

    row: int
    col: int

    def __str__(self) -> str:
        return f"({self.row}, {self.col})"


class QubitKind(str, enum.Enum):
    DATA = "data"
    ANCILLA = "ancilla"


class GateKind(str, enum.Enum):
    """Primitive operations understood by the cost model."""

    X = "X"
    Y = "Y"
    Z = "Z"
    MEASURE_X = "MeasureX"
    MEASURE_Z = "MeasureZ"
    MEASURE_Y = "MeasureY"
    INIT_X = "InitX"
    INIT_Z = "InitZ"
    INIT_Y = "InitY"
    H = "H"
    S = "S"
    SDG = "Sdg"
    T = "T"
    TDG = "Tdg"
    TX = "TX"
    TXDG = "TXdg"
    RZ = "Rz"
    RX = "Rx"
    MOVE = "Move"
    CNOT = "CNOT"
    CZ = "CZ"
    SWAP = "SWAP"
    AND = "And"
    AND_DG = "AndDg"
    TOFFOLI = "Toffoli"
    ALLOC = "Alloc"
    DEALLOC = "Dealloc"

    @property
    def arity(self) -> int:
        return _ARITY.get(self, 1)

    @property
    def is_rotation(self) -> bool:
        return self in (GateKind.RZ, GateKind.RX)


_ARITY = {
    GateKind.MOVE: 2,
    GateKind.CNOT: 2,
    GateKind.CZ: 2,
    GateKind.SWAP: 2,
    GateKind.AND: 3,
    GateKind.AND_DG: 3,
    GateKind.TOFFOLI: 3,
}


@dataclasses.dataclass(frozen=True)
class Qubit:
    """A named logical qubit and its (static) grid position."""

    id: str
    coord: GridCoord
    kind: QubitKind = QubitKind.DATA


@dataclasses.dataclass(frozen=True)
class Gate:
    """One gate application.

    Attributes:
        kind: The primitive operation.
        targets: Qubit ids in the order the cost formulas expect. For ``And``
            and ``AndDg`` this is ``(control, control, target)``; for
            ``CNOT`` it is ``(control, target)``.
        epsilon: Diamond-norm synthesis error, only for ``Rz`` and ``Rx``.
    """

    kind: GateKind
    targets: tuple[str, ...]
    epsilon: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        object.__setattr__(self, "targets", tuple(self.targets))


@dataclasses.dataclass(frozen=True)
class Diagnostic:
    """A single validation problem. ``seq`` is None for declaration-level issues."""

    seq: int | None
    reason: str

    def __str__(self) -> str:
        where = "declarations" if self.seq is None else f"op {self.seq}"
        return f"{where}: {self.reason}"


@dataclasses.dataclass(frozen=True)
class Circuit:
    """An ordered gate list over grid-positioned qubits.

    The position of a gate in ``ops`` is its sequence number.
    """

    qubits: tuple[Qubit, ...]
    ops: tuple[Gate, ...]
    name: str = "circuit"

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        object.__setattr__(self, "ops", tuple(self.ops))

    @functools.cached_property
    def layout(self) -> dict[str, GridCoord]:
        return {q.id: q.coord for q in self.qubits}

    @functools.cached_property
    def kinds(self) -> dict[str, QubitKind]:
        return {q.id: q.kind for q in self.qubits}

    def __len__(self) -> int:
        return len(self.ops)

    def to_dict(self) -> dict[str, Any]:
        ops = []
        for g in self.ops:
            params = {} if g.epsilon is None else {"epsilon": g.epsilon}
            ops.append({"kind": g.kind.value, "targets": list(g.targets), "params": params})
        return {
            "name": self.name,
            "qubits": [
                {"id": q.id, "kind": q.kind.value, "row": q.coord.row, "col": q.coord.col}
                for q in self.qubits
            ],
            "ops": ops,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> Circuit:
        qubits = tuple(
            Qubit(str(q["id"]), GridCoord(int(q["row"]), int(q["col"])), QubitKind(q["kind"]))
            for q in data.get("qubits", [])
        )
        ops = tuple(
            Gate(GateKind(o["kind"]), tuple(o["targets"]), (o.get("params") or {}).get("epsilon"))
            for o in data.get("ops", [])
        )
        return cls(qubits, ops, data.get("name", "circuit"))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> Circuit:
        return cls.from_dict(json.loads(text))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path: str | Path) -> Circuit:
        return cls.from_json(Path(path).read_text())


class CircuitBuilder:
    """Incrementally assemble a :class:`Circuit`.

    Example:
        >>> b = CircuitBuilder("demo")
        >>> b.add_qubit("a", GridCoord(0, 0)); b.add_qubit("b", GridCoord(0, 1))
        >>> b.apply(GateKind.CNOT, "a", "b")
        >>> len(b.build())
        1
    """

    def __init__(self, name: str = "circuit"):
        self.name = name
        self._qubits: dict[str, Qubit] = {}
        self._ops: list[Gate] = []

    def add_qubit(self, qid: str, coord: GridCoord, kind: QubitKind = QubitKind.DATA) -> str:
        if qid in self._qubits:
            raise ValueError(f"duplicate qubit id {qid!r}")
        self._qubits[qid] = Qubit(qid, coord, kind)
        return qid

    def apply(self, kind: GateKind, *targets: str, epsilon: float | None = None) -> None:
        self._ops.append(Gate(kind, targets, epsilon))

    def alloc(self, qid: str, coord: GridCoord) -> str:
        """Declare an algorithmic ancilla and emit its ``Alloc`` marker."""
        self.add_qubit(qid, coord, QubitKind.ANCILLA)
        self._ops.append(Gate(GateKind.ALLOC, (qid,)))
        return qid

    def dealloc(self, qid: str) -> None:
        self._ops.append(Gate(GateKind.DEALLOC, (qid,)))

    def build(self) -> Circuit:
        return Circuit(tuple(self._qubits.values()), tuple(self._ops), self.name)


def validate(circuit: Circuit) -> list[Diagnostic]:
    """Check every structural invariant, returning one diagnostic per violation."""
    diags: list[Diagnostic] = []
    ids: dict[str, Qubit] = {}
    for q in circuit.qubits:
        if q.id in ids:
            diags.append(Diagnostic(None, f"duplicate qubit id {q.id!r}"))
        ids[q.id] = q

    occupied: dict[GridCoord, str] = {}
    for q in circuit.qubits:
        if q.kind is QubitKind.DATA:
            if q.coord in occupied:
                diags.append(Diagnostic(
                    None, f"qubits {occupied[q.coord]!r} and {q.id!r} share coordinate {q.coord}"))
            else:
                occupied[q.coord] = q.id

    state: dict[str, str] = {}  # ancilla id -> "live" | "dead"
    for seq, gate in enumerate(circuit.ops):
        if len(gate.targets) != gate.kind.arity:
            diags.append(Diagnostic(
                seq, f"{gate.kind.value} expects {gate.kind.arity} targets, got {len(gate.targets)}"))
            continue
        if len(set(gate.targets)) != len(gate.targets):
            diags.append(Diagnostic(seq, f"repeated target in {gate.kind.value}{gate.targets}"))
            continue
        if gate.kind.is_rotation:
            if gate.epsilon is None or not 0 < gate.epsilon < 1:
                diags.append(Diagnostic(seq, f"{gate.kind.value} needs epsilon in (0, 1), got {gate.epsilon}"))
        elif gate.epsilon is not None:
            diags.append(Diagnostic(seq, f"{gate.kind.value} takes no epsilon"))
        unknown = [t for t in gate.targets if t not in ids]
        if unknown:
            diags.append(Diagnostic(seq, f"unknown qubit {unknown[0]!r}"))
            continue

        if gate.kind in (GateKind.ALLOC, GateKind.DEALLOC):
            q = ids[gate.targets[0]]
            if q.kind is not QubitKind.ANCILLA:
                diags.append(Diagnostic(seq, f"{gate.kind.value} on data qubit {q.id!r}"))
                continue
            st = state.get(q.id)
            if gate.kind is GateKind.ALLOC:
                if st is not None:
                    diags.append(Diagnostic(seq, f"ancilla {q.id!r} allocated twice"))
                    continue
                state[q.id] = "live"
                holder = occupied.get(q.coord)
                if holder is not None:
                    diags.append(Diagnostic(
                        seq, f"ancilla {q.id!r} allocated at {q.coord} occupied by {holder!r}"))
                else:
                    occupied[q.coord] = q.id
            else:
                if st != "live":
                    what = "never allocated" if st is None else "already deallocated"
                    diags.append(Diagnostic(seq, f"dealloc of ancilla {q.id!r} {what}"))
                    continue
                state[q.id] = "dead"
                if occupied.get(q.coord) == q.id:
                    del occupied[q.coord]
            continue

        for t in gate.targets:
            if ids[t].kind is QubitKind.ANCILLA and state.get(t) != "live":
                what = "before allocation" if t not in state else "after deallocation"
                diags.append(Diagnostic(seq, f"{gate.kind.value} uses ancilla {t!r} {what}"))
    return diags


def check(circuit: Circuit) -> None:
    """Raise :class:`CircuitValidationError` if ``validate`` reports anything."""
    diags = validate(circuit)
    if diags:
        raise CircuitValidationError(diags)


def predecessor_lists(circuit: Circuit) -> list[tuple[int, ...]]:
    """For each op, the distinct ops that last touched one of its qubits."""
    last: dict[str, int] = {}
    preds: list[tuple[int, ...]] = []
    for seq, gate in enumerate(circuit.ops):
        p = {last[t] for t in gate.targets if t in last}
        preds.append(tuple(sorted(p)))
        for t in gate.targets:
            last[t] = seq
    return preds


def build_compute_dag(
    circuit: Circuit, weight: Callable[[Gate], float] | None = None
) -> nx.DiGraph:
    """Return the qubit-sharing precedence DAG of ``circuit``.

    Nodes are op sequence numbers carrying ``gate`` and ``weight`` attributes.
    An edge ``i -> j`` with attribute ``qubits`` exists when ``j`` is the next
    op after ``i`` on at least one qubit.

    Args:
        circuit: A valid circuit.
        weight: Node weight function. Defaults to the cost model's
            measurement depth.

    Raises:
        CircuitValidationError: if the circuit is malformed.
    """
    check(circuit)
    if weight is None:
        from flasq.cost_model import measurement_depth

        weight = measurement_depth
    dag = nx.DiGraph()
    last: dict[str, int] = {}
    for seq, gate in enumerate(circuit.ops):
        dag.add_node(seq, gate=gate, weight=float(weight(gate)))
        for t in gate.targets:
            if t in last:
                prev = last[t]
                if dag.has_edge(prev, seq):
                    dag.edges[prev, seq]["qubits"].append(t)
                else:
                    dag.add_edge(prev, seq, qubits=[t])
            last[t] = seq
    return dag


def count_kinds(ops: Iterable[Gate]) -> dict[GateKind, int]:
    counts: dict[GateKind, int] = {}
    for g in ops:
        counts[g.kind] = counts.get(g.kind, 0) + 1
    return counts
