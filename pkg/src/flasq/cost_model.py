"""Per-gate ancilla volume, T-count and measurement depth.

Volumes are in blocks: one logical patch held for one logical timestep
(``d`` code cycles). Reaction time enters volumes as a number of logical
timesteps multiplied by one logical qubit.
"""

from __future__ import annotations

import csv
import dataclasses
import enum
import io
import math
from collections.abc import Iterable, Mapping
from importlib import resources
from pathlib import Path

from flasq.circuit import Gate, GateKind, GridCoord
from flasq.exceptions import ConfigError, InfeasibleCultivation
from flasq.geometry import manhattan, path3

# Relative tolerance used when matching error rates against tabulated values.
_RATE_RTOL = 1e-9


class Flavor(str, enum.Enum):
    CONSERVATIVE = "conservative"
    OPTIMISTIC = "optimistic"


@dataclasses.dataclass(frozen=True)
class GateConstants:
    """Additive constants and distance coefficients of one cost column."""

    h: float
    s: float
    cultivate_factor: float
    t_overhead: float
    y_basis: float
    move_per_step: float
    cnot_per_step: float
    swap_per_step: float
    and_path: float
    and_const: float
    toffoli_path: float
    toffoli_const: float
    rz_per_t: float
    rz_s: float
    rz_h: float
    rz_const: float


CONSTANTS = {
    Flavor.CONSERVATIVE: GateConstants(
        h=7, s=5.5, cultivate_factor=1.5, t_overhead=6, y_basis=1,
        move_per_step=5, cnot_per_step=5, swap_per_step=6,
        and_path=5, and_const=64, toffoli_path=5, toffoli_const=68,
        rz_per_t=2, rz_s=2, rz_h=2, rz_const=10,
    ),
    Flavor.OPTIMISTIC: GateConstants(
        h=1.5, s=1.5, cultivate_factor=1, t_overhead=2.5, y_basis=0.5,
        move_per_step=2, cnot_per_step=2, swap_per_step=3,
        and_path=2, and_const=36, toffoli_path=2, toffoli_const=39,
        rz_per_t=1, rz_s=7 / 6, rz_h=5 / 6, rz_const=5,
    ),
}


@dataclasses.dataclass(frozen=True)
class CostModelParams:
    """Cost column plus the hardware constants the formulas depend on.

    Attributes:
        flavor: Which column of the gate cost table to use.
        code_distance: Surface code distance ``d``.
        t_cyc: Seconds per surface code cycle.
        t_react_seconds: Decode-and-feedback latency in seconds.
        ignore_distances: Evaluate every distance-dependent term as zero.
    """

    flavor: Flavor = Flavor.CONSERVATIVE
    code_distance: int = 13
    t_cyc: float = 1e-6
    t_react_seconds: float = 10e-6
    ignore_distances: bool = False

    def __post_init__(self):
        object.__setattr__(self, "flavor", Flavor(self.flavor))
        if self.code_distance < 3:
            raise ValueError(f"code distance must be >= 3, got {self.code_distance}")
        if self.t_cyc <= 0:
            raise ValueError(f"t_cyc must be positive, got {self.t_cyc}")
        if self.t_react_seconds < 0:
            raise ValueError(f"t_react_seconds must be non-negative, got {self.t_react_seconds}")

    @property
    def t_react(self) -> float:
        """Reaction time in logical timesteps."""
        return self.t_react_seconds / (self.code_distance * self.t_cyc)

    @property
    def constants(self) -> GateConstants:
        return CONSTANTS[self.flavor]


def block_physical_volume(d: int) -> int:
    """Physical qubit-cycles in one block: ``2(d+1)^2`` qubits for ``d`` cycles."""
    return 2 * (d + 1) ** 2 * d


# -- cultivation -------------------------------------------------------------

@dataclasses.dataclass(frozen=True, order=True)
class CultivationEntry:
    p_phys: float
    p_logical: float
    volume_physical: float
    protocol: str


@dataclasses.dataclass(frozen=True)
class Cultivation:
    """A chosen cultivation operating point.

    Attributes:
        volume_blocks: Expected spacetime volume per attempt-to-success, in blocks
            (before the cost column's cultivation factor).
        p_mag: Logical error of each produced magic state.
    """

    volume_blocks: float
    p_mag: float
    volume_physical: float | None = None
    protocol: str | None = None

    def cultivate_volume(self, flavor: Flavor) -> float:
        return CONSTANTS[Flavor(flavor)].cultivate_factor * self.volume_blocks


_CSV_FIELDS = ("p_phys", "p_logical", "volume_physical", "protocol")


@dataclasses.dataclass(frozen=True)
class CultivationTable:
    """Tabulated expected cultivation cost, keyed by physical and logical error."""

    entries: tuple[CultivationEntry, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(sorted(self.entries)))
        problems = _table_problems(self.entries)
        if problems:
            raise ConfigError("invalid cultivation table: " + "; ".join(problems))

    @classmethod
    def from_rows(cls, rows: Iterable[Mapping[str, object]]) -> CultivationTable:
        entries = []
        for i, row in enumerate(rows, start=2):
            try:
                entries.append(CultivationEntry(
                    float(row["p_phys"]), float(row["p_logical"]),
                    float(row["volume_physical"]), str(row["protocol"]).strip(),
                ))
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"cultivation table line {i}: {exc!r}") from exc
        return cls(tuple(entries))

    @classmethod
    def from_csv_text(cls, text: str) -> CultivationTable:
        reader = csv.DictReader(io.StringIO(text))
        if reader.fieldnames is None or tuple(f.strip() for f in reader.fieldnames) != _CSV_FIELDS:
            raise ConfigError(
                f"cultivation table header must be {','.join(_CSV_FIELDS)}, got {reader.fieldnames}")
        return cls.from_rows(reader)

    @classmethod
    def load(cls, path: str | Path) -> CultivationTable:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"cultivation table not found: {path}")
        return cls.from_csv_text(path.read_text())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(_CSV_FIELDS)
        for e in self.entries:
            w.writerow([f"{e.p_phys:.6e}", f"{e.p_logical:.6e}", f"{e.volume_physical:.6e}", e.protocol])
        return buf.getvalue()

    def physical_rates(self) -> list[float]:
        return sorted({e.p_phys for e in self.entries})


def _table_problems(entries: tuple[CultivationEntry, ...]) -> list[str]:
    problems = []
    if not entries:
        problems.append("table is empty")
    for e in entries:
        if not (e.p_phys > 0 and e.p_logical > 0 and e.volume_physical > 0):
            problems.append(f"non-positive value in {e}")
        if not e.protocol:
            problems.append(f"missing protocol in {e}")
    groups: dict[tuple[float, str], list[CultivationEntry]] = {}
    for e in entries:
        groups.setdefault((e.p_phys, e.protocol), []).append(e)
    for (p, proto), es in groups.items():
        es = sorted(es, key=lambda e: e.p_logical)
        for lo, hi in zip(es, es[1:]):
            if hi.volume_physical > lo.volume_physical:
                problems.append(
                    f"volume increases with p_logical at p_phys={p:g}, protocol {proto}: "
                    f"{lo.p_logical:g}->{hi.p_logical:g}")
    return problems


def default_cultivation_table() -> CultivationTable:
    """The bundled two-entry table anchored at p_phys = 1e-3."""
    text = resources.files("flasq").joinpath("data/cultivation_default.csv").read_text()
    return CultivationTable.from_csv_text(text)


def _leq(a: float, b: float) -> bool:
    return a <= b * (1 + _RATE_RTOL)


def _rounded_up_rate(table: CultivationTable, p_phys: float) -> float:
    rates = [p for p in table.physical_rates() if _leq(p_phys, p)]
    if not rates:
        raise InfeasibleCultivation(
            f"physical error rate {p_phys:g} exceeds every tabulated rate "
            f"(max {max(table.physical_rates()):g})")
    return rates[0]


def cultivation_candidates(table: CultivationTable, p_phys: float, d: int) -> list[Cultivation]:
    """All operating points available at ``p_phys``, cheapest protocol per fidelity.

    ``p_phys`` is rounded up to the nearest tabulated rate. Results are
    ordered by increasing ``p_mag``.
    """
    rate = _rounded_up_rate(table, p_phys)
    best: dict[float, CultivationEntry] = {}
    for e in table.entries:
        if e.p_phys == rate:
            cur = best.get(e.p_logical)
            if cur is None or e.volume_physical < cur.volume_physical:
                best[e.p_logical] = e
    block = block_physical_volume(d)
    return [
        Cultivation(e.volume_physical / block, e.p_logical, e.volume_physical, e.protocol)
        for _, e in sorted(best.items())
    ]


def cultivation_lookup(
    table: CultivationTable, p_phys: float, p_cult_target: float, d: int
) -> Cultivation:
    """Pick the cheapest cultivation meeting ``p_cult_target`` at ``p_phys``.

    The physical rate is rounded up and the target logical rate rounded down
    to tabulated values; ties across protocols go to the smaller volume.

    Raises:
        InfeasibleCultivation: if no tabulated entry satisfies both roundings.
    """
    if not (0 < p_phys < 1 and 0 < p_cult_target < 1):
        raise ValueError("p_phys and p_cult_target must lie in (0, 1)")
    options = [c for c in cultivation_candidates(table, p_phys, d) if _leq(c.p_mag, p_cult_target)]
    if not options:
        raise InfeasibleCultivation(
            f"no cultivation protocol reaches p_logical <= {p_cult_target:g} at p_phys={p_phys:g}")
    return options[-1]


# -- rotation synthesis ------------------------------------------------------

def rotation_t_count(epsilon: float) -> float:
    """Mean T-count of mixed-fallback single-qubit rotation synthesis."""
    if not 0 < epsilon <= 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    return 0.53 * math.log2(1 / epsilon) + 4.86


def integer_rotation_t_count(epsilon: float) -> int:
    """Rotation T-count rounded up to a whole number of T gates."""
    return math.ceil(rotation_t_count(epsilon) - 1e-9)


# -- per-gate costs ----------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class GateCost:
    ancilla_volume: float
    t_count: float
    measurement_depth: float


ZERO_COST = GateCost(0.0, 0.0, 0.0)

_FREE = frozenset({
    GateKind.X, GateKind.Y, GateKind.Z,
    GateKind.MEASURE_X, GateKind.MEASURE_Z, GateKind.INIT_X, GateKind.INIT_Z,
    GateKind.ALLOC, GateKind.DEALLOC,
})
_T_LIKE = frozenset({GateKind.T, GateKind.TDG, GateKind.TX, GateKind.TXDG})
_NEEDS_CULTIVATION = _T_LIKE | {GateKind.RZ, GateKind.RX, GateKind.AND, GateKind.TOFFOLI}


def needs_cultivation(kind: GateKind) -> bool:
    return kind in _NEEDS_CULTIVATION


def gate_path_length(gate: Gate, layout: Mapping[str, GridCoord]) -> float:
    """Routing distance the gate's cost formula refers to (0 for one-qubit gates)."""
    k = gate.kind
    if k in (GateKind.MOVE, GateKind.CNOT, GateKind.CZ, GateKind.SWAP):
        return manhattan(layout[gate.targets[0]], layout[gate.targets[1]])
    if k is GateKind.AND_DG:
        # Measurement-based uncomputation is a CZ between the two controls.
        return manhattan(layout[gate.targets[0]], layout[gate.targets[1]])
    if k in (GateKind.AND, GateKind.TOFFOLI):
        return path3(*(layout[t] for t in gate.targets))
    return 0


def t_gate_volume(params: CostModelParams, cultivation: Cultivation) -> float:
    c = params.constants
    return cultivation.cultivate_volume(params.flavor) + params.t_react + c.t_overhead


def rotation_volume(epsilon: float, params: CostModelParams, cultivation: Cultivation) -> float:
    """Ancilla volume of a synthesized Rz/Rx rotation.

    The two CNOTs coupling the data qubit to its synthesis ancilla are taken
    at unit distance (the ancilla is adjacent by construction).
    """
    c = params.constants
    t = rotation_t_count(epsilon)
    cnot = 0 if params.ignore_distances else c.cnot_per_step
    return (
        t * (c.rz_per_t + t_gate_volume(params, cultivation))
        + c.rz_s * c.s + c.rz_h * c.h + 2 * cnot + c.rz_const
    )


def measurement_depth(gate: Gate) -> float:
    """Measurement depth contributed by ``gate`` on the critical path."""
    k = gate.kind
    if k in _T_LIKE or k is GateKind.AND or k is GateKind.AND_DG:
        return 1.0
    if k is GateKind.TOFFOLI:
        return 2.0
    if k.is_rotation:
        return rotation_t_count(gate.epsilon)
    return 0.0


def gate_t_count(gate: Gate) -> float:
    k = gate.kind
    if k in _T_LIKE:
        return 1.0
    if k in (GateKind.AND, GateKind.TOFFOLI):
        return 4.0
    if k.is_rotation:
        return rotation_t_count(gate.epsilon)
    return 0.0


def cost_from_signature(
    kind: GateKind,
    epsilon: float | None,
    path: float,
    params: CostModelParams,
    cultivation: Cultivation | None,
) -> float:
    """Ancilla volume of a gate described by kind, epsilon and path length."""
    c = params.constants
    if params.ignore_distances:
        path = 0
    if kind in _FREE:
        return 0.0
    if kind in _NEEDS_CULTIVATION and cultivation is None:
        raise InfeasibleCultivation(f"{kind.value} consumes magic states but no cultivation was given")
    if kind is GateKind.H:
        return c.h
    if kind in (GateKind.S, GateKind.SDG):
        return c.s
    if kind in (GateKind.MEASURE_Y, GateKind.INIT_Y):
        return c.y_basis
    if kind in _T_LIKE:
        return t_gate_volume(params, cultivation)
    if kind.is_rotation:
        return rotation_volume(epsilon, params, cultivation)
    if kind is GateKind.MOVE:
        return c.move_per_step * path
    if kind in (GateKind.CNOT, GateKind.CZ, GateKind.AND_DG):
        return c.cnot_per_step * path
    if kind is GateKind.SWAP:
        return c.swap_per_step * path
    if kind is GateKind.AND:
        return (4 * cultivation.cultivate_volume(params.flavor) + 2 * params.t_react
                + c.and_path * path + c.and_const)
    if kind is GateKind.TOFFOLI:
        return (4 * cultivation.cultivate_volume(params.flavor) + 5 * params.t_react
                + c.toffoli_path * path + c.toffoli_const)
    raise ValueError(f"no cost formula for gate kind {kind!r}")


def gate_cost(
    gate: Gate,
    layout: Mapping[str, GridCoord],
    params: CostModelParams,
    cultivation: Cultivation | None = None,
) -> GateCost:
    """Ancilla volume (blocks), T-count and measurement depth of one gate."""
    path = gate_path_length(gate, layout)
    volume = cost_from_signature(gate.kind, gate.epsilon, path, params, cultivation)
    return GateCost(volume, gate_t_count(gate), measurement_depth(gate))
