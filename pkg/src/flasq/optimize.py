"""Grid search over code distance and cultivation operating point, and 2D sweeps."""

from __future__ import annotations

import csv
import dataclasses
import enum
import io
import json
import math
from collections import Counter
from collections.abc import Iterator, Sequence
from concurrent.futures import ProcessPoolExecutor

from flasq.circuit import Circuit
from flasq.cost_model import (
    CostModelParams,
    Cultivation,
    CultivationTable,
    Flavor,
    cultivation_candidates,
)
from flasq.engine import CircuitProfile, FlasqEstimate
from flasq.error_analysis import (
    DEFAULT_SIGMA_FT,
    QecParams,
    clifford_volume,
    p_cyc,
    runtime_report,
)
from flasq.exceptions import AboveThreshold, Infeasible, InfeasibleCultivation

DEFAULT_DISTANCES = tuple(range(3, 36, 2))


class Objective(str, enum.Enum):
    T_PEC = "t_pec"
    T_SUCCESS = "t_success"


@dataclasses.dataclass(frozen=True)
class PecBudget:
    """Residual logical and magic-state errors are removed by PEC.

    Attributes:
        eps_syn_total: Total rotation-synthesis error the circuit was built for.
    """

    eps_syn_total: float = 1e-3

    @property
    def synthesis_budget(self) -> float:
        return self.eps_syn_total


@dataclasses.dataclass(frozen=True)
class EqualThirds:
    """Total error split evenly over synthesis, logical and magic-state errors."""

    eps_total: float = 1e-3

    @property
    def synthesis_budget(self) -> float:
        return self.eps_total / 3


ErrorBudget = PecBudget | EqualThirds


@dataclasses.dataclass(frozen=True)
class OptimizationSpec:
    """Everything the optimizer needs besides the circuit and error rate.

    Attributes:
        n_phys: Physical qubit budget.
        objective: Runtime to minimize.
        d_values: Candidate code distances.
        budget: Error budget regime.
        flavor: Gate cost column.
        t_cyc: Seconds per code cycle.
        t_react_seconds: Reaction time in seconds.
        p_th: Surface code threshold.
        c_cyc: Logical error prefactor.
        sigma: Target standard error for the PEC objective.
        obs_norm: Norm of the measured observable.
    """

    n_phys: int
    objective: Objective = Objective.T_PEC
    d_values: tuple[int, ...] = DEFAULT_DISTANCES
    budget: ErrorBudget = PecBudget()
    flavor: Flavor = Flavor.CONSERVATIVE
    t_cyc: float = 1e-6
    t_react_seconds: float = 10e-6
    p_th: float = 0.01
    c_cyc: float = 0.03
    sigma: float = DEFAULT_SIGMA_FT
    obs_norm: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "objective", Objective(self.objective))
        object.__setattr__(self, "flavor", Flavor(self.flavor))
        object.__setattr__(self, "d_values", tuple(sorted(set(self.d_values))))
        if not self.d_values:
            raise ValueError("d_values must not be empty")

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["objective"] = self.objective.value
        d["flavor"] = self.flavor.value
        d["d_values"] = list(self.d_values)
        d["budget"] = {"mode": type(self.budget).__name__, **dataclasses.asdict(self.budget)}
        return d


@dataclasses.dataclass(frozen=True)
class SweepPoint:
    """Best operating point for one (p_phys, N_phys) cell.

    When ``feasible`` is False all result fields are None and ``reason``
    says which constraint ruled the cell out.
    """

    p_phys: float
    n_phys: int
    feasible: bool
    best_d: int | None = None
    best_p_mag: float | None = None
    n_tot: int | None = None
    L: float | None = None
    S: float | None = None
    M: float | None = None
    runtime_seconds: float | None = None
    reason: str = ""

    @property
    def runtime_hours(self) -> float | None:
        return None if self.runtime_seconds is None else self.runtime_seconds / 3600

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["runtime_hours"] = self.runtime_hours
        return d


@dataclasses.dataclass(frozen=True)
class Candidate:
    """One evaluated (d, cultivation) grid point."""

    d: int
    cultivation: Cultivation | None
    feasible: bool
    objective: float = math.inf
    estimate: FlasqEstimate | None = None
    reason: str = ""


def logical_qubit_budget(n_phys: int, d: int) -> int:
    """Logical patches that fit in ``n_phys`` physical qubits at distance ``d``."""
    return n_phys // (2 * (d + 1) ** 2)


def _rotation_error_sum(profile: CircuitProfile) -> float:
    return math.fsum(n * e for k, e, _, n in profile.groups if k.is_rotation)


def evaluate_grid(
    profile: CircuitProfile, spec: OptimizationSpec, p_phys: float, table: CultivationTable
) -> Iterator[Candidate]:
    """Evaluate every (d, cultivation) pair of the search grid."""
    needs_magic = profile.M > 0
    for d in spec.d_values:
        qec = QecParams(p_phys, d, spec.t_cyc, spec.p_th, spec.c_cyc)
        try:
            pc = p_cyc(qec)
        except AboveThreshold:
            yield Candidate(d, None, False, reason="above threshold")
            continue
        n_tot = logical_qubit_budget(spec.n_phys, d)
        if n_tot <= profile.Q:
            yield Candidate(d, None, False, reason="insufficient qubits")
            continue
        if needs_magic:
            try:
                cults = cultivation_candidates(table, p_phys, d)
            except InfeasibleCultivation:
                yield Candidate(d, None, False, reason="cultivation unavailable")
                continue
        else:
            cults = [None]
        params = CostModelParams(spec.flavor, d, spec.t_cyc, spec.t_react_seconds)
        for cult in cults:
            p_mag = cult.p_mag if cult else 0.0
            if isinstance(spec.budget, EqualThirds) and profile.M * p_mag > spec.budget.eps_total / 3:
                yield Candidate(d, cult, False, reason="cultivation fidelity unreachable")
                continue
            est = profile.estimate(n_tot, params, cult)
            vol_cult = cult.cultivate_volume(spec.flavor) if cult else 0.0
            if isinstance(spec.budget, EqualThirds):
                s_cliff = clifford_volume(est.S, est.M, vol_cult)
                if d * s_cliff * pc > spec.budget.eps_total / 3:
                    yield Candidate(d, cult, False, estimate=est, reason="logical error budget exceeded")
                    continue
            rep = runtime_report(est.L, est.S, est.M, qec, p_mag, vol_cult, spec.sigma, spec.obs_norm)
            value = rep.T_PEC if spec.objective is Objective.T_PEC else rep.T_success
            yield Candidate(d, cult, True, value, est)


def optimize_profile(
    profile: CircuitProfile, spec: OptimizationSpec, p_phys: float, table: CultivationTable
) -> SweepPoint:
    """Best grid point for a precomputed circuit profile.

    Raises:
        Infeasible: if no grid point is feasible; ``reasons`` counts rejections.
    """
    budget = spec.budget.synthesis_budget
    used = _rotation_error_sum(profile)
    if used > budget * (1 + 1e-9):
        raise Infeasible(
            f"rotations use synthesis error {used:.3g}, above the budget {budget:.3g}",
            {"synthesis budget exceeded": 1})
    best: Candidate | None = None
    reasons: Counter[str] = Counter()
    for cand in evaluate_grid(profile, spec, p_phys, table):
        if not cand.feasible:
            reasons[cand.reason] += 1
        elif best is None or cand.objective < best.objective:
            best = cand
    if best is None:
        raise Infeasible(f"no feasible (d, cultivation) point at p_phys={p_phys:g}, N_phys={spec.n_phys}",
                         dict(reasons))
    est = best.estimate
    return SweepPoint(
        p_phys=p_phys, n_phys=spec.n_phys, feasible=True, best_d=best.d,
        best_p_mag=best.cultivation.p_mag if best.cultivation else 0.0,
        n_tot=est.n_tot, L=est.L, S=est.S, M=est.M, runtime_seconds=best.objective,
    )


def optimize(
    circuit: Circuit | CircuitProfile, spec: OptimizationSpec, p_phys: float, table: CultivationTable
) -> SweepPoint:
    """Minimize the spec's objective over code distance and cultivation point."""
    profile = circuit if isinstance(circuit, CircuitProfile) else CircuitProfile.of(circuit)
    return optimize_profile(profile, spec, p_phys, table)


def _cell(args) -> SweepPoint:
    profile, spec, p_phys, table = args
    try:
        return optimize_profile(profile, spec, p_phys, table)
    except Infeasible as exc:
        reason = max(exc.reasons, key=exc.reasons.get) if exc.reasons else str(exc)
        return SweepPoint(p_phys, spec.n_phys, False, reason=reason)


def sweep(
    circuit: Circuit | CircuitProfile,
    p_phys_values: Sequence[float],
    n_phys_values: Sequence[int],
    template: OptimizationSpec,
    table: CultivationTable,
    max_workers: int | None = 1,
) -> list[SweepPoint]:
    """Optimize every cell of a (p_phys, N_phys) grid.

    Results are ordered row-major with p_phys outer and N_phys inner, no
    matter how many worker processes evaluate the cells.
    """
    if not p_phys_values or not n_phys_values:
        raise ValueError("sweep grids must be non-empty")
    profile = circuit if isinstance(circuit, CircuitProfile) else CircuitProfile.of(circuit)
    tasks = [
        (profile, dataclasses.replace(template, n_phys=int(n)), float(p), table)
        for p in p_phys_values for n in n_phys_values
    ]
    if max_workers == 1 or len(tasks) == 1:
        return [_cell(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(_cell, tasks))


SWEEP_FIELDS = ("p_phys", "N_phys", "best_d", "best_p_mag", "L", "S", "M", "runtime_hours", "feasible")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def sweep_to_csv(points: Sequence[SweepPoint], extra: dict[str, Sequence[float | None]] | None = None) -> str:
    """Render sweep points with the fixed column schema plus optional extra columns."""
    extra = extra or {}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_FIELDS + tuple(extra))
    for i, p in enumerate(points):
        row = [p.p_phys, p.n_phys, p.best_d, p.best_p_mag, p.L, p.S, p.M, p.runtime_hours, p.feasible]
        row += [col[i] for col in extra.values()]
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def sweep_from_csv(text: str) -> list[SweepPoint]:
    """Parse the fixed columns of a sweep CSV back into points."""
    def opt(s, cast):
        return None if s == "" else cast(s)

    points = []
    for row in csv.DictReader(io.StringIO(text)):
        hours = opt(row["runtime_hours"], float)
        points.append(SweepPoint(
            p_phys=float(row["p_phys"]), n_phys=int(row["N_phys"]),
            feasible=row["feasible"] == "true",
            best_d=opt(row["best_d"], int), best_p_mag=opt(row["best_p_mag"], float),
            L=opt(row["L"], float), S=opt(row["S"], float), M=opt(row["M"], float),
            runtime_seconds=None if hours is None else hours * 3600,
        ))
    return points


def sweep_to_json(points: Sequence[SweepPoint], run_config: dict) -> str:
    return json.dumps({"config": run_config, "points": [p.to_dict() for p in points]}, indent=2)
