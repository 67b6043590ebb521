"""Worked resource estimates: hand-compiled Ising schedules, Hamming weight
phasing versus direct rotations, and the NISQ versus fault-tolerant crossover.
"""

from __future__ import annotations

import dataclasses
import math
from collections.abc import Sequence

from flasq.benchmarks import (
    Boundary,
    HwpSpec,
    TfimSpec,
    TrotterOrder,
    build_hwp,
    build_parallel_rz,
    tfim_rotation_count,
)
from flasq.cost_model import (
    CostModelParams,
    CultivationTable,
    Flavor,
    block_physical_volume,
    cultivation_lookup,
    integer_rotation_t_count,
    rotation_t_count,
)
from flasq.engine import CircuitProfile, t_count
from flasq.error_analysis import (
    DEFAULT_SIGMA_NISQ,
    QecParams,
    cultivation_fidelity,
    lattice_surgery_fidelity,
    nisq_runtime,
    p_cyc,
    pec_overhead,
    round_sig,
    t_pec,
    wall_clock,
)
from flasq.exceptions import InsufficientQubits
from flasq.optimize import OptimizationSpec, SweepPoint, sweep

# -- hand-compiled Ising schedule --------------------------------------------


@dataclasses.dataclass(frozen=True)
class HandCompiledIsing:
    """A manually pipelined rotation-synthesis schedule for a TFIM circuit.

    ``units`` synthesis gadgets run side by side; each takes ``2m + 2``
    logical timesteps plus ``buffer`` timesteps of routing, so a rotation
    completes every ``(2m + 2 + buffer) / units`` timesteps. The whole device
    of ``n_tot`` patches is busy for the full schedule.
    """

    label: str
    tfim: TfimSpec
    n_tot: int
    d: int
    t_cyc: float
    p_phys: float
    p_mag: float
    v_cult_physical: float
    units: int
    buffer: int
    p_cyc_sig_figs: int | None = 2


ISING_11X11 = HandCompiledIsing(
    "11x11 2nd order", TfimSpec(11, 11, 20, TrotterOrder.SECOND, Boundary.PERIODIC),
    n_tot=160, d=13, t_cyc=1e-6, p_phys=1e-3, p_mag=3e-7, v_cult_physical=1.5e4, units=4, buffer=4,
)
ISING_10X10 = HandCompiledIsing(
    "10x10 4th order", TfimSpec(10, 10, 20, TrotterOrder.FOURTH, Boundary.PERIODIC),
    n_tot=140, d=14, t_cyc=400e-9, p_phys=1e-3, p_mag=2e-7, v_cult_physical=1.8e4, units=5, buffer=5,
)


@dataclasses.dataclass(frozen=True)
class HandCompiledResult:
    label: str
    n_rot: int
    m: int
    cycles_per_rot: float
    L_hand: float
    S_hand: float
    d: int
    t_cyc: float
    p_cyc_exact: float
    p_cyc: float
    P_lattice_surgery: float
    p_mag: float
    v_cult_physical: float
    v_cult: float
    P_cultivation: float
    P_success: float
    Gamma2: float
    W: float
    T_PEC: float
    physical_qubits: int

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def hand_compiled_ising(case: HandCompiledIsing) -> HandCompiledResult:
    """Evaluate the hand-compiled schedule's arithmetic chain.

    The per-rotation T-count ``m`` is the mean synthesis cost at the even
    per-rotation share of the budget, rounded up. The chain charges the whole
    spacetime volume to lattice surgery errors, and by default rounds
    ``p_cyc`` to two significant figures before using it, as a tabulated
    chain would.
    """
    n_rot = tfim_rotation_count(case.tfim)
    m = integer_rotation_t_count(case.tfim.eps_total_rotation / n_rot)
    cycles = (2 * m + 2 + case.buffer) / case.units
    L = n_rot * cycles
    S = case.n_tot * L
    qec = QecParams(case.p_phys, case.d, case.t_cyc)
    exact = p_cyc(qec)
    pc = exact if case.p_cyc_sig_figs is None else round_sig(exact, case.p_cyc_sig_figs)
    M = n_rot * m
    p_ls = lattice_surgery_fidelity(S, qec, p_cyc_value=pc)
    p_cult = cultivation_fidelity(M, case.p_mag)
    gamma2 = pec_overhead(S, M, qec, case.p_mag, p_cyc_value=pc).total
    W = wall_clock(L, case.d, case.t_cyc)
    return HandCompiledResult(
        label=case.label, n_rot=n_rot, m=m, cycles_per_rot=cycles, L_hand=L, S_hand=S,
        d=case.d, t_cyc=case.t_cyc, p_cyc_exact=exact, p_cyc=pc, P_lattice_surgery=p_ls,
        p_mag=case.p_mag, v_cult_physical=case.v_cult_physical,
        v_cult=case.v_cult_physical / block_physical_volume(case.d),
        P_cultivation=p_cult, P_success=p_ls * p_cult, Gamma2=gamma2, W=W,
        T_PEC=t_pec(W, gamma2, 1.0), physical_qubits=case.n_tot * 2 * (case.d + 1) ** 2,
    )


# -- Hamming weight phasing versus parallel rotations -----------------------


@dataclasses.dataclass(frozen=True)
class HwpComparisonSettings:
    """Shared settings for the rotation-layer comparison.

    The cultivation target per magic state is the per-rotation cultivation
    budget spread over that rotation's share of T states. The reaction-time
    bound is ignored by default to focus on the spacetime-limited regime.
    """

    eps_per_rotation: float = 1e-7
    p_cult_per_rotation: float = 1e-5
    p_phys: float = 1e-3
    d: int = 14
    t_cyc: float = 1e-6
    t_react_seconds: float = 10e-6
    flavor: Flavor = Flavor.CONSERVATIVE
    layout_width: int = 10
    reaction_limit: bool = False
    max_factor: int = 5


@dataclasses.dataclass(frozen=True)
class HwpSummaryRow:
    n: int
    hwp_t_count: int
    parallel_t_count: int
    t_count_ratio: float
    hwp_volume_zero_distance: float
    hwp_volume_with_distance: float
    parallel_volume: float
    hwp_qubits: int
    hwp_ancilla: int


@dataclasses.dataclass(frozen=True)
class HwpCurvePoint:
    n: int
    n_tot: int
    parallel_L: float | None
    hwp_L_with_distance: float | None
    hwp_L_zero_distance: float | None


def _hwp_inputs(n: int, s: HwpComparisonSettings, table: CultivationTable):
    hwp = build_hwp(HwpSpec(n, s.eps_per_rotation, s.layout_width))
    par = build_parallel_rz(n, s.eps_per_rotation, s.layout_width)
    hwp_cult = cultivation_lookup(table, s.p_phys, n * s.p_cult_per_rotation / t_count(hwp), s.d)
    par_cult = cultivation_lookup(
        table, s.p_phys, s.p_cult_per_rotation / rotation_t_count(s.eps_per_rotation), s.d)
    return hwp, par, hwp_cult, par_cult


def compare_hwp(
    ns: Sequence[int], settings: HwpComparisonSettings, table: CultivationTable
) -> tuple[list[HwpSummaryRow], list[HwpCurvePoint]]:
    """T-count and volume summary plus timestep curves for each ``n``.

    Curves run over every ``n_tot`` from the smallest that fits the direct
    approach up to ``max_factor * n``; strategies that do not fit yet are None.
    """
    s = settings
    base = CostModelParams(s.flavor, s.d, s.t_cyc, s.t_react_seconds)
    zero = dataclasses.replace(base, ignore_distances=True)
    rows, curves = [], []
    for n in ns:
        hwp, par, hwp_cult, par_cult = _hwp_inputs(n, s, table)
        hp, pp = CircuitProfile.of(hwp), CircuitProfile.of(par)
        ht, pt = int(t_count(hwp, integerize=True)), int(t_count(par, integerize=True))
        rows.append(HwpSummaryRow(
            n=n, hwp_t_count=ht, parallel_t_count=pt, t_count_ratio=pt / ht,
            hwp_volume_zero_distance=hp.ancilla_volume(zero, hwp_cult),
            hwp_volume_with_distance=hp.ancilla_volume(base, hwp_cult),
            parallel_volume=pp.ancilla_volume(base, par_cult),
            hwp_qubits=hp.Q, hwp_ancilla=sum(1 for q in hwp.qubits if q.kind.value == "ancilla"),
        ))

        def timesteps(profile, params, cult, n_tot):
            try:
                return profile.estimate(n_tot, params, cult, s.reaction_limit).L
            except InsufficientQubits:
                return None

        for n_tot in range(min(hp.Q, pp.Q) + 1, s.max_factor * n + 1):
            curves.append(HwpCurvePoint(
                n, n_tot,
                timesteps(pp, base, par_cult, n_tot),
                timesteps(hp, base, hwp_cult, n_tot),
                timesteps(hp, zero, hwp_cult, n_tot),
            ))
    return rows, curves


# -- NISQ versus fault tolerance --------------------------------------------


@dataclasses.dataclass(frozen=True)
class CrossoverCell:
    p_phys: float
    n_phys: int
    ft: SweepPoint
    nisq_runtime_seconds: float
    log10_ratio: float | None


def nisq_crossover(
    tfim: TfimSpec,
    p_phys_values: Sequence[float],
    n_phys_values: Sequence[int],
    template: OptimizationSpec,
    table: CultivationTable,
    nisq_layers: int | None = None,
    nisq_sigma: float = DEFAULT_SIGMA_NISQ,
    max_workers: int | None = 1,
) -> list[CrossoverCell]:
    """Compare one error-corrected run with many parallel mitigated noisy runs.

    The noisy device uses depolarizing strength equal to ``p_phys`` after each
    of ``nisq_layers`` two-qubit layers (default: four per Trotter step).
    ``log10_ratio`` is ``log10(T_FT / T_NISQ)``; negative favours fault tolerance.
    """
    from flasq.benchmarks import build_tfim

    layers = nisq_layers if nisq_layers is not None else 4 * tfim.steps
    ft = sweep(build_tfim(tfim), p_phys_values, n_phys_values, template, table, max_workers)
    cells = []
    for pt in ft:
        try:
            nisq = nisq_runtime(tfim.n_sites, layers, pt.p_phys, pt.n_phys, nisq_sigma).runtime
        except InsufficientQubits:
            nisq = math.inf
        ratio = None
        if pt.feasible and math.isfinite(nisq):
            ratio = math.log10(pt.runtime_seconds) - math.log10(nisq)
        cells.append(CrossoverCell(pt.p_phys, pt.n_phys, pt, nisq, ratio))
    return cells
