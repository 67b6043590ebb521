import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flasq.benchmarks import Boundary, TfimSpec, TrotterOrder, build_tfim
from flasq.case_studies import ISING_10X10
from flasq.circuit import CircuitBuilder, GateKind, GridCoord
from flasq.cost_model import CostModelParams, Cultivation, CultivationTable, default_cultivation_table
from flasq.engine import CircuitProfile, estimate
from flasq.exceptions import Infeasible
from flasq.optimize import (
    EqualThirds,
    Objective,
    OptimizationSpec,
    PecBudget,
    SweepPoint,
    logical_qubit_budget,
    optimize,
    sweep,
    sweep_from_csv,
    sweep_to_csv,
    sweep_to_json,
)

TOY_TABLE = CultivationTable.from_csv_text(
    "p_phys,p_logical,volume_physical,protocol\n"
    "1e-3,1e-6,8e3,D3\n"
    "1e-3,1e-8,3e4,D5\n"
)

# Two rates so that sweeps see more than one column of the table.
SWEEP_TABLE = CultivationTable.from_csv_text(
    "p_phys,p_logical,volume_physical,protocol\n"
    "5e-4,1e-7,6e3,D3\n"
    "5e-4,1e-9,2e4,D5\n"
    "1e-3,1e-6,8e3,D3\n"
    "1e-3,3e-7,1.5e4,D5\n"
    "2e-3,1e-5,1.2e4,D3\n"
    "2e-3,1e-6,4e4,D5\n"
)


def toy_circuit(n_t=1):
    b = CircuitBuilder("toy")
    b.add_qubit("q0", GridCoord(0, 0))
    b.add_qubit("q1", GridCoord(0, 3))
    for _ in range(n_t):
        b.apply(GateKind.T, "q0")
    b.apply(GateKind.CNOT, "q0", "q1")
    return b.build()


def brute_force_t_pec(circuit, p_phys, n_phys, d_values, rows, sigma=0.0045):
    """Re-enumerate the grid with the engine and the error formulas written out."""
    best = None
    for d, (p_log, vol_phys) in itertools.product(d_values, rows):
        n_tot = n_phys // (2 * (d + 1) ** 2)
        v_blocks = vol_phys / (2 * (d + 1) ** 2 * d)
        params = CostModelParams(code_distance=d)
        est = estimate(circuit, n_tot, params, Cultivation(v_blocks, p_log))
        pc = 0.03 * (p_phys / 0.01) ** ((d + 1) / 2)
        s_cliff = max(est.S - 1.5 * v_blocks * est.M, 0.0)
        gamma2 = (1 - pc) ** (-4 * d * s_cliff) * (1 - 2 * p_log) ** (-2 * est.M)
        runtime = 1e-6 * d * est.L * gamma2 / sigma**2
        if best is None or runtime < best[0]:
            best = (runtime, d, p_log, est.L)
    return best


@pytest.mark.parametrize("n_t", [1, 3, 20])
@pytest.mark.parametrize("n_phys", [1000, 2000, 5000])
def test_toy_grid_matches_brute_force(n_t, n_phys):
    c = toy_circuit(n_t)
    spec = OptimizationSpec(n_phys, d_values=(5, 7))
    got = optimize(c, spec, 1e-3, TOY_TABLE)
    runtime, d, p_mag, L = brute_force_t_pec(c, 1e-3, n_phys, (5, 7), [(1e-6, 8e3), (1e-8, 3e4)])
    assert (got.best_d, got.best_p_mag) == (d, p_mag)
    assert got.runtime_seconds == pytest.approx(runtime, rel=1e-9)
    assert got.L == pytest.approx(L)


def test_degenerate_grid():
    c = toy_circuit()
    spec = OptimizationSpec(2000, d_values=(7,))
    got = optimize(c, spec, 1e-3, default_cultivation_table())
    assert got.best_d == 7 and got.best_p_mag in (2e-7, 3e-7)
    assert got.n_tot == logical_qubit_budget(2000, 7) == 15


def test_clifford_only_circuit_needs_no_cultivation():
    b = CircuitBuilder()
    b.add_qubit("q0", GridCoord(0, 0))
    b.apply(GateKind.H, "q0")
    got = optimize(b.build(), OptimizationSpec(10_000, d_values=(5, 7)), 4e-3, TOY_TABLE)
    assert got.feasible and got.best_p_mag == 0.0 and got.M == 0


def test_infeasible_reasons():
    c = toy_circuit()
    with pytest.raises(Infeasible) as exc:
        optimize(c, OptimizationSpec(100, d_values=(5, 7)), 1e-3, TOY_TABLE)
    assert exc.value.reasons == {"insufficient qubits": 2}
    with pytest.raises(Infeasible) as exc:
        optimize(c, OptimizationSpec(10_000, d_values=(5,)), 2e-2, TOY_TABLE)
    assert exc.value.reasons == {"above threshold": 1}
    with pytest.raises(Infeasible) as exc:
        optimize(c, OptimizationSpec(10_000, d_values=(5,)), 2e-3, TOY_TABLE)
    assert exc.value.reasons == {"cultivation unavailable": 1}


def test_synthesis_budget_is_enforced():
    b = CircuitBuilder()
    b.add_qubit("q0", GridCoord(0, 0))
    b.apply(GateKind.RZ, "q0", epsilon=1e-3)
    b.apply(GateKind.RZ, "q0", epsilon=1e-3)
    with pytest.raises(Infeasible, match="synthesis"):
        optimize(b.build(), OptimizationSpec(10_000, budget=PecBudget(1e-3)), 1e-3, TOY_TABLE)
    with pytest.raises(Infeasible, match="synthesis"):
        optimize(b.build(), OptimizationSpec(10_000, budget=EqualThirds(3e-3)), 1e-3, TOY_TABLE)


def test_equal_thirds_rejects_ten_by_ten_fourth_order():
    tfim = TfimSpec(10, 10, 20, TrotterOrder.FOURTH, Boundary.PERIODIC, eps_total_rotation=1e-3 / 3)
    spec = OptimizationSpec(ISING_10X10.n_tot * 2 * 15**2, budget=EqualThirds(1e-3), t_cyc=400e-9,
                            t_react_seconds=4e-6)
    with pytest.raises(Infeasible) as exc:
        optimize(CircuitProfile.of(build_tfim(tfim)), spec, 1e-3, default_cultivation_table())
    assert set(exc.value.reasons) <= {"cultivation fidelity unreachable", "insufficient qubits"}
    assert exc.value.reasons.get("cultivation fidelity unreachable", 0) > 0


def test_t_success_objective_prefers_reliable_points():
    c = toy_circuit(20)
    spec = OptimizationSpec(5000, objective=Objective.T_SUCCESS, d_values=(5, 7))
    got = optimize(c, spec, 1e-3, TOY_TABLE)
    assert got.feasible and got.runtime_seconds > 0


def small_tfim():
    return CircuitProfile.of(build_tfim(TfimSpec(3, 3, 2, boundary=Boundary.OPEN)))


def test_sweep_order_and_determinism():
    profile = small_tfim()
    ps, ns = [5e-4, 1e-3, 2e-3], [3_000, 20_000, 100_000]
    template = OptimizationSpec(0, d_values=(3, 5, 7, 9, 11))
    a = sweep(profile, ps, ns, template, SWEEP_TABLE)
    assert [(p.p_phys, p.n_phys) for p in a] == list(itertools.product(ps, ns))
    b = sweep(profile, ps, ns, template, SWEEP_TABLE, max_workers=2)
    assert a == b
    assert sweep_to_csv(a) == sweep_to_csv(b)


def test_sweep_monotone_in_resources():
    profile = small_tfim()
    ps, ns = [5e-4, 1e-3, 2e-3], [5_000, 20_000, 100_000]
    pts = sweep(profile, ps, ns, OptimizationSpec(0, d_values=tuple(range(3, 16, 2))), SWEEP_TABLE)
    grid = {(p.p_phys, p.n_phys): p for p in pts}
    for p in ps:
        runtimes = [grid[p, n].runtime_seconds for n in ns if grid[p, n].feasible]
        assert runtimes == sorted(runtimes, reverse=True)
    for n in ns:
        runtimes = [grid[p, n].runtime_seconds for p in ps if grid[p, n].feasible]
        assert runtimes == sorted(runtimes)


def test_sweep_marks_infeasible_cells():
    pts = sweep(small_tfim(), [1e-3], [100], OptimizationSpec(0, d_values=(3, 5)), SWEEP_TABLE)
    assert pts == [SweepPoint(1e-3, 100, False, reason="insufficient qubits")]
    with pytest.raises(ValueError):
        sweep(small_tfim(), [], [100], OptimizationSpec(0), SWEEP_TABLE)


def test_csv_and_json_round_trip():
    pts = sweep(small_tfim(), [1e-3, 2e-3], [100, 20_000], OptimizationSpec(0, d_values=(3, 5, 7)), SWEEP_TABLE)
    text = sweep_to_csv(pts, {"extra": [1.0, None, 2.0, 3.0]})
    assert text.splitlines()[0] == "p_phys,N_phys,best_d,best_p_mag,L,S,M,runtime_hours,feasible,extra"
    back = sweep_from_csv(text)
    for a, b in zip(pts, back):
        assert (a.p_phys, a.n_phys, a.feasible, a.best_d, a.best_p_mag, a.L, a.S, a.M) == \
               (b.p_phys, b.n_phys, b.feasible, b.best_d, b.best_p_mag, b.L, b.S, b.M)
        if a.feasible:
            assert b.runtime_seconds == pytest.approx(a.runtime_seconds, rel=1e-12)
    import json
    doc = json.loads(sweep_to_json(pts, {"spec": OptimizationSpec(0).to_dict()}))
    assert len(doc["points"]) == 4 and doc["config"]["spec"]["budget"]["mode"] == "PecBudget"


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 30), st.integers(500, 20_000), st.sampled_from([5e-4, 1e-3, 2e-3]))
def test_optimum_is_minimum_over_grid(n_t, n_phys, p):
    c = toy_circuit(n_t)
    rows = [(r.p_logical, r.volume_physical) for r in SWEEP_TABLE.entries if math.isclose(r.p_phys, p)]
    try:
        got = optimize(c, OptimizationSpec(n_phys, d_values=(5, 7)), p, SWEEP_TABLE)
    except Infeasible:
        assert n_phys // 72 <= 2
        return
    feasible_d = [d for d in (5, 7) if n_phys // (2 * (d + 1) ** 2) > 2]
    ref = brute_force_t_pec(c, p, n_phys, feasible_d, rows)
    assert got.runtime_seconds == pytest.approx(ref[0], rel=1e-9)
