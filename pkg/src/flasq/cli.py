"""Command line interface.

Every subcommand writes its result (JSON or CSV) to ``--output`` or stdout
and echoes the fully resolved configuration. Failures print a JSON error
object to stderr and exit with 1 (infeasible) or 2 (configuration or input
error).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from flasq import benchmarks as bm
from flasq.case_studies import (
    ISING_10X10,
    ISING_11X11,
    HwpComparisonSettings,
    compare_hwp,
    hand_compiled_ising,
    nisq_crossover,
)
from flasq.circuit import Circuit
from flasq.config import RunConfig, load_config
from flasq.cost_model import (
    CostModelParams,
    Cultivation,
    block_physical_volume,
    cultivation_candidates,
    cultivation_lookup,
)
from flasq.engine import CircuitProfile
from flasq.error_analysis import QecParams, runtime_report
from flasq.exceptions import (
    CircuitValidationError,
    ConfigError,
    FlasqError,
)
from flasq.optimize import (
    EqualThirds,
    OptimizationSpec,
    PecBudget,
    optimize,
    sweep,
    sweep_to_csv,
    sweep_to_json,
)

log = logging.getLogger("flasq")

EXIT_OK, EXIT_INFEASIBLE, EXIT_CONFIG = 0, 1, 2


# -- argument helpers --------------------------------------------------------


def _count(text: str) -> int:
    """Non-negative integer that may be written in scientific notation, e.g. ``1e5``."""
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value.is_integer() or value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    return int(value)


def _add_common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("configuration")
    g.add_argument("--config", help="TOML or JSON run configuration")
    g.add_argument("--profile", help="hardware profile name (default, nanosecond)")
    g.add_argument("--t-cyc", type=float, help="seconds per code cycle")
    g.add_argument("--t-react", type=float, help="reaction time in seconds")
    g.add_argument("--p-phys", type=float, help="physical error rate")
    g.add_argument("--flavor", choices=["conservative", "optimistic"])
    g.add_argument("--cultivation-table", help="cultivation CSV (overrides env and config)")
    g.add_argument("-o", "--output", help="output file (default: stdout)")


def _add_circuit_source(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("circuit")
    g.add_argument("--circuit", help="circuit JSON file")
    g.add_argument("--builder", choices=["tfim", "parallel-rz", "hwp"], help="build a benchmark circuit instead")
    g.add_argument("--width", type=int, default=11, help="TFIM lattice width")
    g.add_argument("--height", type=int, default=11, help="TFIM lattice height")
    g.add_argument("--steps", type=int, default=20, help="TFIM Trotter steps")
    g.add_argument("--order", choices=["second", "fourth"], default="second")
    g.add_argument("--boundary", choices=["open", "periodic"], default="periodic")
    g.add_argument("--eps-rotation-total", type=float, default=None,
                   help="TFIM synthesis budget (default: budget mode's synthesis share)")
    g.add_argument("--n", type=int, default=15, help="rotations for parallel-rz / hwp")
    g.add_argument("--eps", type=float, default=1e-7, help="error per rotation for parallel-rz / hwp")


def _add_optimizer(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("optimizer")
    g.add_argument("--objective", choices=["t_pec", "t_success"])
    g.add_argument("--budget-mode", choices=["pec", "equal_thirds"])
    g.add_argument("--eps-total", type=float, help="total error budget of the mode")
    g.add_argument("--sigma", type=float, help="target standard error for PEC")
    g.add_argument("--d-values", type=int, nargs="+", help="candidate code distances")


def _config(args) -> RunConfig:
    return load_config(
        args.config, profile=args.profile, t_cyc=args.t_cyc, t_react=args.t_react, p_phys=args.p_phys,
        flavor=args.flavor, cultivation_csv=args.cultivation_table,
        objective=getattr(args, "objective", None), budget_mode=getattr(args, "budget_mode", None),
        eps_total=getattr(args, "eps_total", None), sigma=getattr(args, "sigma", None),
        d_values=tuple(args.d_values) if getattr(args, "d_values", None) else None,
    )


def _synthesis_budget(cfg: RunConfig) -> float:
    return cfg.eps_total / 3 if cfg.budget_mode == "equal_thirds" else cfg.eps_total


def _circuit(args, cfg: RunConfig) -> tuple[Circuit, dict]:
    if args.circuit and args.builder:
        raise ConfigError("give either --circuit or --builder, not both")
    if args.circuit:
        path = Path(args.circuit)
        if not path.is_file():
            raise ConfigError(f"circuit file not found: {path}")
        try:
            return Circuit.load(path), {"circuit_file": str(path)}
        except (ValueError, KeyError, TypeError) as exc:
            raise ConfigError(f"cannot read circuit {path}: {exc}") from exc
    if args.builder == "tfim":
        eps = args.eps_rotation_total or _synthesis_budget(cfg)
        spec = bm.TfimSpec(args.width, args.height, args.steps, args.order, args.boundary, eps)
        return bm.build_tfim(spec), {"builder": "tfim", **_plain(spec)}
    if args.builder == "parallel-rz":
        return bm.build_parallel_rz(args.n, args.eps), {"builder": "parallel-rz", "n": args.n, "eps": args.eps}
    if args.builder == "hwp":
        spec = bm.HwpSpec(args.n, args.eps)
        return bm.build_hwp(spec), {"builder": "hwp", **_plain(spec)}
    raise ConfigError("no circuit given: use --circuit FILE or --builder")


def _plain(obj) -> dict:
    d = dataclasses.asdict(obj)
    return {k: (v.value if hasattr(v, "value") else v) for k, v in d.items()}


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: ("" if v is None else v) for k, v in r.items()})
    return buf.getvalue()


def _cultivation(args, cfg: RunConfig, d: int) -> Cultivation:
    table = cfg.cultivation_table()
    if args.p_cult is not None:
        return cultivation_lookup(table, cfg.profile.p_phys, args.p_cult, d)
    # Without an explicit target, take the cheapest tabulated operating point.
    return cultivation_candidates(table, cfg.profile.p_phys, d)[-1]


# -- subcommands -------------------------------------------------------------

def cmd_build(args) -> int:
    cfg = _config(args)
    circuit, source = _circuit(args, cfg)
    _emit(circuit.to_json(), args.output)
    log.info("built %s with %d ops", circuit.name, len(circuit))
    return EXIT_OK


def cmd_estimate(args) -> int:
    cfg = _config(args)
    circuit, source = _circuit(args, cfg)
    d = args.distance
    if args.n_tot is not None:
        n_tot = args.n_tot
    elif args.n_phys is not None:
        n_tot = args.n_phys // (2 * (d + 1) ** 2)
    else:
        raise ConfigError("give --n-tot or --n-phys")
    params = CostModelParams(cfg.flavor, d, cfg.profile.t_cyc, cfg.profile.t_react_seconds)
    profile = CircuitProfile.of(circuit)
    cult = _cultivation(args, cfg, d) if profile.M > 0 else None
    est = profile.estimate(n_tot, params, cult)
    qec = QecParams(cfg.profile.p_phys, d, cfg.profile.t_cyc)
    p_mag = cult.p_mag if cult else 0.0
    rep = runtime_report(est.L, est.S, est.M, qec, p_mag,
                         cult.cultivate_volume(cfg.flavor) if cult else 0.0, cfg.sigma)
    out = {
        "config": {**cfg.to_dict(), "circuit": source, "distance": d, "n_tot": n_tot,
                   "p_cult": args.p_cult},
        "cultivation": None if cult is None else dataclasses.asdict(cult),
        "estimate": est.to_dict(),
        "runtime": {**rep.to_dict(), "T_PEC_hours": rep.T_PEC / 3600, "T_success_hours": rep.T_success / 3600},
    }
    if args.physical_units:
        block = block_physical_volume(d)
        out["physical_units"] = {
            "qubit_cycles_per_block": block,
            "V": est.V * block,
            "S": est.S * block,
            "physical_qubits": n_tot * 2 * (d + 1) ** 2,
        }
    _emit(json.dumps(out, indent=2), args.output)
    return EXIT_OK


def _opt_spec(cfg: RunConfig, n_phys: int) -> OptimizationSpec:
    budget = EqualThirds(cfg.eps_total) if cfg.budget_mode == "equal_thirds" else PecBudget(cfg.eps_total)
    return OptimizationSpec(
        n_phys=n_phys, objective=cfg.objective, d_values=cfg.d_values, budget=budget,
        flavor=cfg.flavor, t_cyc=cfg.profile.t_cyc, t_react_seconds=cfg.profile.t_react_seconds,
        sigma=cfg.sigma,
    )


def cmd_optimize(args) -> int:
    cfg = _config(args)
    circuit, source = _circuit(args, cfg)
    spec = _opt_spec(cfg, args.n_phys)
    point = optimize(circuit, spec, cfg.profile.p_phys, cfg.cultivation_table())
    out = {"config": {**cfg.to_dict(), "circuit": source, "spec": spec.to_dict()}, "result": point.to_dict()}
    _emit(json.dumps(out, indent=2), args.output)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _config(args)
    circuit, source = _circuit(args, cfg)
    spec = _opt_spec(cfg, args.n_phys_values[0])
    points = sweep(circuit, args.p_phys_values, args.n_phys_values, spec, cfg.cultivation_table(),
                   max_workers=args.workers)
    run_config = {**cfg.to_dict(), "circuit": source, "spec": spec.to_dict(),
                  "p_phys_values": args.p_phys_values, "n_phys_values": args.n_phys_values}
    _emit(sweep_to_csv(points), args.output)
    if args.json:
        Path(args.json).write_text(sweep_to_json(points, run_config))
    return EXIT_OK


def cmd_ising(args) -> int:
    cfg = _config(args)
    rows = [hand_compiled_ising(c).to_dict() for c in (ISING_11X11, ISING_10X10)]
    # FLASQ estimate of the 11x11 circuit at the hand-compiled operating point.
    case = ISING_11X11
    circuit = bm.build_tfim(case.tfim)
    params = CostModelParams(cfg.flavor, case.d, case.t_cyc, cfg.profile.t_react_seconds)
    cult = cultivation_lookup(cfg.cultivation_table(), case.p_phys, case.p_mag, case.d)
    est = CircuitProfile.of(circuit).estimate(case.n_tot, params, cult)
    out = {
        "config": cfg.to_dict(),
        "hand_compiled": rows,
        "flasq_11x11": {**est.to_dict(), "L_ratio_to_hand": est.L / rows[0]["L_hand"]},
    }
    if args.csv:
        Path(args.csv).write_text(_csv(rows))
    _emit(json.dumps(out, indent=2), args.output)
    return EXIT_OK


def cmd_compare_hwp(args) -> int:
    cfg = _config(args)
    settings = HwpComparisonSettings(
        eps_per_rotation=args.eps, p_cult_per_rotation=args.p_cult_per_rotation,
        p_phys=cfg.profile.p_phys, d=args.distance, t_cyc=cfg.profile.t_cyc,
        t_react_seconds=cfg.profile.t_react_seconds, flavor=cfg.flavor,
        reaction_limit=args.reaction_limit,
    )
    rows, curves = compare_hwp(args.n_values, settings, cfg.cultivation_table())
    _emit(_csv([dataclasses.asdict(r) for r in rows]), args.output)
    if args.curves:
        Path(args.curves).write_text(_csv([dataclasses.asdict(c) for c in curves]))
    if args.json:
        Path(args.json).write_text(json.dumps({
            "config": {**cfg.to_dict(), "settings": _plain(settings), "n_values": args.n_values},
            "summary": [dataclasses.asdict(r) for r in rows],
        }, indent=2))
    return EXIT_OK


def cmd_nisq_crossover(args) -> int:
    cfg = _config(args)
    tfim = bm.TfimSpec(args.width, args.height, args.steps, args.order, args.boundary,
                       args.eps_rotation_total or _synthesis_budget(cfg))
    spec = _opt_spec(cfg, args.n_phys_values[0])
    cells = nisq_crossover(tfim, args.p_phys_values, args.n_phys_values, spec, cfg.cultivation_table(),
                           nisq_layers=args.layers, max_workers=args.workers)
    text = sweep_to_csv([c.ft for c in cells], {
        "nisq_runtime_hours": [c.nisq_runtime_seconds / 3600 for c in cells],
        "log10_ratio": [c.log10_ratio for c in cells],
    })
    _emit(text, args.output)
    if args.json:
        Path(args.json).write_text(json.dumps({
            "config": {**cfg.to_dict(), "tfim": _plain(tfim), "spec": spec.to_dict(),
                       "layers": args.layers or 4 * tfim.steps},
            "cells": [{"ft": c.ft.to_dict(), "nisq_runtime_seconds": c.nisq_runtime_seconds,
                       "log10_ratio": c.log10_ratio} for c in cells],
        }, indent=2, default=str))
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flasq", description="FLASQ surface code cost model")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="write a benchmark circuit as JSON")
    _add_common(p)
    _add_circuit_source(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("estimate", help="run the cost model on one circuit")
    _add_common(p)
    _add_circuit_source(p)
    p.add_argument("--distance", "-d", type=int, default=13)
    p.add_argument("--n-tot", type=_count, help="logical patches available")
    p.add_argument("--n-phys", type=_count, help="physical qubits (converted at --distance)")
    p.add_argument("--p-cult", type=float, help="target error per magic state")
    p.add_argument("--sigma", type=float)
    p.add_argument("--physical-units", action="store_true", help="also report physical qubit-cycles")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("optimize", help="choose code distance and cultivation point")
    _add_common(p)
    _add_circuit_source(p)
    _add_optimizer(p)
    p.add_argument("--n-phys", type=_count, required=True)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep", help="optimize over a (p_phys, N_phys) grid; CSV output")
    _add_common(p)
    _add_circuit_source(p)
    _add_optimizer(p)
    p.add_argument("--p-phys-values", type=float, nargs="+", required=True)
    p.add_argument("--n-phys-values", type=_count, nargs="+", required=True)
    p.add_argument("--workers", type=int, default=1, help="worker processes")
    p.add_argument("--json", help="also write a JSON mirror with the run configuration")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("ising", help="hand-compiled Ising estimates and the FLASQ comparison")
    _add_common(p)
    p.add_argument("--csv", help="also write the hand-compiled table as CSV")
    p.set_defaults(func=cmd_ising)

    p = sub.add_parser("compare-hwp", help="Hamming weight phasing versus parallel rotations")
    _add_common(p)
    p.add_argument("--n-values", type=int, nargs="+", default=[15, 43, 121])
    p.add_argument("--eps", type=float, default=1e-7, help="synthesis error per rotation")
    p.add_argument("--p-cult-per-rotation", type=float, default=1e-5)
    p.add_argument("--distance", "-d", type=int, default=14)
    p.add_argument("--reaction-limit", action="store_true", help="also enforce the reaction-time bound")
    p.add_argument("--curves", help="write timestep curves CSV here")
    p.add_argument("--json", help="write summary JSON with config echo here")
    p.set_defaults(func=cmd_compare_hwp)

    p = sub.add_parser("nisq-crossover", help="fault-tolerant versus mitigated NISQ runtime grid")
    _add_common(p)
    _add_optimizer(p)
    p.add_argument("--width", type=int, default=11)
    p.add_argument("--height", type=int, default=11)
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--order", choices=["second", "fourth"], default="second")
    p.add_argument("--boundary", choices=["open", "periodic"], default="open")
    p.add_argument("--eps-rotation-total", type=float, default=None)
    p.add_argument("--layers", type=int, help="two-qubit layers of the NISQ circuit (default 4 per step)")
    p.add_argument("--p-phys-values", type=float, nargs="+", required=True)
    p.add_argument("--n-phys-values", type=_count, nargs="+", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--json", help="also write a JSON mirror with the run configuration")
    p.set_defaults(func=cmd_nisq_crossover)
    return parser


def _fail(kind: str, exc: Exception, code: int) -> int:
    err = {"error": kind, "type": type(exc).__name__, "message": str(exc)}
    reasons = getattr(exc, "reasons", None)
    if reasons:
        err["reasons"] = reasons
    diags = getattr(exc, "diagnostics", None)
    if diags:
        err["diagnostics"] = [{"seq": d.seq, "reason": d.reason} for d in diags]
    sys.stderr.write(json.dumps(err) + "\n")
    return code


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        return _fail("config", exc, EXIT_CONFIG)
    except CircuitValidationError as exc:
        return _fail("invalid-circuit", exc, EXIT_CONFIG)
    except FlasqError as exc:
        return _fail("infeasible", exc, EXIT_INFEASIBLE)
    except (ValueError, OSError) as exc:
        return _fail("config", exc, EXIT_CONFIG)


if __name__ == "__main__":
    sys.exit(main())
