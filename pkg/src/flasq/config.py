"""Run configuration for the command line tools."""

from __future__ import annotations

import dataclasses
import json
import os
from pathlib import Path
from typing import Any

from flasq.cost_model import CultivationTable, Flavor, default_cultivation_table
from flasq.exceptions import ConfigError

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

CULTIVATION_ENV_VAR = "FLASQ_CULTIVATION_TABLE"


@dataclasses.dataclass(frozen=True)
class HardwareProfile:
    name: str = "default"
    t_cyc: float = 1e-6
    t_react_seconds: float = 10e-6
    p_phys: float = 1e-3

    def __post_init__(self):
        if self.t_cyc <= 0 or self.t_react_seconds < 0:
            raise ConfigError(f"profile {self.name!r}: times must be positive")
        if not 0 < self.p_phys < 1:
            raise ConfigError(f"profile {self.name!r}: p_phys must lie in (0, 1)")


PROFILES = {
    "default": HardwareProfile("default", 1e-6, 10e-6, 1e-3),
    # 400 ns cycles with a reaction time of ten cycles.
    "nanosecond": HardwareProfile("nanosecond", 400e-9, 4e-6, 1e-3),
}


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Resolved settings shared by all subcommands.

    Attributes:
        profile: Hardware timing and error rate.
        flavor: Gate cost column.
        cultivation_csv: Path of a user cultivation table, or None for the
            bundled one.
        objective: Optimizer objective name.
        budget_mode: ``pec`` or ``equal_thirds``.
        eps_total: Total error budget of the selected mode.
        sigma: Target standard error for PEC runtimes.
        d_values: Candidate code distances for the optimizer.
    """

    profile: HardwareProfile = PROFILES["default"]
    flavor: Flavor = Flavor.CONSERVATIVE
    cultivation_csv: str | None = None
    objective: str = "t_pec"
    budget_mode: str = "pec"
    eps_total: float = 1e-3
    sigma: float = 0.0045
    d_values: tuple[int, ...] = tuple(range(3, 36, 2))

    def __post_init__(self):
        try:
            object.__setattr__(self, "flavor", Flavor(self.flavor))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.budget_mode not in ("pec", "equal_thirds"):
            raise ConfigError(f"budget_mode must be 'pec' or 'equal_thirds', got {self.budget_mode!r}")
        if self.objective not in ("t_pec", "t_success"):
            raise ConfigError(f"objective must be 't_pec' or 't_success', got {self.objective!r}")
        object.__setattr__(self, "d_values", tuple(int(d) for d in self.d_values))

    def to_dict(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        d["flavor"] = self.flavor.value
        d["d_values"] = list(self.d_values)
        return d

    def cultivation_table(self) -> CultivationTable:
        if self.cultivation_csv is None:
            return default_cultivation_table()
        return CultivationTable.load(self.cultivation_csv)


def _read_mapping(path: Path) -> dict[str, Any]:
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    text = path.read_text()
    try:
        if path.suffix.lower() == ".json":
            return json.loads(text)
        return tomllib.loads(text)
    except (ValueError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc


def load_config(path: str | Path | None = None, **overrides: Any) -> RunConfig:
    """Build a :class:`RunConfig` from an optional TOML/JSON file plus overrides.

    Precedence, highest first: explicit overrides, the cultivation table
    environment variable, the file, built-in defaults. Overrides whose
    value is None are ignored. A relative ``cultivation_csv`` in the file is
    resolved against the file's directory.
    """
    data: dict[str, Any] = {}
    base = Path.cwd()
    if path is not None:
        path = Path(path)
        data = dict(_read_mapping(path))
        base = path.parent

    prof = data.pop("profile", {})
    if isinstance(prof, str):
        prof = {"name": prof}
    prof_name = overrides.pop("profile", None) or prof.get("name", "default")
    if prof_name not in PROFILES and not {"t_cyc", "t_react"} <= set(prof):
        raise ConfigError(f"unknown hardware profile {prof_name!r}; choose from {sorted(PROFILES)}")
    p = PROFILES.get(prof_name, PROFILES["default"])
    timing = {
        "t_cyc": overrides.pop("t_cyc", None) or prof.get("t_cyc", p.t_cyc),
        "t_react_seconds": overrides.pop("t_react", None) or prof.get("t_react", p.t_react_seconds),
        "p_phys": overrides.pop("p_phys", None) or prof.get("p_phys", p.p_phys),
    }
    try:
        profile = HardwareProfile(prof_name, **{k: float(v) for k, v in timing.items()})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad hardware profile: {exc}") from exc

    opt = data.pop("optimize", {})
    fields = {f.name for f in dataclasses.fields(RunConfig)} - {"profile"}
    unknown = (set(data) | set(opt)) - fields
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    merged = {**data, **opt}
    if merged.get("cultivation_csv") is not None:
        merged["cultivation_csv"] = str((base / merged["cultivation_csv"]).resolve())
    env = os.environ.get(CULTIVATION_ENV_VAR)
    if env:
        merged["cultivation_csv"] = env
    merged.update({k: v for k, v in overrides.items() if v is not None})
    try:
        cfg = RunConfig(profile=profile, **merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.cultivation_csv is not None and not Path(cfg.cultivation_csv).is_file():
        raise ConfigError(f"cultivation table not found: {cfg.cultivation_csv}")
    return cfg
