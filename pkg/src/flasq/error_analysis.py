"""Logical error rates, success probability, PEC overhead and runtimes."""

from __future__ import annotations

import dataclasses
import math

from flasq.exceptions import AboveThreshold, InsufficientQubits

DEFAULT_SIGMA_FT = 0.0045
DEFAULT_SIGMA_NISQ = 0.005
NISQ_GATE_TIME = 50e-9


@dataclasses.dataclass(frozen=True)
class QecParams:
    """Surface code error model: ``p_cyc = c_cyc * (p_th/p_phys)^(-(d+1)/2)``."""

    p_phys: float
    d: int
    t_cyc: float = 1e-6
    p_th: float = 0.01
    c_cyc: float = 0.03

    @property
    def suppression(self) -> float:
        return self.p_th / self.p_phys


def p_cyc(qec: QecParams) -> float:
    """Logical error probability per patch per code cycle.

    Raises:
        AboveThreshold: if ``p_phys >= p_th``.
    """
    if not 0 < qec.p_phys < qec.p_th:
        raise AboveThreshold(f"p_phys={qec.p_phys:g} is not below threshold p_th={qec.p_th:g}")
    return qec.c_cyc * qec.suppression ** (-(qec.d + 1) / 2)


def round_sig(x: float, digits: int) -> float:
    """Round ``x`` to ``digits`` significant figures."""
    if x == 0:
        return 0.0
    return round(x, digits - 1 - math.floor(math.log10(abs(x))))


def clifford_volume(S: float, M: float, cultivate_volume: float) -> float:
    """Spacetime volume excluding cultivation, ``S - Vol(Cultivate)*M``, floored at 0."""
    return max(S - cultivate_volume * M, 0.0)


def _exp(x: float) -> float:
    # Overheads far outside the useful range saturate instead of raising.
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _resolve(qec: QecParams, p_cyc_value: float | None) -> float:
    return p_cyc(qec) if p_cyc_value is None else p_cyc_value


def lattice_surgery_fidelity(s_cliff: float, qec: QecParams, *, p_cyc_value: float | None = None) -> float:
    """Probability of no logical error in the Clifford spacetime, ``(1-p_cyc)^(d S_cliff)``."""
    return math.exp(qec.d * s_cliff * math.log1p(-_resolve(qec, p_cyc_value)))


def cultivation_fidelity(M: float, p_mag: float) -> float:
    """Probability that all ``M`` magic states are good, ``(1-p_mag)^M``."""
    return math.exp(M * math.log1p(-p_mag))


def success_probability(
    s_cliff: float, M: float, qec: QecParams, p_mag: float, *, p_cyc_value: float | None = None
) -> float:
    """Probability that one shot finishes with no logical or magic-state error.

    Args:
        s_cliff: Spacetime volume excluding cultivation, in blocks.
        M: Magic states consumed.
        qec: Error model.
        p_mag: Error per magic state.
        p_cyc_value: Use this per-cycle error instead of the model's value.
    """
    return (lattice_surgery_fidelity(s_cliff, qec, p_cyc_value=p_cyc_value)
            * cultivation_fidelity(M, p_mag))


def success_probability_approx(
    s_cliff: float, M: float, qec: QecParams, p_mag: float, *, p_cyc_value: float | None = None
) -> float:
    """First-order exponential form ``exp(-d S_cliff p_cyc - M p_mag)``."""
    return math.exp(-qec.d * s_cliff * _resolve(qec, p_cyc_value) - M * p_mag)


def wall_clock(L: float, d: int, t_cyc: float) -> float:
    """Seconds per shot: ``L`` logical timesteps of ``d`` cycles each."""
    return t_cyc * d * L


def time_to_success(L: float, qec: QecParams, P_success: float) -> float:
    """Expected time until one error-free shot, assuming independent retries."""
    if not 0 < P_success <= 1:
        raise ValueError(f"P_success must lie in (0, 1], got {P_success}")
    return wall_clock(L, qec.d, qec.t_cyc) / P_success


@dataclasses.dataclass(frozen=True)
class PecOverhead:
    cliff: float
    mag: float

    @property
    def total(self) -> float:
        return self.cliff * self.mag


def pec_overhead(
    s_cliff: float, M: float, qec: QecParams, p_mag: float, *, p_cyc_value: float | None = None
) -> PecOverhead:
    """Sampling overhead of cancelling logical and magic-state errors.

    Returns ``(1-p_cyc)^(-4 d S_cliff)`` and ``(1-2 p_mag)^(-2M)``.
    """
    if not 0 <= p_mag < 0.5:
        raise ValueError(f"p_mag must lie in [0, 0.5), got {p_mag}")
    pc = _resolve(qec, p_cyc_value)
    cliff = _exp(-4 * qec.d * s_cliff * math.log1p(-pc))
    mag = _exp(-2 * M * math.log1p(-2 * p_mag))
    return PecOverhead(cliff, mag)


def pec_overhead_approx(
    s_cliff: float, M: float, qec: QecParams, p_mag: float, *, p_cyc_value: float | None = None
) -> PecOverhead:
    """First-order forms ``exp(4 d S_cliff p_cyc)`` and ``exp(4 M p_mag)``."""
    pc = _resolve(qec, p_cyc_value)
    return PecOverhead(_exp(4 * qec.d * s_cliff * pc), _exp(4 * M * p_mag))


def t_pec(W: float, gamma2: float, sigma_target: float, obs_norm: float = 1.0) -> float:
    """Time to reach standard error ``sigma_target`` with PEC.

    With ``sigma_target == obs_norm`` this is the time per effective
    noiseless sample, ``W * gamma2``.
    """
    if sigma_target <= 0:
        raise ValueError("sigma_target must be positive")
    return W * gamma2 * (obs_norm / sigma_target) ** 2


@dataclasses.dataclass(frozen=True)
class NisqReport:
    gamma: float
    gamma2: float
    n_samples: float
    n_parallel: int
    runtime: float


def nisq_gamma(eps: float) -> float:
    """Per-gate-per-qubit PEC cost for depolarizing noise of strength ``eps``."""
    if not 0 <= eps < 1:
        raise ValueError(f"eps must lie in [0, 1), got {eps}")
    return (1 + eps / 2) / (1 - eps)


def nisq_runtime(
    n_qubits: int,
    layers: int,
    eps: float,
    n_phys: int,
    sigma: float = DEFAULT_SIGMA_NISQ,
    gate_time: float = NISQ_GATE_TIME,
) -> NisqReport:
    """Runtime of an error-mitigated NISQ circuit with parallel copies.

    Raises:
        InsufficientQubits: if ``n_phys < n_qubits``.
    """
    if n_phys < n_qubits:
        raise InsufficientQubits(n_qubits, n_phys, "physical qubits")
    gamma = nisq_gamma(eps)
    try:
        gamma2 = gamma ** (2 * n_qubits * layers)
    except OverflowError:
        gamma2 = math.inf
    n_samples = gamma2 / sigma**2
    n_parallel = n_phys // n_qubits
    return NisqReport(gamma, gamma2, n_samples, n_parallel, layers * gate_time * n_samples / n_parallel)


@dataclasses.dataclass(frozen=True)
class RuntimeReport:
    """Physical-level quantities derived from a FLASQ estimate."""

    p_cyc: float
    S_cliff: float
    W: float
    P_lattice_surgery: float
    P_cultivation: float
    P_success: float
    T_success: float
    Gamma2_cliff: float
    Gamma2_mag: float
    Gamma2: float
    T_PEC: float
    sigma: float
    obs_norm: float

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def runtime_report(
    L: float,
    S: float,
    M: float,
    qec: QecParams,
    p_mag: float,
    cultivate_volume: float,
    sigma: float = DEFAULT_SIGMA_FT,
    obs_norm: float = 1.0,
    *,
    p_cyc_value: float | None = None,
) -> RuntimeReport:
    """Combine a FLASQ estimate with the error model.

    Args:
        L: Logical timesteps.
        S: Total spacetime volume in blocks.
        M: Magic states consumed.
        qec: Error model.
        p_mag: Error per magic state.
        cultivate_volume: Blocks spent cultivating each magic state.
        sigma: Target standard error for the PEC runtime.
        obs_norm: Norm of the measured observable.
        p_cyc_value: Use this per-cycle error instead of the model's value.
    """
    pc = _resolve(qec, p_cyc_value)
    s_cliff = clifford_volume(S, M, cultivate_volume)
    W = wall_clock(L, qec.d, qec.t_cyc)
    p_ls = lattice_surgery_fidelity(s_cliff, qec, p_cyc_value=pc)
    p_cult = cultivation_fidelity(M, p_mag)
    P = p_ls * p_cult
    g = pec_overhead(s_cliff, M, qec, p_mag, p_cyc_value=pc)
    return RuntimeReport(
        p_cyc=pc, S_cliff=s_cliff, W=W,
        P_lattice_surgery=p_ls, P_cultivation=p_cult, P_success=P,
        T_success=W / P if P > 0 else math.inf,
        Gamma2_cliff=g.cliff, Gamma2_mag=g.mag, Gamma2=g.total,
        T_PEC=t_pec(W, g.total, sigma, obs_norm), sigma=sigma, obs_norm=obs_norm,
    )
