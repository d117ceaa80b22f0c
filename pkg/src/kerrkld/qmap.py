"""Stroboscopic quantum map of the pulse-kicked Kerr oscillator.

One period applies the kick ``exp(-i eps (a + a^dag))`` followed by the Kerr
evolution ``exp(-i chi T n (n - 1))``.  An unperturbed and a perturbed
trajectory (kick strength ``eps + delta_eps``) are evolved in lockstep from the
same initial state and compared pulse by pulse.
"""

import math
import warnings
from dataclasses import asdict, dataclass
from typing import Dict, Iterator, Optional, Sequence, Tuple

import numpy as np

from . import divergence as dv
from .errors import ConfigError, ContractViolationError, RankDeficiencyError
from .hilbert import (
    coherent_state,
    hermitian_eigendecomposition,
    ladder_operators,
    leakage,
    outer_product,
    unitary_from_generator,
    vacuum_state,
)
from .spectra import TimeSeries

LEAKAGE_THRESHOLD = 1e-8
LEAKAGE_FRACTION = 0.1
INDICATORS = ("k1", "k2", "kld", "kq", "fidelity")


class LeakageWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ModelParams:
    """Physical and numerical parameters of one run (hbar = 1).

    ``initial`` is ``None`` for the vacuum, otherwise the complex amplitude of
    a coherent initial state.
    """

    chi: float = 1.0
    period: float = math.pi
    epsilon: float = 0.1
    delta_epsilon: float = 1e-3
    dim: int = 128
    n_pulses: int = 10_000
    initial: Optional[complex] = None

    def validate(self):
        if not self.chi > 0:
            raise ConfigError("chi", f"must be > 0, got {self.chi!r}")
        if not self.period > 0:
            raise ConfigError("period", f"must be > 0, got {self.period!r}")
        if not math.isfinite(self.epsilon):
            raise ConfigError("epsilon", f"must be finite, got {self.epsilon!r}")
        if not (self.delta_epsilon >= 0 and math.isfinite(self.delta_epsilon)):
            raise ConfigError("delta_epsilon", f"must be >= 0, got {self.delta_epsilon!r}")
        if int(self.dim) != self.dim or self.dim < 2:
            raise ConfigError("dim", f"must be an integer >= 2, got {self.dim!r}")
        if int(self.n_pulses) != self.n_pulses or self.n_pulses < 0:
            raise ConfigError("n_pulses", f"must be a non-negative integer, got {self.n_pulses!r}")
        if self.initial is not None and abs(self.initial) ** 2 > self.dim / 4:
            raise ConfigError("initial", f"|alpha|^2 exceeds dim/4 for alpha={self.initial!r}")
        if self.delta_epsilon > 0.1 * abs(self.epsilon):
            warnings.warn(
                f"delta_epsilon={self.delta_epsilon} is not small compared to "
                f"epsilon={self.epsilon}",
                stacklevel=2,
            )
        return self

    def initial_state(self) -> np.ndarray:
        if self.initial is None:
            return vacuum_state(self.dim)
        return coherent_state(self.initial, self.dim)


def kerr_diagonal(chi: float, period: float, dim: int) -> np.ndarray:
    n = np.arange(dim, dtype=float)
    return np.exp(-1j * chi * period * n * (n - 1))


def kerr_unitary(params: ModelParams) -> np.ndarray:
    """Diagonal Kerr propagator with entries ``exp(-i chi T n (n - 1))``."""
    return np.diag(kerr_diagonal(params.chi, params.period, params.dim))


def kick_unitary(strength: float, dim: int) -> np.ndarray:
    """``exp(-i strength (a + a^dag))`` on ``dim`` levels."""
    _, _, x = ladder_operators(dim)
    return unitary_from_generator(x, strength)


def step(psi, u_nl, u_k) -> np.ndarray:
    """One period: kick first, then Kerr evolution."""
    psi = np.asarray(psi)
    if not (u_nl.shape == u_k.shape == (psi.shape[0], psi.shape[0])):
        raise ContractViolationError(
            f"dimension mismatch: psi {psi.shape}, u_nl {u_nl.shape}, u_k {u_k.shape}"
        )
    return u_nl @ (u_k @ psi)


def _period_maps(params: ModelParams) -> Tuple[np.ndarray, np.ndarray]:
    # Both kicks share the generator, so diagonalize it once.
    _, _, x = ladder_operators(params.dim)
    w, V = hermitian_eigendecomposition(x)
    kerr = kerr_diagonal(params.chi, params.period, params.dim)[:, None]
    Vh = V.conj().T
    unperturbed = kerr * ((V * np.exp(-1j * params.epsilon * w)) @ Vh)
    perturbed = kerr * ((V * np.exp(-1j * (params.epsilon + params.delta_epsilon) * w)) @ Vh)
    return unperturbed, perturbed


def iterate_pair(params: ModelParams) -> Iterator[Tuple[int, np.ndarray, np.ndarray]]:
    """Yield ``(n, psi_unperturbed, psi_perturbed)`` for ``n = 0..n_pulses``.

    Propagators are built once.  The yielded arrays are fresh at every step.
    """
    params.validate()
    A, B = _period_maps(params)
    u = params.initial_state()
    p = u.copy()
    yield 0, u, p
    same = params.delta_epsilon == 0
    for n in range(1, params.n_pulses + 1):
        u = A @ u
        p = u if same else B @ p
        yield n, u, p


@dataclass
class TrajectoryPair:
    """Stored states of both trajectories at pulses ``indices``."""

    unperturbed: np.ndarray
    perturbed: np.ndarray
    params: ModelParams
    indices: np.ndarray
    max_leakage: float = 0.0
    first_leak: Optional[int] = None

    @property
    def leaked(self) -> bool:
        return self.first_leak is not None


def _leak_check(n, u, p, state):
    lk = max(leakage(u, LEAKAGE_FRACTION), leakage(p, LEAKAGE_FRACTION))
    if lk > state["max"]:
        state["max"] = lk
    if state["first"] is None and lk > LEAKAGE_THRESHOLD:
        state["first"] = n


def evolve_pair(params: ModelParams, stride: int = 1) -> TrajectoryPair:
    """Evolve both trajectories and keep every ``stride``-th state.

    The leakage guard is evaluated at every pulse regardless of ``stride``; a
    tripped guard is reported on the result and through a LeakageWarning.
    """
    if stride < 1:
        raise ValueError("stride must be >= 1")
    leak = {"max": 0.0, "first": None}
    us, ps, idx = [], [], []
    for n, u, p in iterate_pair(params):
        _leak_check(n, u, p, leak)
        if n % stride == 0:
            us.append(u)
            ps.append(p)
            idx.append(n)
    pair = TrajectoryPair(
        np.array(us), np.array(ps), params, np.array(idx), leak["max"], leak["first"]
    )
    if pair.leaked:
        _warn_leak(pair.first_leak, pair.max_leakage, params)
    return pair


def _warn_leak(first, worst, params):
    warnings.warn(
        f"truncation leakage: top-level population exceeded {LEAKAGE_THRESHOLD:g} "
        f"at pulse {first} (max {worst:.3g}, dim={params.dim}, epsilon={params.epsilon})",
        LeakageWarning,
        stacklevel=3,
    )


def _dense_value(indicator, u, p, q):
    rho, sigma = outer_product(u), outer_product(p)
    if indicator == "k1":
        return dv.linear_divergence(rho, sigma).value
    if indicator == "k2":
        return dv.nonlinear_divergence(rho, sigma).value
    if indicator == "fidelity":
        return float(np.trace(rho @ sigma).real)
    if indicator == "kld":
        val = dv.kld(rho, sigma)
        if val.rank_deficient:
            raise RankDeficiencyError("relative entropy is infinite: reference state is pure")
        return val.value
    return dv.q_divergence(rho, sigma, q).value


def _check_indicator(indicator, q):
    if indicator not in INDICATORS:
        raise ValueError(f"unknown indicator {indicator!r}; expected one of {INDICATORS}")
    if indicator == "kq" and q is None:
        raise ValueError("indicator 'kq' requires q")


def _values(indicator, U, P, q=None, dense=False):
    if indicator in ("kld", "kq") or dense:
        out = np.empty(len(U))
        for i, (u, p) in enumerate(zip(U, P)):
            try:
                out[i] = _dense_value(indicator, u, p, q)
            except RankDeficiencyError as exc:
                raise RankDeficiencyError(f"{exc} (sample {i})", exc.eigenvalue) from exc
        return out
    if indicator == "k1":
        return dv.linear_divergence_pure(U, P)
    if indicator == "k2":
        return dv.nonlinear_divergence_pure(U, P)
    return dv.fidelity_pure(U, P)


def indicator_series(
    pair: TrajectoryPair, indicator: str = "k1", q: Optional[float] = None, dense: bool = False
) -> TimeSeries:
    """Evaluate an indicator on every stored pulse of ``pair``.

    ``dense=True`` forces the full density-matrix route.  ``kld`` and ``kq``
    always go through density matrices and raise RankDeficiencyError for the
    pure reference states this simulator produces beyond the first pulse.
    """
    _check_indicator(indicator, q)
    vals = _values(indicator, pair.unperturbed, pair.perturbed, q, dense)
    return TimeSeries(vals, start_index=int(pair.indices[0]) if len(pair.indices) else 0)


@dataclass
class IndicatorRun:
    series: Dict[str, TimeSeries]
    params: ModelParams
    max_leakage: float = 0.0
    first_leak: Optional[int] = None
    norm_drift: float = 0.0

    @property
    def leaked(self) -> bool:
        return self.first_leak is not None


def run_indicators(
    params: ModelParams,
    indicators: Sequence[str] = ("k1",),
    q: Optional[float] = None,
    dense: bool = False,
    chunk: int = 1024,
) -> IndicatorRun:
    """Evolve both trajectories and keep only indicator values.

    States are buffered ``chunk`` pulses at a time so the overlap arithmetic
    runs vectorized without storing the whole trajectory.
    """
    for ind in indicators:
        _check_indicator(ind, q)
    n_total = params.n_pulses + 1
    out = {ind: np.empty(n_total) for ind in indicators}
    leak = {"max": 0.0, "first": None}
    dim = params.dim
    bu = np.empty((chunk, dim), dtype=complex)
    bp = np.empty((chunk, dim), dtype=complex)
    drift = 0.0
    filled = 0
    start = 0

    def flush():
        nonlocal drift
        U, P = bu[:filled], bp[:filled]
        for ind in indicators:
            out[ind][start:start + filled] = _values(ind, U, P, q, dense)
        norms = np.sum(np.abs(U) ** 2, axis=1)
        drift = max(drift, float(np.max(np.abs(norms - 1.0))))

    for n, u, p in iterate_pair(params):
        _leak_check(n, u, p, leak)
        bu[filled] = u
        bp[filled] = p
        filled += 1
        if filled == chunk:
            flush()
            start += filled
            filled = 0
    if filled:
        flush()
    run = IndicatorRun(
        {ind: TimeSeries(v, 0) for ind, v in out.items()},
        params,
        leak["max"],
        leak["first"],
        drift,
    )
    if run.leaked:
        _warn_leak(run.first_leak, run.max_leakage, params)
    return run


def params_dict(params: ModelParams) -> dict:
    return asdict(params)
