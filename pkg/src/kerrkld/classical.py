"""Classical counterpart of the kicked Kerr oscillator.

The field amplitude ``alpha`` is kicked, ``alpha -> alpha - i eps``, and then
rotated by the intensity-dependent Kerr phase ``chi T |alpha|^2``.  The map is
area preserving.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .errors import OrbitDivergenceError

# finite-time exponents of regular orbits are O(log N / N) rather than 0
REGULAR_THRESHOLD = 1e-3


def classical_step(alpha, epsilon, chi, period):
    """One period of the classical map; works elementwise on arrays."""
    b = alpha - 1j * epsilon
    return b * np.exp(-1j * chi * period * (b.real**2 + b.imag**2))


def classical_jacobian(alpha, epsilon, chi, period) -> np.ndarray:
    """Analytic 2x2 Jacobian of :func:`classical_step` in (Re alpha, Im alpha)."""
    return _jacobian_entries(np.asarray(alpha, dtype=complex), epsilon, chi * period).reshape(2, 2)


def _jacobian_entries(alpha, epsilon, c):
    # b = x + iy after the kick; output (X, Y) = (x C + y S, y C - x S)
    # with C = cos(c r^2), S = sin(c r^2), r^2 = x^2 + y^2.
    x = alpha.real
    y = alpha.imag - epsilon
    th = c * (x * x + y * y)
    C, S = np.cos(th), np.sin(th)
    gx = -x * S + y * C  # dX/dtheta
    gy = -y * S - x * C  # dY/dtheta
    return np.array([C + 2 * c * x * gx, S + 2 * c * y * gx, -S + 2 * c * x * gy, C + 2 * c * y * gy])


class BifurcationPoint(NamedTuple):
    epsilon: float
    re_alpha: float
    im_alpha: float


@dataclass
class BifurcationScan:
    """Attractor samples in grid order: ``samples`` rows per epsilon value."""

    epsilon: np.ndarray
    re_alpha: np.ndarray
    im_alpha: np.ndarray
    samples: int

    def __len__(self):
        return self.epsilon.size

    def __iter__(self) -> Iterator[BifurcationPoint]:
        for e, x, y in zip(self.epsilon, self.re_alpha, self.im_alpha):
            yield BifurcationPoint(float(e), float(x), float(y))

    def column(self, i: int) -> np.ndarray:
        s = slice(i * self.samples, (i + 1) * self.samples)
        return self.re_alpha[s] + 1j * self.im_alpha[s]


def epsilon_grid(eps_min, eps_max, n_eps):
    if n_eps == 1:
        return np.array([float(eps_min)])
    return np.linspace(eps_min, eps_max, n_eps)


def bifurcation_scan(
    eps_min: float = 0.25,
    eps_max: float = 0.75,
    n_eps: int = 800,
    transient: int = 500,
    samples: int = 300,
    chi: float = 1.0,
    period: float = np.pi,
    alpha0: complex = 0j,
) -> BifurcationScan:
    """Iterate the map on a uniform epsilon grid and record the late orbit.

    With ``n_eps == 1`` the grid is the single value ``eps_min``.
    """
    if n_eps < 1 or samples < 1 or transient < 0:
        raise ValueError("n_eps and samples must be >= 1, transient >= 0")
    if n_eps > 1 and not eps_min < eps_max:
        raise ValueError("eps_min must be below eps_max")
    eps = epsilon_grid(eps_min, eps_max, n_eps)
    a = np.full(eps.size, complex(alpha0))
    for _ in range(transient):
        a = classical_step(a, eps, chi, period)
    rec = np.empty((eps.size, samples), dtype=complex)
    for j in range(samples):
        a = classical_step(a, eps, chi, period)
        rec[:, j] = a
    return BifurcationScan(
        np.repeat(eps, samples), rec.real.ravel(), rec.imag.ravel(), samples
    )


def distinct_count(points, tol: float = 1e-6) -> int:
    """Number of points that differ from every earlier point by more than ``tol``."""
    points = np.asarray(points, dtype=complex)
    kept = np.empty(0, dtype=complex)
    for z in points:
        if not np.any(np.abs(kept - z) <= tol):
            kept = np.append(kept, z)
    return kept.size


def _lyapunov_block(eps, chi, period, alpha0, transient, iterations):
    c = chi * period
    a = np.full(eps.size, complex(alpha0))
    with np.errstate(all="ignore"):
        for _ in range(transient):
            a = classical_step(a, eps, chi, period)
        v = np.vstack([np.ones(eps.size), np.zeros(eps.size)])
        acc = np.zeros(eps.size)
        for _ in range(iterations):
            j00, j01, j10, j11 = _jacobian_entries(a, eps, c)
            v = np.vstack([j00 * v[0] + j01 * v[1], j10 * v[0] + j11 * v[1]])
            norm = np.hypot(v[0], v[1])
            acc += np.log(norm)
            v = v / norm
            a = classical_step(a, eps, chi, period)
    out = acc / iterations
    out[~(np.isfinite(out) & np.isfinite(a))] = np.nan
    return out


def lyapunov_sweep(
    epsilons,
    chi: float = 1.0,
    period: float = np.pi,
    alpha0: complex = 0j,
    transient: int = 500,
    iterations: int = 20_000,
    threads: int = None,
) -> np.ndarray:
    """Largest Lyapunov exponent (per kick, natural log) for each epsilon.

    Tangent vectors are renormalized every step.  Non-finite orbits give NaN.
    ``threads`` (default: ``KERRKLD_THREADS`` or 1) splits the grid into
    blocks; results come back in grid order.
    """
    if iterations < 1000:
        raise ValueError("iterations must be >= 1000")
    eps = np.atleast_1d(np.asarray(epsilons, dtype=float))
    if threads is None:
        threads = int(os.environ.get("KERRKLD_THREADS", "1"))
    threads = max(1, min(threads, eps.size))
    if threads == 1:
        return _lyapunov_block(eps, chi, period, alpha0, transient, iterations)
    blocks = np.array_split(eps, threads)
    with ThreadPoolExecutor(threads) as pool:
        parts = pool.map(
            lambda e: _lyapunov_block(e, chi, period, alpha0, transient, iterations), blocks
        )
        return np.concatenate(list(parts))


def lyapunov_exponent(
    epsilon: float,
    chi: float = 1.0,
    period: float = np.pi,
    alpha0: complex = 0j,
    transient: int = 500,
    iterations: int = 20_000,
) -> float:
    """Largest Lyapunov exponent of the orbit from ``alpha0``.

    Raises OrbitDivergenceError if the orbit becomes non-finite.
    """
    val = lyapunov_sweep([epsilon], chi, period, alpha0, transient, iterations, threads=1)[0]
    if not np.isfinite(val):
        raise OrbitDivergenceError(f"orbit diverged at epsilon={epsilon}")
    return float(val)


def is_chaotic(exponent: float, threshold: float = REGULAR_THRESHOLD) -> bool:
    return exponent > threshold
