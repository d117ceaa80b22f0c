"""Distance-like indicators between two quantum states.

Every indicator has a dense density-matrix form, written out term by term,
and the truncated divergences and fidelity also have a pure-state form that
works on state vectors through overlaps only.  The simulator uses the
pure-state form at scale; the dense one is the reference.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ContractViolationError, DomainError, RankDeficiencyError
from .hilbert import (
    SUPPORT_CUTOFF,
    check_density_matrix,
    check_normalized,
    hermitian_eigendecomposition,
    matrix_function,
)

# rho-weight tolerated on sigma's kernel before the relative entropy is infinite
SUPPORT_WEIGHT_TOL = 1e-10


@dataclass(frozen=True)
class DivergenceValue:
    value: float
    indicator: str
    rank_deficient: bool = False

    def __float__(self):
        return float(self.value)


def _pair(rho, sigma):
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ContractViolationError(
            f"dimension mismatch: {rho.shape} vs {sigma.shape}"
        )
    return rho, sigma


def kld(rho, sigma, support_cutoff: float = SUPPORT_CUTOFF) -> DivergenceValue:
    """Quantum relative entropy ``Tr[rho (ln rho - ln sigma)]``.

    Terms on the kernel of ``rho`` contribute nothing.  When ``rho`` has weight
    on the kernel of ``sigma`` the divergence is infinite and the result comes
    back with ``rank_deficient=True`` and ``value=inf``.
    """
    rho, sigma = _pair(rho, sigma)
    check_density_matrix(rho)
    check_density_matrix(sigma)
    p, _ = hermitian_eigendecomposition(rho)
    s, V = hermitian_eigendecomposition(sigma)
    # diagonal of rho in sigma's eigenbasis
    weights = np.einsum("ij,ik,kj->j", V.conj(), rho, V).real
    kernel = s <= support_cutoff
    if np.sum(weights[kernel]) > SUPPORT_WEIGHT_TOL:
        return DivergenceValue(np.inf, "kld", rank_deficient=True)
    pp = p[p > support_cutoff]
    entropy_term = float(np.sum(pp * np.log(pp)))
    cross_term = float(np.sum(weights[~kernel] * np.log(s[~kernel])))
    return DivergenceValue(entropy_term - cross_term, "kld")


def linear_divergence(rho, sigma) -> DivergenceValue:
    """``Tr[rho (rho - sigma)]``."""
    rho, sigma = _pair(rho, sigma)
    return DivergenceValue(float(np.trace(rho @ (rho - sigma)).real), "k1")


def nonlinear_divergence(rho, sigma) -> DivergenceValue:
    """``Tr[rho (rho - (rho-1)^2/2 - sigma + (sigma-1)^2/2)]`` with 1 the identity."""
    rho, sigma = _pair(rho, sigma)
    one = np.eye(rho.shape[0])
    r1 = rho - one
    s1 = sigma - one
    inner = rho - 0.5 * (r1 @ r1) - sigma + 0.5 * (s1 @ s1)
    return DivergenceValue(float(np.trace(rho @ inner).real), "k2")


def jackson_derivative(f: Callable[[float], float], x: float, q: float) -> float:
    """Jackson q-derivative ``[f(qx) - f(x)] / (x (q - 1))``."""
    if x == 0:
        raise DomainError("Jackson derivative undefined at x = 0")
    if q == 1:
        raise DomainError("Jackson derivative undefined at q = 1")
    return (f(q * x) - f(x)) / (x * (q - 1))


def q_divergence(rho, sigma, q: float, support_cutoff: float = SUPPORT_CUTOFF) -> DivergenceValue:
    """q-divergence: Jackson derivative of ``Tr(rho^x sigma^(1-x))`` taken at x = 1.

    Requires ``0 < q < 1`` and a full-rank ``sigma``.  Tends to :func:`kld`
    as ``q -> 1``.
    """
    if not 0 < q < 1:
        raise DomainError(f"q must lie in (0, 1), got {q!r}")
    rho, sigma = _pair(rho, sigma)
    s = np.linalg.eigvalsh(check_density_matrix(sigma))
    if s[0] <= support_cutoff:
        raise RankDeficiencyError(
            f"q-divergence needs a full-rank reference state; eigenvalue {s[0]!r}",
            eigenvalue=float(s[0]),
        )

    def trace_power(x):
        rx = matrix_function(rho, lambda w: w**x, support_cutoff)
        sx = matrix_function(sigma, lambda w: w ** (1 - x), support_cutoff)
        return float(np.trace(rx @ sx).real)

    return DivergenceValue(jackson_derivative(trace_power, 1.0, q), "kq")


def fidelity(psi, phi) -> float:
    """Squared overlap ``|<psi|phi>|^2`` of two normalized states."""
    psi = check_normalized(psi)
    phi = check_normalized(phi)
    if psi.shape != phi.shape:
        raise ContractViolationError(f"dimension mismatch: {psi.shape} vs {phi.shape}")
    return float(abs(np.vdot(psi, phi)) ** 2)


# Pure-state forms.  With rho = |psi><psi|, sigma = |phi><phi| and
# a = <psi|psi>, b = <phi|phi>, s = |<psi|phi>|^2 the traces reduce to
#   Tr rho^2 = a^2, Tr rho^3 = a^3, Tr rho sigma = s, Tr rho sigma^2 = b s,
# so norms are carried explicitly instead of assumed to be 1.

def _overlaps(psi, phi):
    # same product/summation order for norms and overlap, so psi == phi cancels exactly
    a = np.sum(psi.conj() * psi, axis=-1).real
    b = np.sum(phi.conj() * phi, axis=-1).real
    s = np.abs(np.sum(psi.conj() * phi, axis=-1)) ** 2
    return a, b, s


def linear_divergence_pure(psi, phi):
    """Pure-state form of :func:`linear_divergence`; vectorized over leading axes."""
    a, _, s = _overlaps(np.asarray(psi), np.asarray(phi))
    return a**2 - s


def nonlinear_divergence_pure(psi, phi):
    """Pure-state form of :func:`nonlinear_divergence`; vectorized over leading axes."""
    a, b, s = _overlaps(np.asarray(psi), np.asarray(phi))
    return 2 * a**2 - 0.5 * a**3 - 2 * s + 0.5 * b * s


def fidelity_pure(psi, phi):
    """Unchecked, vectorized squared overlap."""
    return np.abs(np.sum(np.conj(psi) * phi, axis=-1)) ** 2
