"""Dense linear algebra on a truncated Fock space.

States are plain complex numpy vectors of length ``dim`` (number states
``0..dim-1``) and operators are ``dim x dim`` complex arrays.  Propagators
are built from the eigendecomposition of their Hermitian generator so that
they are unitary on the truncated space to machine precision.
"""

from typing import Callable, Tuple

import numpy as np

from .errors import (
    ContractViolationError,
    InvalidDimensionError,
    RankDeficiencyError,
    TruncationLeakageError,
)

SUPPORT_CUTOFF = 1e-12
HERMITIAN_TOL = 1e-12
NORM_TOL = 1e-10


def _check_dim(dim):
    if int(dim) != dim or dim < 2:
        raise InvalidDimensionError(f"dimension must be an integer >= 2, got {dim!r}")
    return int(dim)


def _check_hermitian(H, tol=HERMITIAN_TOL):
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ContractViolationError(f"expected a square matrix, got shape {H.shape}")
    scale = max(1.0, float(np.max(np.abs(H))) if H.size else 1.0)
    dev = float(np.max(np.abs(H - H.conj().T))) if H.size else 0.0
    if dev > tol * scale:
        raise ContractViolationError(f"matrix is not Hermitian (max deviation {dev:.3e})")
    return H


def check_normalized(psi, tol=NORM_TOL):
    """Return ``psi`` as a complex vector, raising if its norm is not 1."""
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise ContractViolationError(f"state must be a vector, got shape {psi.shape}")
    norm2 = float(np.vdot(psi, psi).real)
    if abs(norm2 - 1.0) > tol:
        raise ContractViolationError(f"state is not normalized (squared norm {norm2!r})")
    return psi


def check_density_matrix(rho, tol=HERMITIAN_TOL):
    """Validate hermiticity, unit trace and positivity of ``rho``."""
    rho = np.asarray(rho, dtype=complex)
    _check_hermitian(rho, tol)
    tr = np.trace(rho)
    if abs(tr - 1.0) > tol * max(1, rho.shape[0]):
        raise ContractViolationError(f"density matrix trace is {tr!r}, expected 1")
    lam_min = float(np.linalg.eigvalsh(rho)[0])
    if lam_min < -1e-10:
        raise ContractViolationError(f"density matrix has negative eigenvalue {lam_min!r}")
    return rho


def vacuum_state(dim: int) -> np.ndarray:
    dim = _check_dim(dim)
    psi = np.zeros(dim, dtype=complex)
    psi[0] = 1.0
    return psi


def coherent_amplitudes(alpha: complex, dim: int) -> np.ndarray:
    """Unnormalized amplitudes ``alpha**n / sqrt(n!)`` for ``n < dim``."""
    dim = _check_dim(dim)
    amps = np.empty(dim, dtype=complex)
    amps[0] = 1.0
    for n in range(1, dim):
        amps[n] = amps[n - 1] * alpha / np.sqrt(n)
    return amps


def coherent_state(alpha: complex, dim: int) -> np.ndarray:
    """Truncated coherent state, renormalized on the retained levels.

    Raises TruncationLeakageError when ``|alpha|**2 > dim / 4``.
    """
    dim = _check_dim(dim)
    if abs(alpha) ** 2 > dim / 4:
        raise TruncationLeakageError(
            f"|alpha|^2 = {abs(alpha) ** 2:.4g} exceeds dim/4 = {dim / 4:.4g}"
        )
    amps = coherent_amplitudes(alpha, dim)
    return amps / np.linalg.norm(amps)


def ladder_operators(dim: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (annihilation, number, annihilation + creation) on ``dim`` levels."""
    dim = _check_dim(dim)
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)
    number = np.diag(np.arange(dim, dtype=float)).astype(complex)
    return a, number, a + a.conj().T


def _fix_phases(V):
    # Make the first non-negligible component of each column real-positive.
    V = V.copy()
    for j in range(V.shape[1]):
        col = V[:, j]
        idx = int(np.argmax(np.abs(col) > 1e-10 * np.max(np.abs(col))))
        c = col[idx]
        V[:, j] = col * (abs(c) / c)
    return V


def hermitian_eigendecomposition(H) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and phase-fixed unitary eigenvector matrix of ``H``.

    ``H == V @ diag(w) @ V.conj().T``.  Each eigenvector's first non-negligible
    component is made real and positive so repeated runs give identical output.
    """
    H = _check_hermitian(H)
    w, V = np.linalg.eigh(H)
    return w, _fix_phases(V)


def unitary_from_generator(H, scale: float) -> np.ndarray:
    """``exp(-1j * scale * H)`` via the eigendecomposition of ``H``."""
    w, V = hermitian_eigendecomposition(H)
    return (V * np.exp(-1j * scale * w)) @ V.conj().T


def matrix_function(
    rho, f: Callable[[np.ndarray], np.ndarray], support_cutoff: float = SUPPORT_CUTOFF
) -> np.ndarray:
    """Apply the scalar function ``f`` to the spectrum of ``rho``.

    Eigenvalues at or below ``support_cutoff`` are treated as exact zeros and
    mapped to 0 in the result, so ``x**0`` yields the support projector.  If
    ``f`` is singular at zero (``log``, negative powers) and such eigenvalues
    exist, RankDeficiencyError is raised with the offending eigenvalue.
    """
    rho = check_density_matrix(rho)
    w, V = hermitian_eigendecomposition(rho)
    support = w > support_cutoff
    if not np.all(support):
        with np.errstate(all="ignore"):
            f0 = np.asarray(f(np.zeros(1)), dtype=float)
        if not np.all(np.isfinite(f0)):
            raise RankDeficiencyError(
                f"function is singular on the kernel; eigenvalue {w[~support][0]!r} "
                f"<= cutoff {support_cutoff}",
                eigenvalue=float(w[~support][0]),
            )
    fw = np.zeros_like(w)
    fw[support] = f(w[support])
    return (V * fw) @ V.conj().T


def outer_product(psi) -> np.ndarray:
    """Projector ``|psi><psi|`` for a normalized state."""
    psi = check_normalized(psi)
    return np.outer(psi, psi.conj())


def leakage(psi, fraction: float = 0.1) -> float:
    """Population in the top ``fraction`` of retained Fock levels."""
    psi = np.asarray(psi)
    top = max(1, int(round(fraction * psi.shape[-1])))
    return float(np.sum(np.abs(psi[..., -top:]) ** 2))


def expectation(op, psi) -> complex:
    psi = np.asarray(psi)
    return complex(np.vdot(psi, op @ psi))
