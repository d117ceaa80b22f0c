"""Fast invariant checks run by ``kerrkld selftest``."""

from typing import List, NamedTuple

import numpy as np

from . import classical, divergence as dv, hilbert, qmap


class CheckResult(NamedTuple):
    group: str
    passed: bool
    worst: float
    tolerance: float


def _random_state(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def check_unitarity():
    worst = 0.0
    for dim in (2, 16, 128, 256):
        p = qmap.ModelParams(epsilon=0.7, dim=dim)
        for U in (qmap.kerr_unitary(p), qmap.kick_unitary(0.7, dim), qmap.kick_unitary(0.701, dim)):
            worst = max(worst, float(np.max(np.abs(U.conj().T @ U - np.eye(dim)))))
    return worst, 1e-10


def check_purity():
    p = qmap.ModelParams(epsilon=0.7, dim=64, n_pulses=2000)
    worst = 0.0
    for n, u, v in qmap.iterate_pair(p):
        if n % 250 == 0:
            rho = np.outer(u, u.conj())
            worst = max(worst, abs(float(np.trace(rho @ rho).real) - 1.0))
        worst = max(worst, abs(float(np.vdot(u, u).real) - 1.0))
    return worst, 1e-10


def check_pure_identities():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(50):
        dim = int(rng.integers(2, 17))
        psi, phi = _random_state(rng, dim), _random_state(rng, dim)
        rho, sigma = hilbert.outer_product(psi), hilbert.outer_product(phi)
        k1 = dv.linear_divergence(rho, sigma).value
        k2 = dv.nonlinear_divergence(rho, sigma).value
        f = dv.fidelity(psi, phi)
        worst = max(worst, abs(k1 - (1 - f)), abs(k2 - 1.5 * k1))
    return worst, 1e-12


def _random_spectrum(rng, dim):
    p = rng.uniform(0.05, 1.0, size=dim)
    return p / p.sum()


def check_kld_oracle():
    rng = np.random.default_rng(12)
    worst = 0.0
    for _ in range(100):
        dim = int(rng.integers(2, 17))
        p, s = _random_spectrum(rng, dim), _random_spectrum(rng, dim)
        Q, _ = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
        rho = (Q * p) @ Q.conj().T
        sigma = (Q * s) @ Q.conj().T
        ref = float(np.sum(p * np.log(p / s)))
        worst = max(worst, abs(dv.kld(rho, sigma).value - ref))
    return worst, 1e-10


def check_q_limit():
    # reports the largest error ratio err(h_next)/err(h); monotone decay means < 1
    rng = np.random.default_rng(13)
    worst = 0.0
    for _ in range(20):
        dim = int(rng.integers(2, 9))
        rho = np.diag(_random_spectrum(rng, dim)).astype(complex)
        sigma = np.diag(_random_spectrum(rng, dim)).astype(complex)
        ref = dv.kld(rho, sigma).value
        errs = [abs(dv.q_divergence(rho, sigma, 1 - h).value - ref) for h in (1e-1, 1e-2, 1e-3)]
        worst = max(worst, errs[1] / errs[0], errs[2] / errs[1])
    return worst, 1.0


def check_jacobian():
    rng = np.random.default_rng(14)
    worst = 0.0
    for _ in range(100):
        a = complex(*rng.uniform(-1.5, 1.5, size=2))
        eps = rng.uniform(0, 1)
        J = classical.classical_jacobian(a, eps, 1.0, np.pi)
        fd = np.empty((2, 2))
        h = 1e-6
        for j, d in enumerate((h, 1j * h)):
            plus = classical.classical_step(a + d, eps, 1.0, np.pi)
            minus = classical.classical_step(a - d, eps, 1.0, np.pi)
            diff = (plus - minus) / (2 * h)
            fd[:, j] = diff.real, diff.imag
        worst = max(worst, float(np.max(np.abs(J - fd)) / max(1.0, np.max(np.abs(J)))))
    return worst, 1e-6


CHECKS: List[tuple] = [
    ("unitarity", check_unitarity),
    ("purity", check_purity),
    ("pure-state identities", check_pure_identities),
    ("kld oracle", check_kld_oracle),
    ("q->1 limit", check_q_limit),
    ("jacobian", check_jacobian),
]


def run_selftest(corrupt: bool = False) -> List[CheckResult]:
    """Run every check group.  ``corrupt`` replaces tolerances by -1 to exercise failure."""
    results = []
    for name, fn in CHECKS:
        worst, tol = fn()
        if corrupt:
            tol = -1.0
        results.append(CheckResult(name, bool(worst < tol), worst, tol))
    return results
