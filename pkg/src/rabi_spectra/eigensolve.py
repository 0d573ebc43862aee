"""Eigenvalue solvers with truncation-convergence certification.

Two independent routes are kept deliberately decoupled so each can serve as
an oracle for the other:

* Sturm-sequence bisection on symmetric tridiagonal matrices (the production
  path; vectorized over eigenvalue brackets), and
* classical cyclic Jacobi rotations on small dense symmetric matrices.

Truncation effects of the infinite Fock chains are certified by doubling the
truncation dimension until the requested lowest levels stop moving.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ChainSelector, ModelParams, SymTriMatrix, build_chain

__all__ = [
    "ConvergenceError",
    "Spectrum",
    "sturm_count",
    "eigenvalues_bisection",
    "eigenvalues_jacobi",
    "converged_levels",
]

JACOBI_MAX_DIM = 512
DEFAULT_MAX_CHAIN_DIM = 2**20


class ConvergenceError(RuntimeError):
    """Truncation doubling exceeded the configured dimension cap."""


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues with a trusted-count watermark.

    ``trusted_count`` is the number of lowest levels certified stable under
    truncation doubling; direct (non-truncated) solves trust every value.
    ``truncation_dim`` records the matrix dimension the values came from.
    """

    values: np.ndarray
    trusted_count: int
    truncation_dim: int
    tol: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if not 0 <= self.trusted_count <= self.values.size:
            raise ValueError("trusted_count out of range")


def _gershgorin(t: SymTriMatrix) -> tuple[float, float]:
    radius = np.zeros(t.n)
    radius[:-1] += np.abs(t.off)
    radius[1:] += np.abs(t.off)
    return float(np.min(t.diag - radius)), float(np.max(t.diag + radius))


def _pivmin(t: SymTriMatrix) -> float:
    # Standard safeguard scale for Sturm pivots (LAPACK-style).
    safmin = np.finfo(float).tiny
    off_sq_max = float(np.max(t.off**2)) if t.off.size else 0.0
    return safmin * max(1.0, off_sq_max)


def _sturm_counts(t: SymTriMatrix, xs: np.ndarray) -> np.ndarray:
    """Number of eigenvalues strictly below each shift in ``xs``."""
    pivmin = _pivmin(t)
    off_sq = t.off**2
    q = t.diag[0] - xs
    q = np.where(np.abs(q) < pivmin, -pivmin, q)
    count = (q < 0).astype(np.int64)
    for i in range(1, t.n):
        q = t.diag[i] - xs - off_sq[i - 1] / q
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        count += q < 0
    return count


def sturm_count(t: SymTriMatrix, x: float) -> int:
    """Count eigenvalues of ``t`` strictly less than ``x``.

    Monotone non-decreasing in x; pivot breakdown at exact eigenvalue hits is
    handled by the standard epsilon-shift safeguard.
    """
    return int(_sturm_counts(t, np.asarray([x], dtype=float))[0])


def _bisect_lowest(t: SymTriMatrix, k: int, tol: float) -> np.ndarray:
    """Lowest ``k`` eigenvalues, each bracketed to width <= tol."""
    lo_bound, hi_bound = _gershgorin(t)
    lo = np.full(k, lo_bound)
    hi = np.full(k, hi_bound)
    width = hi_bound - lo_bound
    if width <= 0.0:
        return (lo + hi) / 2.0
    idx = np.arange(k)
    for _ in range(max(1, int(math.ceil(math.log2(width / tol))) + 1)):
        mid = 0.5 * (lo + hi)
        counts = _sturm_counts(t, mid)
        below = counts <= idx
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.max(hi - lo) <= tol:
            break
    return 0.5 * (lo + hi)


def eigenvalues_bisection(t: SymTriMatrix, tol: float) -> Spectrum:
    """All eigenvalues of a symmetric tridiagonal matrix by Sturm bisection.

    Brackets start from the Gershgorin interval, so no eigenvalue estimates
    are needed from the caller.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    vals = _bisect_lowest(t, t.n, tol)
    return Spectrum(values=np.sort(vals), trusted_count=t.n, truncation_dim=t.n, tol=tol)


def eigenvalues_jacobi(a: np.ndarray, tol: float) -> Spectrum:
    """Eigenvalues of a small dense symmetric matrix by cyclic Jacobi rotations.

    Independent oracle for the bisection route: sweeps rotate away every
    off-diagonal element until the off-diagonal Frobenius mass drops below
    ``tol``, then the sorted diagonal is returned.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise ValueError("matrix must be square")
    if n > JACOBI_MAX_DIM:
        raise ValueError(f"dimension {n} exceeds the oracle-scale guard {JACOBI_MAX_DIM}")
    scale = max(1.0, float(np.max(np.abs(a))))
    if float(np.max(np.abs(a - a.T))) > 1e-12 * scale:
        raise ValueError("matrix is not symmetric to 1e-12")
    a = 0.5 * (a + a.T)

    def off_mass(m: np.ndarray) -> float:
        strict = m - np.diag(np.diag(m))
        return float(np.sqrt(np.sum(strict * strict)))

    for _ in range(60):
        if off_mass(a) < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                tpar = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(tpar * tpar + 1.0)
                s = tpar * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
    else:
        raise ConvergenceError("Jacobi sweeps failed to reach the requested tolerance")
    return Spectrum(values=np.sort(np.diag(a)), trusted_count=n, truncation_dim=n, tol=tol)


def converged_levels(
    params: ModelParams,
    chain: ChainSelector,
    level_count: int,
    tol: float,
    max_dim: int = DEFAULT_MAX_CHAIN_DIM,
) -> Spectrum:
    """Lowest ``level_count`` chain eigenvalues, certified under truncation doubling.

    The chain dimension starts at max(4 * level_count, 64) and doubles until
    the requested levels move by less than ``tol`` between successive
    truncations; the certified values and the final dimension are returned.

    Raises:
        ConvergenceError: if the dimension cap is exceeded before the levels
            stabilize.
    """
    if level_count < 1:
        raise ValueError("level_count must be at least 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    n_dim = max(4 * level_count, 64)
    # Bracket eigenvalues a bit tighter than the certification tolerance so
    # the doubling comparison measures truncation movement, not bisection slop.
    bisect_tol = tol / 16.0
    prev = _bisect_lowest(build_chain(params, chain, n_dim), level_count, bisect_tol)
    while 2 * n_dim <= max_dim:
        n_dim *= 2
        vals = _bisect_lowest(build_chain(params, chain, n_dim), level_count, bisect_tol)
        if float(np.max(np.abs(vals - prev))) < tol:
            return Spectrum(
                values=np.sort(vals),
                trusted_count=level_count,
                truncation_dim=n_dim,
                tol=tol,
            )
        prev = vals
    raise ConvergenceError(
        f"levels not stable under doubling up to chain dimension {n_dim} (cap {max_dim})"
    )
