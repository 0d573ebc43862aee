"""Transformed perturbation matrix, correction terms, and the three-term formula.

After the squeeze transformation the branch Hamiltonian becomes
diag(omega (n + 1/2) - 1/2) + V~ with the bounded, non-compact perturbation

    V~_{m,n} = (-1)^{floor(n/2)} (Delta/2) sqrt(omega) g^{(m+n)/2}
               sqrt(m!/n!) P_n^{(s)}(omega/(2g)),     s = (m-n)/2, m >= n,

symmetric in (m, n) and vanishing across parities.  This module evaluates
V~ (scalar and row-wise), its diagonal asymptotics, the second-order
correction sums, the generic resolvent gap bound delta_n, and assembles the
three-term asymptotic formula

    E_n^{+-} = n omega + (omega - 1)/2 +- V~_nn-asymptotics + O(ln n / n)

against certified numerical eigenvalues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import mpmath as mp
import numpy as np

from . import polys
from .eigensolve import Spectrum, converged_levels
from .model import Branch, ChainSelector, ModelParams, Parity
from .squeeze import MAX_ELEMENT_INDEX

__all__ = [
    "DegenerateGapError",
    "AsymptoticBreakdown",
    "SpectrumModel",
    "v_tilde",
    "v_tilde_row",
    "v_tilde_diag_asym",
    "second_order",
    "second_order_tail",
    "k_norm_sq",
    "k_norm_sq_tail",
    "row_tail_mass",
    "delta_n",
    "three_term",
    "residual_study",
]


class DegenerateGapError(ValueError):
    """Consecutive unperturbed eigenvalues coincide; the gap radius vanishes."""


@dataclass(frozen=True)
class AsymptoticBreakdown:
    """Per-level decomposition of the three-term asymptotic formula.

    ``three_term`` is constructed as linear + shift + oscillatory exactly;
    ``numeric`` and ``residual`` stay None until certified eigenvalues are
    attached (see :func:`residual_study`).
    """

    n: int
    linear: float
    shift: float
    oscillatory: float
    three_term: float
    numeric: float | None = None
    residual: float | None = None

    @property
    def res_times_n(self) -> float | None:
        return None if self.residual is None else self.residual * self.n

    @property
    def res_n_over_log_n(self) -> float | None:
        if self.residual is None:
            return None
        return self.residual * self.n / math.log(self.n)


@dataclass(frozen=True)
class SpectrumModel:
    """Tabulated unperturbed eigenvalues and perturbation row norms.

    ``mu`` must be strictly increasing over the tabulated range; index m of
    ``row_norms`` holds ||R e_m||.
    """

    mu: np.ndarray
    row_norms: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "mu", np.asarray(self.mu, dtype=float))
        object.__setattr__(self, "row_norms", np.asarray(self.row_norms, dtype=float))
        if self.mu.size != self.row_norms.size:
            raise ValueError("mu and row_norms must have equal length")
        if np.any(np.diff(self.mu) <= 0):
            raise ValueError("mu must be strictly increasing")

    @classmethod
    def from_functions(cls, mu_fn, row_norm_fn, size: int) -> "SpectrumModel":
        ms = np.arange(size)
        return cls(
            mu=np.array([mu_fn(int(m)) for m in ms], dtype=float),
            row_norms=np.array([row_norm_fn(int(m)) for m in ms], dtype=float),
        )


def _log_fact_table(top: int) -> np.ndarray:
    """lt[j] = log(j!) for j = 0..top (cumulative-sum table)."""
    return np.cumsum(np.concatenate(([0.0], np.log(np.arange(1.0, top + 1)))))


def v_tilde(m: int, n: int, params: ModelParams) -> float:
    """Single element of the transformed perturbation matrix."""
    if m < 0 or n < 0:
        raise ValueError("indices must be non-negative")
    if m > MAX_ELEMENT_INDEX or n > MAX_ELEMENT_INDEX:
        raise ValueError(f"indices exceed the configured log-space range {MAX_ELEMENT_INDEX}")
    if (m - n) % 2:
        return 0.0
    if params.delta == 0.0:
        return 0.0
    if m < n:
        m, n = n, m
    s = (m - n) // 2
    x = params.omega / (2.0 * params.g)
    parts = polys.p_fast_parts(n, s, x)
    if parts.sign == 0.0:
        return 0.0
    log_abs = (
        math.log(abs(params.delta) / 2.0)
        + 0.5 * math.log(params.omega)
        + 0.5 * (m + n) * math.log(params.g)
        + 0.5 * (math.lgamma(m + 1) - math.lgamma(n + 1))
        + parts.log_abs
    )
    sign = (-1.0) ** (n // 2) * math.copysign(1.0, params.delta) * parts.sign
    if log_abs < -745.0:
        return 0.0
    return sign * math.exp(log_abs)


def _row_double(g: float, delta: float, n: int, ks: np.ndarray, x: float,
                lg: np.ndarray) -> tuple[np.ndarray, float]:
    """Double log-space row evaluation; returns (values, max scaled log term)."""
    log2x = math.log(2.0 * x)
    base = math.log(abs(delta) / 2.0) + 0.5 * math.log(math.sqrt(1.0 - 4.0 * g * g))
    logg = math.log(g)
    values = np.zeros(ks.size)
    worst = -math.inf
    for i, k in enumerate(ks):
        d = min(int(k), n)
        mbig = max(int(k), n)
        s = abs(int(k) - n) // 2
        js = np.arange(d // 2 + 1)
        pref = (
            base
            + 0.5 * (k + n) * logg
            + 0.5 * (lg[mbig] - lg[d])
            + lg[d]
            + (d - 2 * js) * log2x
            - lg[js]
            - lg[d - 2 * js]
            - lg[s + js]
        )
        peak = float(np.max(pref))
        worst = max(worst, peak + math.log(js.size))
        signs = np.where(js % 2 == 0, 1.0, -1.0)
        total = float(np.sum(signs * np.exp(pref - peak)))
        lsign = (-1.0) ** (d // 2) * math.copysign(1.0, delta)
        if total != 0.0 and peak + math.log(abs(total)) > -745.0:
            values[i] = lsign * math.copysign(1.0, total) * math.exp(peak + math.log(abs(total)))
    return values, worst


def _row_mp(g: float, delta: float, n: int, ks: np.ndarray, dps: int) -> np.ndarray:
    """Multiprecision row evaluation at a fixed working precision.

    For the part k >= n all entries share the degree-n coefficient table and
    a sliding inverse-factorial table over s; each entry below the diagonal
    is its own lower-degree polynomial.
    """
    values = np.zeros(ks.size)
    with mp.workdps(dps):
        gm = mp.mpf(g)
        om = mp.sqrt(1 - 4 * gm * gm)
        x2 = om / gm  # 2x
        half = mp.mpf(abs(delta)) / 2 * mp.sqrt(om)
        sd = math.copysign(1.0, delta)
        # Coefficients a_j = (-1)^j n! (2x)^{n-2j} / (j! (n-2j)!).
        a = [x2**n]
        for j in range(1, n // 2 + 1):
            a.append(-a[-1] * (n - 2 * j + 2) * (n - 2 * j + 1) / (j * x2 * x2))
        s_max = (int(ks[-1]) - n) // 2 if ks[-1] >= n else 0
        inv_fact = [mp.mpf(1)]
        for t in range(1, s_max + n // 2 + 1):
            inv_fact.append(inv_fact[-1] / t)
        sign_n = (-1.0) ** (n // 2) * sd
        pref = half * gm**n  # prefactor at k = n: (|Delta|/2) sqrt(om) g^n
        pref_down = pref
        for i, k in enumerate(ks):
            k = int(k)
            if k >= n:
                s = (k - n) // 2
                if k > n:
                    pref *= gm * mp.sqrt(mp.mpf((k - 1) * k))
                poly = mp.fsum(a[j] * inv_fact[s + j] for j in range(len(a)))
                values[i] = float(sign_n * pref * poly)
        # Walk downward for k < n (reverse order keeps the prefactor sliding).
        for i in range(ks.size - 1, -1, -1):
            k = int(ks[i])
            if k >= n:
                continue
            pref_down *= mp.sqrt(mp.mpf((k + 1) * (k + 2))) / gm
            s = (n - k) // 2
            term = x2**k / mp.factorial(s)
            poly = term
            for j in range(1, k // 2 + 1):
                term = -term * (k - 2 * j + 2) * (k - 2 * j + 1) / (j * x2 * x2 * (s + j))
                poly += term
            values[i] = float((-1.0) ** (k // 2) * sd * pref_down * poly)
    return values


@lru_cache(maxsize=64)
def _v_row_cached(g: float, delta: float, n: int, cutoff: int) -> tuple[np.ndarray, np.ndarray]:
    """Row V~_{k,n} for k = parity(n)..cutoff sharing n's parity.

    Runs the vectorized double pass first; if the largest intermediate term
    would leave absolute roundoff above ~1e-13, redoes the row at a
    multiprecision level sized from that term.
    """
    parity = n % 2
    ks = np.arange(parity, cutoff + 1, 2)
    if delta == 0.0:
        return ks, np.zeros(ks.size)
    omega = math.sqrt(1.0 - 4.0 * g * g)
    x = omega / (2.0 * g)
    lg = _log_fact_table(int(max(cutoff, n)) + 1)
    values, worst = _row_double(g, delta, n, ks, x, lg)
    # Double-path absolute roundoff is ~50 eps times the largest scaled term
    # mass (the factor covers the cumulative log-factorial table bias).
    abs_tol = 1e-13
    if worst > 700.0 or math.exp(min(worst, 700.0)) * 50.0 * np.finfo(float).eps > abs_tol:
        dps = int((worst - math.log(abs_tol)) / math.log(10.0)) + 12
        values = _row_mp(g, delta, n, ks, max(dps, 30))
    values.setflags(write=False)
    return ks, values


def v_tilde_row(params: ModelParams, n: int, cutoff: int) -> tuple[np.ndarray, np.ndarray]:
    """All same-parity elements V~_{k,n}, k <= cutoff, as (indices, values)."""
    if n < 0 or cutoff < n:
        raise ValueError("need 0 <= n <= cutoff")
    if cutoff > MAX_ELEMENT_INDEX:
        raise ValueError(f"cutoff exceeds the configured range {MAX_ELEMENT_INDEX}")
    return _v_row_cached(params.g, params.delta, n, cutoff)


def v_tilde_diag_asym(n: int, params: ModelParams) -> float:
    """Leading asymptotic term of the diagonal element V~_nn.

       (-1)^{floor(n/2)} (Delta/2) sqrt(omega/(pi g n)) cos(A (n+1/2) - pi n/2),

    A = arctan(omega/(2g)); the dropped remainder is O(n^{-3/2}).
    """
    if n < 1:
        raise ValueError("requires n >= 1")
    amplitude = (params.delta / 2.0) * math.sqrt(
        params.omega / (math.pi * params.g * n)
    )
    phase = params.a_phase * (n + 0.5) - math.pi * n / 2.0
    return (-1.0) ** (n // 2) * amplitude * math.cos(phase)


def row_tail_mass(n: int, params: ModelParams, cutoff: int) -> float:
    """Upper bound on sum_{k > cutoff} V~_kn^2 from the row-sum identity.

    The full row satisfies sum_k V~_kn^2 = Delta^2/4 (V~ squares to a
    multiple of the identity), so the tail is the deficit of the partial sum.
    """
    _, vals = v_tilde_row(params, n, cutoff)
    return max(params.delta**2 / 4.0 - float(np.sum(vals * vals)), 0.0)


def second_order(n: int, params: ModelParams, cutoff: int) -> float:
    """Second-order correction sum_{k != n, k <= cutoff} V~_nk^2 / ((n-k) omega).

    Stated in physical units: the oscillator reduction divides the problem
    by omega, and mapping the correction back multiplies by omega once,
    leaving a single 1/omega on the second-order term.
    """
    if cutoff <= 2 * n:
        raise ValueError("cutoff too small: requires cutoff > 2n")
    ks, vals = v_tilde_row(params, n, cutoff)
    mask = ks != n
    return float(np.sum(vals[mask] ** 2 / (n - ks[mask]))) / params.omega


def second_order_tail(n: int, params: ModelParams, cutoff: int) -> float:
    """Bound on the neglected |tail| of :func:`second_order` past the cutoff."""
    return row_tail_mass(n, params, cutoff) / (params.omega * (cutoff + 1 - n))


def k_norm_sq(n: int, params: ModelParams, cutoff: int) -> float:
    """||K e_n||^2 = sum_{k != n, k <= cutoff} V~_kn^2 / ((k-n)^2 omega^2).

    K is the anti-hermitian similarity generator of the scaled (mu_n = n)
    problem, hence the 1/omega^2.
    """
    if cutoff <= 2 * n:
        raise ValueError("cutoff too small: requires cutoff > 2n")
    ks, vals = v_tilde_row(params, n, cutoff)
    mask = ks != n
    return float(np.sum(vals[mask] ** 2 / (ks[mask] - n) ** 2)) / params.omega**2


def k_norm_sq_tail(n: int, params: ModelParams, cutoff: int) -> float:
    """Bound on the neglected tail of :func:`k_norm_sq` past the cutoff."""
    return row_tail_mass(n, params, cutoff) / (params.omega**2 * (cutoff + 1 - n) ** 2)


def delta_n(model: SpectrumModel, n: int, m_cutoff: int) -> float:
    """Resolvent gap bound controlling the perturbative eigenvalue formula.

    With r_n = min(mu_n - mu_{n-1}, mu_{n+1} - mu_n)/2,

        delta_n^2 = sum_{m <= n} ||Re_m||^2 / (mu_m - mu_n + r_n)^2
                  + sum_{n < m <= cutoff} ||Re_m||^2 / (mu_m - mu_n - r_n)^2

    (the m = n term contributes ||Re_n||^2 / r_n^2).

    Raises:
        DegenerateGapError: if a neighbouring gap vanishes.
    """
    mu = model.mu
    if not 1 <= n <= mu.size - 2:
        raise ValueError("n must be interior to the tabulated range")
    if m_cutoff >= mu.size:
        raise ValueError("mu must be tabulated beyond m_cutoff")
    gap = min(mu[n] - mu[n - 1], mu[n + 1] - mu[n])
    if gap <= 0.0:
        raise DegenerateGapError(f"degenerate gap at n={n}")
    r_n = gap / 2.0
    ms = np.arange(m_cutoff + 1)
    denom = np.where(ms <= n, mu[ms] - mu[n] + r_n, mu[ms] - mu[n] - r_n)
    return float(np.sqrt(np.sum((model.row_norms[ms] / denom) ** 2)))


def three_term(n: int, params: ModelParams, branch: Branch) -> AsymptoticBreakdown:
    """Three-term asymptotic breakdown of level n (numeric fields unfilled)."""
    if n < 1:
        raise ValueError("requires n >= 1")
    linear = n * params.omega
    shift = (params.omega - 1.0) / 2.0
    oscillatory = branch.sign * v_tilde_diag_asym(n, params)
    return AsymptoticBreakdown(
        n=n,
        linear=linear,
        shift=shift,
        oscillatory=oscillatory,
        three_term=linear + shift + oscillatory,
    )


def residual_study(
    params: ModelParams,
    branch: Branch,
    n_min: int,
    n_max: int,
    tol: float,
    max_dim: int | None = None,
) -> list[AsymptoticBreakdown]:
    """Three-term breakdowns with certified eigenvalues for n in [n_min, n_max].

    Fock index n lives at position floor(n/2) of its parity chain, and levels
    are matched to chain indices in sorted order (no crossing tracking; the
    asymptotic regime has well-separated levels).  Certified eigenvalues come
    from :func:`rabi_spectra.eigensolve.converged_levels`; its convergence
    failures propagate.
    """
    if n_min < 10:
        raise ValueError("requires n_min >= 10")
    if n_max < n_min:
        raise ValueError("requires n_max >= n_min")
    kwargs = {} if max_dim is None else {"max_dim": max_dim}
    needed = {n % 2 for n in range(n_min, n_max + 1)}
    spectra: dict[int, Spectrum] = {}
    for parity in (Parity.EVEN, Parity.ODD):
        p = parity.offset
        if p not in needed:
            continue
        level_count = (n_max - p) // 2 + 1
        spectra[p] = converged_levels(
            params, ChainSelector(branch, parity), level_count, tol, **kwargs
        )
    out = []
    for n in range(n_min, n_max + 1):
        breakdown = three_term(n, params, branch)
        numeric = float(spectra[n % 2].values[(n - n % 2) // 2])
        out.append(
            replace(breakdown, numeric=numeric, residual=numeric - breakdown.three_term)
        )
    return out
