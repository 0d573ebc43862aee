"""Model parameters and truncated Hamiltonian matrices.

The full Hamiltonian is the two-level system coupled quadratically to one
bosonic mode,

    H = (Delta/2) sigma_z + a+ a + g (a^2 + a+^2) sigma_x ,

with 0 < g < 1/2 (discrete spectrum) and real Delta.  It splits into two
branches H_plus / H_minus that act on a single Fock chain as

    H_sigma = a+ a + g (a^2 + a+^2) + sigma (Delta/2) diag{(-1)^floor(n/2)} ,

and each branch further decouples into an even-index and an odd-index Fock
chain, which are symmetric tridiagonal in the Fock basis.  This module builds
those truncated matrices; eigensolving lives in :mod:`rabi_spectra.eigensolve`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DomainError",
    "Branch",
    "Parity",
    "ChainSelector",
    "ModelParams",
    "SymTriMatrix",
    "BandedMatrix",
    "derive_params",
    "build_chain",
    "build_full_branch",
]


class DomainError(ValueError):
    """Coupling outside the discrete-spectrum domain 0 < g < 1/2."""


class Branch(enum.Enum):
    """Which of the two invariant branches: sign of the diagonal perturbation."""

    PLUS = 1
    MINUS = -1

    @property
    def sign(self) -> int:
        return self.value


class Parity(enum.Enum):
    """Fock-index parity of a decoupled chain."""

    EVEN = 0
    ODD = 1

    @property
    def offset(self) -> int:
        return self.value


@dataclass(frozen=True)
class ChainSelector:
    """One of the four decoupled chains: branch sign x Fock parity."""

    branch: Branch
    parity: Parity


@dataclass(frozen=True)
class ModelParams:
    """Physical couplings plus all derived constants.

    This is a plain carrier; :func:`derive_params` is the validated
    constructor and guarantees the algebraic relations between the fields:
    ``omega = sqrt(1 - 4 g^2)``, ``tanh(4 lam) = 2 g``,
    ``gamma = tanh(2 lam)/2``, ``beta = -log(cosh(2 lam))`` and
    ``a_phase = arctan(omega / (2 g))``.
    """

    g: float
    delta: float
    omega: float
    lam: float
    gamma: float
    beta: float
    a_phase: float


def derive_params(g: float, delta: float) -> ModelParams:
    """Derive all squeeze/asymptotics constants from the couplings.

    The squeeze parameter solves tanh(4 lam) = 2 g and is evaluated in the
    closed form lam = artanh(2 g)/4 = (log1p(2g) - log1p(-2g))/8, which is
    stable for g near 0 and near 1/2.

    Raises:
        DomainError: if g is outside (0, 1/2), where the spectrum is no
            longer discrete (or the model degenerates).
    """
    if not (0.0 < g < 0.5) or math.isnan(g):
        raise DomainError(
            f"coupling g={g!r} outside the discrete-spectrum domain (0, 1/2)"
        )
    lam = (math.log1p(2.0 * g) - math.log1p(-2.0 * g)) / 8.0
    omega = math.sqrt((1.0 - 2.0 * g) * (1.0 + 2.0 * g))
    gamma = math.tanh(2.0 * lam) / 2.0
    beta = -math.log(math.cosh(2.0 * lam))
    a_phase = math.atan2(omega, 2.0 * g)
    return ModelParams(
        g=g, delta=delta, omega=omega, lam=lam, gamma=gamma, beta=beta, a_phase=a_phase
    )


@dataclass(frozen=True)
class SymTriMatrix:
    """Symmetric tridiagonal matrix stored as diagonal + off-diagonal arrays."""

    diag: np.ndarray
    off: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "diag", np.asarray(self.diag, dtype=float))
        object.__setattr__(self, "off", np.asarray(self.off, dtype=float))
        if self.diag.ndim != 1 or self.off.ndim != 1:
            raise ValueError("diag and off must be one-dimensional")
        if self.diag.size < 2:
            raise ValueError("dimension must be at least 2")
        if self.off.size != self.diag.size - 1:
            raise ValueError("off-diagonal must have length N-1")

    @property
    def n(self) -> int:
        return self.diag.size

    def to_dense(self) -> np.ndarray:
        a = np.diag(self.diag)
        idx = np.arange(self.n - 1)
        a[idx, idx + 1] = self.off
        a[idx + 1, idx] = self.off
        return a


@dataclass(frozen=True)
class BandedMatrix:
    """Symmetric matrix with a main diagonal and a second super/subdiagonal."""

    diag: np.ndarray
    off2: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "diag", np.asarray(self.diag, dtype=float))
        object.__setattr__(self, "off2", np.asarray(self.off2, dtype=float))
        if self.diag.size < 4:
            raise ValueError("dimension must be at least 4")
        if self.off2.size != self.diag.size - 2:
            raise ValueError("second superdiagonal must have length N-2")

    @property
    def n(self) -> int:
        return self.diag.size

    def to_dense(self) -> np.ndarray:
        a = np.diag(self.diag)
        idx = np.arange(self.n - 2)
        a[idx, idx + 2] = self.off2
        a[idx + 2, idx] = self.off2
        return a


def build_chain(params: ModelParams, chain: ChainSelector, n_dim: int) -> SymTriMatrix:
    """Truncated tridiagonal matrix of one parity chain.

    Chain index k = 0..n_dim-1 holds Fock index n = 2k + p (p = 0 for the
    even chain, 1 for the odd one), so truncation at n_dim covers Fock states
    up to 2 n_dim - 2 (even) or 2 n_dim - 1 (odd):

        diag[k] = n + sigma (Delta/2) (-1)^floor(n/2),
        off[k]  = g sqrt((n+1)(n+2)).
    """
    if n_dim < 2:
        raise ValueError("n_dim must be at least 2")
    fock = 2 * np.arange(n_dim) + chain.parity.offset
    signs = (-1.0) ** (fock // 2)
    diag = fock + chain.branch.sign * (params.delta / 2.0) * signs
    nf = fock[:-1].astype(float)
    off = params.g * np.sqrt((nf + 1.0) * (nf + 2.0))
    return SymTriMatrix(diag=diag, off=off)


def build_full_branch(params: ModelParams, branch: Branch, n_dim: int) -> BandedMatrix:
    """Truncated bandwidth-2 matrix of a full branch (parity chains interleaved).

    Used only as the oracle for the parity split: its spectrum at even n_dim
    equals the union of the two chain spectra at dimension n_dim/2 exactly,
    because the split is a permutation similarity of the truncated matrix.
    """
    if n_dim < 4:
        raise ValueError("n_dim must be at least 4")
    fock = np.arange(n_dim)
    signs = (-1.0) ** (fock // 2)
    diag = fock + branch.sign * (params.delta / 2.0) * signs
    nf = fock[:-2].astype(float)
    off2 = params.g * np.sqrt((nf + 1.0) * (nf + 2.0))
    return BandedMatrix(diag=diag, off2=off2)
