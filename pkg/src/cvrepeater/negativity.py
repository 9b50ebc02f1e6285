"""Entanglement diagnostics for the corrected channel.

Covariance matrices use the ordering (x1, p1, x2, p2, ...) in units where
the vacuum covariance is the identity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .fock import DensityMatrix, FockKet

FOCK_CUTOFF_LIMIT = 8
NU_TOL = 1e-12


@dataclass(frozen=True)
class CovarianceMatrix:
    cov: np.ndarray
    mean: np.ndarray | None = None

    def __post_init__(self):
        cov = np.asarray(self.cov, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
            raise ValueError(f"covariance must be 2n x 2n, got {cov.shape}")
        if np.max(np.abs(cov - cov.T)) > 1e-10:
            raise ValueError("covariance must be symmetric")
        mean = np.zeros(cov.shape[0]) if self.mean is None else np.asarray(self.mean, dtype=float)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "mean", mean)

    @property
    def modes(self) -> int:
        return self.cov.shape[0] // 2

    def uncertainty_violation(self) -> float:
        """Most negative eigenvalue of cov + i Omega (0 if physical)."""
        m = self.cov + 1j * symplectic_form(self.modes)
        return min(float(np.linalg.eigvalsh(m).min()), 0.0)

    def is_physical(self, tol: float = 1e-8) -> bool:
        return self.uncertainty_violation() >= -tol


@dataclass(frozen=True)
class ChannelModel:
    """Gaussian surrogate of the corrected channel: transmission plus additive noise."""

    transmission: float
    excess_noise: float = 0.0

    def __post_init__(self):
        if not (0 < self.transmission <= 1):
            raise ValueError(f"transmission must lie in (0, 1], got {self.transmission}")
        if self.excess_noise < 0:
            raise ValueError("excess noise must be non-negative")


def symplectic_form(modes: int) -> np.ndarray:
    return np.kron(np.eye(modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def eb_bound_check(excess_noise: float, transmission: float) -> bool:
    """delta < 2 eta: a sufficient (not necessary) condition for preserving entanglement."""
    if excess_noise < 0:
        raise ValueError("excess noise must be non-negative")
    return excess_noise < 2 * transmission


def tmsv_covariance(chi: float) -> CovarianceMatrix:
    if not (0 <= chi < 1):
        raise ValueError(f"EPR strength must satisfy 0 <= chi < 1, got {chi}")
    v = (1 + chi**2) / (1 - chi**2)
    c = 2 * chi / (1 - chi**2)
    z = np.diag([1.0, -1.0])
    cov = np.block([[v * np.eye(2), c * z], [c * z, v * np.eye(2)]])
    return CovarianceMatrix(cov)


def epr_through_channel(chi_source: float, model: ChannelModel) -> CovarianceMatrix:
    """Two-mode squeezed vacuum whose second arm crosses ``model``."""
    base = tmsv_covariance(chi_source).cov
    eta, delta = model.transmission, model.excess_noise
    X = np.diag([1.0, 1.0, math.sqrt(eta), math.sqrt(eta)])
    Y = np.diag([0.0, 0.0, 1 - eta + delta, 1 - eta + delta])
    out = CovarianceMatrix(X @ base @ X + Y)
    if not out.is_physical():
        raise ValueError(
            f"channel (eta={eta}, delta={delta}) gives an unphysical state "
            f"(min eig of cov + i Omega = {out.uncertainty_violation():.3e})"
        )
    return out


def partial_transpose(cov: CovarianceMatrix, modes: Sequence[int]) -> np.ndarray:
    flip = np.ones(2 * cov.modes)
    for m in modes:
        flip[2 * m + 1] = -1.0
    F = np.diag(flip)
    return F @ cov.cov @ F


def symplectic_eigenvalues(matrix: np.ndarray) -> np.ndarray:
    n = matrix.shape[0] // 2
    ev = np.abs(np.linalg.eigvals(1j * symplectic_form(n) @ matrix))
    return np.sort(ev)[::2]


def log_negativity_gaussian(cov: CovarianceMatrix, partition: Sequence[int] = (1,)) -> float:
    """Logarithmic negativity (base 2) from the partially transposed spectrum."""
    if not cov.is_physical():
        raise ValueError("covariance violates the uncertainty principle")
    nus = symplectic_eigenvalues(partial_transpose(cov, partition))
    # eigensolver rounding must not turn a separable state into a tiny positive value
    return float(sum(-math.log2(nu) for nu in nus if nu < 1 - NU_TOL))


def log_negativity_limit(eta: float | Fraction) -> float:
    """Infinite-squeezing EPR state sent through pure loss: log2((1+eta)/(1-eta)).

    A ``Fraction`` keeps the ratio exact, so e.g. eta = 1/3 gives exactly 1.
    """
    if not (0 < eta < 1):
        raise ValueError(f"transmission must lie in (0, 1), got {eta}")
    return math.log2((1 + eta) / (1 - eta))


def channel_log_negativity(model: ChannelModel, chi_source: float | None = None) -> float:
    """E_N of an EPR state with one arm through ``model``.

    ``chi_source=None`` takes the infinite-squeezing limit, where the smallest
    partially transposed symplectic eigenvalue tends to
    (1 - eta + delta) / (1 + eta).
    """
    if chi_source is not None:
        return log_negativity_gaussian(epr_through_channel(chi_source, model))
    eta, delta = model.transmission, model.excess_noise
    nu = (1 - eta + delta) / (1 + eta)
    if nu <= 0:
        return math.inf
    return max(0.0, -math.log2(nu))


def log_negativity_fock(state: FockKet | DensityMatrix, partition: Sequence[int] = (1,)) -> float:
    """log2 of the trace norm of the partial transpose, for small cutoffs."""
    rho = state.to_density() if isinstance(state, FockKet) else state
    if rho.cutoff > FOCK_CUTOFF_LIMIT:
        raise ValueError(f"cutoff {rho.cutoff} exceeds the Fock negativity limit {FOCK_CUTOFF_LIMIT}")
    k = rho.mode_count
    axes = list(range(2 * k))
    for m in partition:
        if not 0 <= m < k:
            raise ValueError(f"invalid partition mode {m}")
        axes[m], axes[k + m] = axes[k + m], axes[m]
    t = np.transpose(rho.tensor, axes)
    size = rho.dim**k
    m = t.reshape(size, size)
    m = 0.5 * (m + m.conj().T)
    trace_norm = np.abs(np.linalg.eigvalsh(m)).sum()
    return max(0.0, math.log2(trace_norm / rho.trace))


@dataclass(frozen=True)
class NegativityPoint:
    eta_direct: float
    protocol: float
    bare_limit: float

    @property
    def outperforms(self) -> bool:
        return self.protocol > self.bare_limit


def protocol_negativity_curve(
    points: Iterable[tuple[float, float, float]],
    chi_source: float | None = None,
) -> list[NegativityPoint]:
    """E_N of the corrected channel against the bare-channel benchmark.

    ``points`` holds (direct transmission, effective transmission, excess
    noise). The protocol's channel is treated as Gaussian with that noise,
    so the protocol value is a lower bound; the benchmark is an infinitely
    squeezed EPR state over the direct channel.
    """
    out = []
    for eta_direct, eta_eff, delta in points:
        model = ChannelModel(min(eta_eff, 1.0), max(delta, 0.0))
        out.append(
            NegativityPoint(
                eta_direct,
                channel_log_negativity(model, chi_source),
                log_negativity_limit(eta_direct),
            )
        )
    return out
