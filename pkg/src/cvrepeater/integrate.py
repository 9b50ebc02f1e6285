"""Averaging over complex measurement outcomes.

Two schemes: a tensor-product Gauss-Legendre grid on the square
``[-R, R]^2`` for single outcomes, and seeded importance-sampled Monte Carlo
for several outcomes at once. Integrands are vectorized: they receive complex
arrays and return an array of shape ``(n,)`` or ``(k, n)`` for ``k`` jointly
estimated functionals.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss


@dataclass(frozen=True)
class IntegratorConfig:
    scheme: str = "grid"
    radius: float = 8.0
    points: int = 64
    samples: int = 200_000
    batch_size: int = 100_000
    seed: int = 0
    target_error: float | None = None  # relative, on the first component

    def __post_init__(self):
        if self.scheme not in ("grid", "monte-carlo"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        if self.points < 4 or self.samples < 4 or self.batch_size < 4:
            raise ValueError("need at least 4 points/samples")
        if self.target_error is not None and not self.target_error > 0:
            raise ValueError("target error must be positive")


@dataclass(frozen=True)
class IntegralResult:
    value: np.ndarray | complex | float
    error_estimate: np.ndarray | float
    samples_used: int
    converged: bool = True
    covariance: np.ndarray | None = field(default=None, repr=False)


def default_radius(amplitude: float = 0.0) -> float:
    return 6.0 + 2.0 * abs(amplitude)


def _squeeze(x):
    x = np.asarray(x)
    if x.ndim == 0:
        return x.item()
    return x


def _evaluate(f, *betas) -> np.ndarray:
    vals = np.asarray(f(*betas))
    n = betas[0].size
    if vals.ndim == 0:
        vals = np.full(n, vals)
    if vals.shape[-1] != n:
        raise ValueError(f"integrand returned shape {vals.shape} for {n} points")
    bad = ~np.isfinite(vals)
    if bad.any():
        idx = np.argwhere(bad.reshape(-1, n))[0][-1]
        where = ", ".join(f"{b.reshape(-1)[idx]:.6g}" for b in betas)
        raise FloatingPointError(f"integrand is not finite at beta = ({where})")
    return vals


def gauss_legendre_square(radius: float, points: int):
    """Nodes (complex) and weights for the square [-R, R]^2."""
    x, w = leggauss(points)
    x, w = x * radius, w * radius
    re, im = np.meshgrid(x, x, indexing="ij")
    return (re + 1j * im).ravel(), np.outer(w, w).ravel()


def _grid_estimate(f, radius, points):
    nodes, weights = gauss_legendre_square(radius, points)
    return _evaluate(f, nodes) @ weights


def _plane_mc(f, config: IntegratorConfig) -> IntegralResult:
    R = config.radius
    area = (2 * R) ** 2

    def draw(rng, n):
        return (rng.uniform(-R, R, n) + 1j * rng.uniform(-R, R, n),)

    return _mc_loop(lambda *b: _evaluate(f, *b) * area, draw, config)


def integrate_plane(f: Callable[[np.ndarray], np.ndarray], config: IntegratorConfig) -> IntegralResult:
    """Integral of ``f(beta)`` over d Re(beta) d Im(beta).

    The grid error estimate compares ``points`` with ``points // 2`` nodes
    per axis.
    """
    if config.scheme == "monte-carlo":
        return _plane_mc(f, config)
    fine = _grid_estimate(f, config.radius, config.points)
    coarse = _grid_estimate(f, config.radius, max(config.points // 2, 2))
    err = np.abs(fine - coarse)
    converged = True
    if config.target_error is not None:
        lead = np.ravel(fine)[0]
        converged = bool(np.ravel(err)[0] <= config.target_error * max(abs(lead), 1e-300))
    used = config.points**2 + max(config.points // 2, 2) ** 2
    return IntegralResult(_squeeze(fine), _squeeze(err), used, converged)


@dataclass(frozen=True)
class PlaneProposal:
    """Complex Gaussian CN(center, width^2): density exp(-|b - c|^2 / w^2) / (pi w^2).

    ``center`` may be a callable receiving the outcomes already drawn for the
    earlier planes (as a list of arrays), which lets a proposal follow the
    conditional peak of the integrand.
    """

    center: complex | Callable[[list], np.ndarray] = 0j
    width: float = 1.0

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError("proposal width must be positive")


def _mc_loop(weighted, draw, config: IntegratorConfig) -> IntegralResult:
    n_batches = max(1, math.ceil(config.samples / config.batch_size))
    seeds = np.random.SeedSequence(config.seed).spawn(n_batches)
    total = outer = None
    is_complex = False
    used = 0
    converged = config.target_error is None
    for b, seed in enumerate(seeds):
        size = min(config.batch_size, config.samples - b * config.batch_size)
        rng = np.random.default_rng(seed)
        vals = np.atleast_2d(weighted(*draw(rng, size)))
        if b == 0:
            is_complex = np.iscomplexobj(vals)
        if is_complex:
            vals = np.concatenate([vals.real, vals.imag])
        total = vals.sum(axis=1) if total is None else total + vals.sum(axis=1)
        outer = vals @ vals.T if outer is None else outer + vals @ vals.T
        used += size
        if config.target_error is not None:
            mean = total / used
            se = math.sqrt(max((outer[0, 0] / used - mean[0] ** 2) / (used - 1), 0.0))
            if se <= config.target_error * abs(mean[0]):
                converged = True
                break
    mean = total / used
    cov = (outer / used - np.outer(mean, mean)) / (used - 1)
    se = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    if is_complex:
        k = mean.size // 2
        mean = mean[:k] + 1j * mean[k:]
        se = np.hypot(se[:k], se[k:])
    if mean.size == 1:
        return IntegralResult(mean[0].item(), float(se[0]), used, converged, cov)
    return IntegralResult(mean, se, used, converged, cov)


def integrate_multi(
    f: Callable[..., np.ndarray],
    proposals: Sequence[PlaneProposal],
    config: IntegratorConfig,
) -> IntegralResult:
    """Importance-sampled integral of ``f(beta_1, ..., beta_m)`` over all planes.

    Batches draw from independent child seeds of ``config.seed`` and are
    reduced in batch order, so a fixed seed and batch size reproduce the
    result exactly. With ``target_error`` set, sampling stops early once the
    relative standard error of the first component is met; otherwise, or if
    the budget runs out first, ``converged`` reports the outcome.
    """
    if not proposals:
        raise ValueError("need one proposal per outcome plane")

    def draw(rng, n):
        betas = []
        for p in proposals:
            c = p.center(betas) if callable(p.center) else p.center
            z = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * (p.width / math.sqrt(2))
            betas.append(c + z)
        return betas

    def weighted(*betas):
        log_q = np.zeros(betas[0].shape)
        prior = []
        for p, b in zip(proposals, betas):
            c = p.center(prior) if callable(p.center) else p.center
            log_q += -np.abs(b - c) ** 2 / p.width**2 - math.log(math.pi * p.width**2)
            prior.append(b)
        return _evaluate(f, *betas) * np.exp(-log_q)

    return _mc_loop(weighted, draw, config)
