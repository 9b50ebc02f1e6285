"""Truncated Fock-basis states.

Kets are dense complex arrays of shape ``(cutoff + 1,) * mode_count``; the
entry at ``(n1, ..., nk)`` is the amplitude of ``|n1, ..., nk>``. Density
matrices keep the ket indices followed by the bra indices.

Quadratures follow ``X = a + a^dag`` and ``P = -i (a - a^dag)`` so that the
vacuum (and every coherent state) has unit variance.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

TAIL_WARNING = 1e-6


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array, dtype=complex)
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class FockKet:
    """Pure (possibly sub-normalized) multi-mode state."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim == 0:
            raise ValueError("a ket needs at least one mode")
        if len(set(amps.shape)) != 1:
            raise ValueError(f"all modes must share one cutoff, got shape {amps.shape}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @property
    def mode_count(self) -> int:
        return self.amplitudes.ndim

    @property
    def cutoff(self) -> int:
        return self.amplitudes.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.cutoff + 1

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def __getitem__(self, index) -> complex:
        return complex(self.amplitudes[index])

    def normalized(self) -> "FockKet":
        n2 = self.norm2
        if n2 <= 0:
            raise ValueError("cannot normalize a zero ket")
        return FockKet(self.amplitudes / math.sqrt(n2))

    def overlap(self, other: "FockKet") -> complex:
        """``<self|other>``."""
        _check_compatible(self, other)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "FockKet") -> float:
        """|<a|b>|^2 / (|a|^2 |b|^2)."""
        return abs(self.overlap(other)) ** 2 / (self.norm2 * other.norm2)

    def photon_distribution(self, mode: int) -> np.ndarray:
        """Unnormalized photon-number distribution of one mode."""
        _check_mode(self, mode)
        probs = np.abs(np.moveaxis(self.amplitudes, mode, 0)) ** 2
        return probs.reshape(self.dim, -1).sum(axis=1)

    def to_density(self) -> "DensityMatrix":
        return DensityMatrix(np.multiply.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    """Mixed state; ``tensor`` has shape ``(d,) * 2k`` (ket axes, then bra axes)."""

    tensor: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.tensor, dtype=complex)
        if t.ndim == 0 or t.ndim % 2:
            raise ValueError("density tensor needs an even, nonzero number of axes")
        if len(set(t.shape)) != 1:
            raise ValueError(f"all modes must share one cutoff, got shape {t.shape}")
        object.__setattr__(self, "tensor", _frozen(t))

    @classmethod
    def from_matrix(cls, matrix: np.ndarray, mode_count: int) -> "DensityMatrix":
        matrix = np.asarray(matrix)
        d = round(matrix.shape[0] ** (1.0 / mode_count))
        return cls(matrix.reshape((d,) * (2 * mode_count)))

    @property
    def mode_count(self) -> int:
        return self.tensor.ndim // 2

    @property
    def cutoff(self) -> int:
        return self.tensor.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.cutoff + 1

    @property
    def matrix(self) -> np.ndarray:
        size = self.dim**self.mode_count
        return self.tensor.reshape(size, size)

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def purity(self) -> float:
        """Tr rho^2 of the normalized state."""
        m = self.matrix
        return float(np.vdot(m, m).real) / self.trace**2

    def eigenvalues(self) -> np.ndarray:
        m = self.matrix
        return np.linalg.eigvalsh(0.5 * (m + m.conj().T))

    def is_physical(self, tol: float = 1e-9) -> bool:
        m = self.matrix
        hermitian = np.max(np.abs(m - m.conj().T), initial=0.0) <= tol
        return bool(hermitian and self.trace <= 1 + tol and self.eigenvalues().min() >= -tol)

    def photon_distribution(self, mode: int) -> np.ndarray:
        reduced = partial_trace(self, [mode])
        return np.real(np.diagonal(reduced.matrix)).copy()


@dataclass(frozen=True)
class QuadratureMoments:
    mean_x: float
    mean_p: float
    var_x: float
    var_p: float

    @property
    def mean_amplitude(self) -> complex:
        return complex(self.mean_x, self.mean_p) / 2


def _check_mode(state, mode: int) -> None:
    if not (0 <= mode < state.mode_count):
        raise ValueError(f"mode {mode} out of range for a {state.mode_count}-mode state")


def _check_compatible(a: FockKet, b: FockKet) -> None:
    if a.cutoff != b.cutoff or a.mode_count != b.mode_count:
        raise ValueError("kets live on different truncated spaces")


def _check_cutoff(cutoff: int) -> None:
    if int(cutoff) != cutoff or cutoff < 0:
        raise ValueError(f"cutoff must be a non-negative integer, got {cutoff!r}")


def number_state_amplitudes(alpha: complex, cutoff: int) -> np.ndarray:
    """<n|alpha> for n = 0..cutoff, computed by the stable ratio recursion."""
    amps = np.empty(cutoff + 1, dtype=complex)
    amps[0] = np.exp(-abs(alpha) ** 2 / 2)
    for n in range(1, cutoff + 1):
        amps[n] = amps[n - 1] * alpha / math.sqrt(n)
    return amps


def make_vacuum(cutoff: int, modes: int = 1) -> FockKet:
    return make_fock((0,) * modes, cutoff)


def make_fock(photons: int | Sequence[int], cutoff: int) -> FockKet:
    """Number state ``|n1, n2, ...>``."""
    _check_cutoff(cutoff)
    photons = (photons,) if np.isscalar(photons) else tuple(photons)
    if any(n < 0 or n > cutoff for n in photons):
        raise ValueError(f"occupations {photons} exceed cutoff {cutoff}")
    amps = np.zeros((cutoff + 1,) * len(photons), dtype=complex)
    amps[photons] = 1.0
    return FockKet(amps)


def make_coherent(alpha: complex, cutoff: int) -> FockKet:
    """Truncated coherent state; its norm falls short of 1 by the Poisson tail."""
    _check_cutoff(cutoff)
    alpha = complex(alpha)
    if not np.isfinite(alpha):
        raise ValueError("coherent amplitude must be finite")
    return FockKet(number_state_amplitudes(alpha, cutoff))


def make_tmsv(chi: float, cutoff: int) -> FockKet:
    """Two-mode squeezed vacuum sqrt(1 - chi^2) sum_n chi^n |n, n>."""
    _check_cutoff(cutoff)
    if not (0 <= chi < 1):
        raise ValueError(f"EPR strength must satisfy 0 <= chi < 1, got {chi}")
    n = np.arange(cutoff + 1)
    amps = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    amps[n, n] = math.sqrt(1 - chi**2) * chi**n
    return FockKet(amps)


def tensor(*kets: FockKet) -> FockKet:
    """Tensor product; mode order follows argument order."""
    if not kets:
        raise ValueError("tensor needs at least one ket")
    cutoffs = {k.cutoff for k in kets}
    if len(cutoffs) != 1:
        raise ValueError(f"cannot tensor kets with different cutoffs {sorted(cutoffs)}")
    amps = kets[0].amplitudes
    for k in kets[1:]:
        amps = np.multiply.outer(amps, k.amplitudes)
    return FockKet(amps)


def ladder_expectations(ket: FockKet, mode: int) -> tuple[float, complex, complex, float]:
    """Unnormalized ``(<psi|psi>, <a>, <a^2>, <a^dag a>)`` for one mode."""
    _check_mode(ket, mode)
    psi = np.moveaxis(ket.amplitudes, mode, 0).reshape(ket.dim, -1)
    sq = np.sqrt(np.arange(1, ket.dim))
    a_psi = sq[:, None] * psi[1:]  # (a psi)_n = sqrt(n+1) psi_{n+1}
    norm2 = float(np.vdot(psi, psi).real)
    a1 = complex(np.vdot(psi[:-1], a_psi))
    a2 = complex(np.vdot(psi[:-2], sq[:-1, None] * a_psi[1:])) if ket.dim > 2 else 0j
    n = float(np.vdot(a_psi, a_psi).real)
    return norm2, a1, a2, n


def moments_from_ladder(norm2, a1, a2, n) -> QuadratureMoments:
    """Quadrature moments from (possibly ensemble-summed) ladder expectations.

    Uses [a, a^dag] = 1 exactly, i.e. the infinite-dimensional algebra.
    """
    if norm2 <= 0:
        raise ValueError("zero-norm state has no moments")
    a1, a2, n = a1 / norm2, a2 / norm2, n / norm2
    mean_x, mean_p = 2 * a1.real, 2 * a1.imag
    x2 = 2 * a2.real + 2 * n + 1
    p2 = -2 * a2.real + 2 * n + 1
    return QuadratureMoments(mean_x, mean_p, x2 - mean_x**2, p2 - mean_p**2)


def quadrature_moments(ket: FockKet, mode: int = 0) -> QuadratureMoments:
    """Moments of X and P on ``mode`` for the normalized state."""
    norm2, a1, a2, n = ladder_expectations(ket, mode)
    if norm2 <= 0:
        raise ValueError("zero-norm ket has no moments")
    edge = ket.photon_distribution(mode)[-1] / norm2
    if edge > TAIL_WARNING:
        warnings.warn(
            f"{edge:.2e} of the norm sits at the cutoff; moments are biased",
            RuntimeWarning,
            stacklevel=2,
        )
    return moments_from_ladder(norm2, a1, a2, n)


def partial_trace(state: FockKet | DensityMatrix, keep_modes: Sequence[int]) -> DensityMatrix:
    """Reduced state on ``keep_modes`` (in the given order)."""
    keep = list(keep_modes)
    k = state.mode_count
    if not keep or len(set(keep)) != len(keep) or any(not 0 <= m < k for m in keep):
        raise ValueError(f"invalid modes {keep_modes} for a {k}-mode state")
    drop = [m for m in range(k) if m not in keep]
    if isinstance(state, FockKet):
        psi = np.transpose(state.amplitudes, keep + drop)
        d = state.dim
        psi = psi.reshape(d ** len(keep), -1)
        rho = psi @ psi.conj().T
        return DensityMatrix(rho.reshape((d,) * (2 * len(keep))))
    t = state.tensor
    letters = [chr(ord("a") + i) for i in range(2 * k)]
    bra = letters[k:]
    for m in drop:
        bra[m] = letters[m]
    out = [letters[m] for m in keep] + [bra[m] for m in keep]
    expr = "".join(letters[:k]) + "".join(bra) + "->" + "".join(out)
    return DensityMatrix(np.einsum(expr, t))
