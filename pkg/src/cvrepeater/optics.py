"""Elementary channels and measurements on truncated Fock kets."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .fock import DensityMatrix, FockKet, make_fock, make_vacuum, partial_trace, tensor


@dataclass(frozen=True)
class NlaSpec:
    """Noiseless linear amplifier built from ``scissors`` quantum scissors."""

    gain: float
    scissors: int = 1

    def __post_init__(self):
        if not (np.isfinite(self.gain) and self.gain > 0):
            raise ValueError(f"NLA gain must be positive, got {self.gain}")
        if int(self.scissors) != self.scissors or self.scissors < 1:
            raise ValueError(f"scissor count must be a positive integer, got {self.scissors}")


@dataclass(frozen=True)
class HomodyneOutcome:
    """Dual-homodyne result beta = X_minus + i P_plus."""

    x_minus: float
    p_plus: float

    @classmethod
    def from_complex(cls, beta: complex) -> "HomodyneOutcome":
        beta = complex(beta)
        return cls(beta.real, beta.imag)

    @property
    def beta(self) -> complex:
        return complex(self.x_minus, self.p_plus)


def as_beta(outcome: complex | HomodyneOutcome) -> complex:
    beta = outcome.beta if isinstance(outcome, HomodyneOutcome) else complex(outcome)
    if not np.isfinite(beta):
        raise ValueError("homodyne outcome must be finite")
    return beta


def _apply_single(amps: np.ndarray, mode: int, matrix: np.ndarray) -> np.ndarray:
    moved = np.moveaxis(amps, mode, 0)
    shape = moved.shape
    out = matrix @ moved.reshape(shape[0], -1)
    return np.moveaxis(out.reshape((matrix.shape[0],) + shape[1:]), 0, mode)


def _apply_pair(amps: np.ndarray, modes: tuple[int, int], matrix: np.ndarray) -> np.ndarray:
    i, j = modes
    moved = np.moveaxis(amps, (i, j), (0, 1))
    shape = moved.shape
    out = matrix @ moved.reshape(shape[0] * shape[1], -1)
    return np.moveaxis(out.reshape(shape), (0, 1), (i, j))


def _check_mode(ket: FockKet, mode: int) -> None:
    if not (0 <= mode < ket.mode_count):
        raise ValueError(f"mode {mode} out of range for a {ket.mode_count}-mode ket")


def displacement_matrix(gamma: complex, cutoff: int) -> np.ndarray:
    """Exact matrix elements <m|D(gamma)|n> for m, n <= cutoff.

    D(gamma) = exp(gamma a^dag - gamma^* a). Built column by column from
    D[m, n] = (sqrt(m) D[m-1, n-1] - gamma^* D[m, n-1]) / sqrt(n).
    """
    d = cutoff + 1
    gamma = complex(gamma)
    D = np.zeros((d, d), dtype=complex)
    col = np.empty(d, dtype=complex)
    col[0] = np.exp(-abs(gamma) ** 2 / 2)
    for m in range(1, d):
        col[m] = col[m - 1] * gamma / math.sqrt(m)
    D[:, 0] = col
    sq = np.sqrt(np.arange(d))
    for n in range(1, d):
        prev = D[:, n - 1]
        shifted = np.zeros(d, dtype=complex)
        shifted[1:] = sq[1:] * prev[:-1]
        D[:, n] = (shifted - gamma.conjugate() * prev) / math.sqrt(n)
    return D


def apply_displacement(ket: FockKet, mode: int, gamma: complex) -> FockKet:
    _check_mode(ket, mode)
    if not np.isfinite(complex(gamma)):
        raise ValueError("displacement must be finite")
    return FockKet(_apply_single(ket.amplitudes, mode, displacement_matrix(gamma, ket.cutoff)))


@lru_cache(maxsize=64)
def _beamsplitter_cached(eta: float, cutoff: int) -> np.ndarray:
    d = cutoff + 1
    t, r = math.sqrt(eta), math.sqrt(1 - eta)
    fact = [math.factorial(k) for k in range(2 * d)]
    U = np.zeros((d, d, d, d))
    for n in range(d):
        for m in range(d):
            norm_in = math.sqrt(fact[n] * fact[m])
            for i in range(n + 1):
                ci = math.comb(n, i) * t**i * r ** (n - i)
                for j in range(m + 1):
                    k = i + j
                    l = n + m - k
                    if k > cutoff or l > cutoff:
                        continue
                    cj = math.comb(m, j) * (-r) ** j * t ** (m - j)
                    U[k, l, n, m] += ci * cj * math.sqrt(fact[k] * fact[l]) / norm_in
    U = U.reshape(d * d, d * d)
    U.flags.writeable = False
    return U


def beamsplitter_matrix(eta: float, cutoff: int) -> np.ndarray:
    """Two-mode unitary with a^dag -> sqrt(eta) a^dag + sqrt(1-eta) b^dag.

    The partner mode maps as b^dag -> -sqrt(1-eta) a^dag + sqrt(eta) b^dag.
    Indexed ``[(k, l), (n, m)]``; outputs beyond the cutoff are dropped.
    """
    if not (0 <= eta <= 1):
        raise ValueError(f"transmissivity must lie in [0, 1], got {eta}")
    return _beamsplitter_cached(float(eta), int(cutoff))


def apply_beamsplitter(ket: FockKet, mode_pair: tuple[int, int], eta: float) -> FockKet:
    i, j = mode_pair
    _check_mode(ket, i)
    _check_mode(ket, j)
    if i == j:
        raise ValueError("beamsplitter needs two distinct modes")
    U = beamsplitter_matrix(eta, ket.cutoff)
    return FockKet(_apply_pair(ket.amplitudes, (i, j), U))


def attach_loss_mode(ket: FockKet, mode: int, eta: float) -> FockKet:
    """Loss as a beamsplitter against a fresh vacuum mode appended last."""
    _check_mode(ket, mode)
    widened = tensor(ket, make_vacuum(ket.cutoff))
    return apply_beamsplitter(widened, (mode, ket.mode_count), eta)


def apply_loss(ket: FockKet, mode: int, eta: float) -> DensityMatrix:
    """Pure-loss channel of power transmission ``eta``; the environment is traced out."""
    widened = attach_loss_mode(ket, mode, eta)
    return partial_trace(widened, list(range(ket.mode_count)))


def dual_homodyne_project(
    ket: FockKet, mode_a: int, mode_r: int, outcome: complex | HomodyneOutcome
) -> FockKet:
    """Contract ``mode_a, mode_r`` with <beta| = pi^(-1/2) sum_n <n|<n| D_a(-beta).

    The remaining modes keep their relative order. The squared norm of the
    result is the outcome density P(beta) with respect to d^2 beta.
    """
    _check_mode(ket, mode_a)
    _check_mode(ket, mode_r)
    if mode_a == mode_r:
        raise ValueError("dual homodyne needs two distinct modes")
    if ket.mode_count < 3:
        raise ValueError("projection must leave at least one mode")
    beta = as_beta(outcome)
    shifted = _apply_single(ket.amplitudes, mode_a, displacement_matrix(-beta, ket.cutoff))
    diag = np.diagonal(shifted, axis1=mode_a, axis2=mode_r).sum(axis=-1)
    return FockKet(diag / math.sqrt(math.pi))


def nla_coefficients(spec: NlaSpec, cutoff: int) -> np.ndarray:
    """Diagonal of T_N = Pi_N g^n on |0>..|cutoff>."""
    g, N = spec.gain, spec.scissors
    coeffs = np.zeros(cutoff + 1)
    pref = (1.0 / (g * g + 1)) ** (N / 2)
    for n in range(min(N, cutoff) + 1):
        coeffs[n] = pref * math.perm(N, n) / N**n * g**n
    return coeffs


def apply_nla(ket: FockKet, mode: int, spec: NlaSpec) -> FockKet:
    """Heralded N-scissor amplifier: scale |n> by T_N and cut everything above N."""
    _check_mode(ket, mode)
    coeffs = nla_coefficients(spec, ket.cutoff)
    shape = [1] * ket.mode_count
    shape[mode] = ket.dim
    return FockKet(ket.amplitudes * coeffs.reshape(shape))


def gain_to_splitting(gain: float) -> float:
    """Splitting ratio xi with gain = sqrt((1 - xi) / xi)."""
    if not gain > 0:
        raise ValueError(f"gain must be positive, got {gain}")
    return 1.0 / (gain * gain + 1.0)


def _project_number(amps: np.ndarray, modes: Sequence[int], photons: Sequence[int]) -> np.ndarray:
    index = [slice(None)] * amps.ndim
    for m, n in zip(modes, photons):
        index[m] = n
    return amps[tuple(index)]


def scissor_circuit(ket: FockKet, mode: int, gain: float, patterns: str = "both") -> FockKet:
    """Linear-optics quantum scissor acting on ``mode``.

    A single photon is split on a beamsplitter of reflectivity
    xi = 1/(g^2+1); the reflected arm interferes with the input on a 50:50
    beamsplitter and the two outputs are photon-counted. The transmitted arm
    replaces ``mode`` in the returned ket.

    ``patterns="single"`` keeps only the detector pattern that needs no
    correction; its norm is half the full herald probability.
    ``patterns="both"`` also accepts the mirrored pattern after the
    feed-forward phase flip (-1)^n; both branches carry the same state, so the
    result is that state scaled to the total herald probability.
    """
    _check_mode(ket, mode)
    if patterns not in ("single", "both"):
        raise ValueError("patterns must be 'single' or 'both'")
    xi = gain_to_splitting(gain)
    if ket.cutoff < 1:
        raise ValueError("scissor circuit needs cutoff >= 1")
    k = ket.mode_count
    anc, vac = k, k + 1
    state = tensor(ket, make_fock(1, ket.cutoff), make_vacuum(ket.cutoff))
    # ancilla photon: transmitted part (sqrt(1 - xi)) stays in `anc` as the output arm
    state = apply_beamsplitter(state, (anc, vac), 1 - xi)
    state = apply_beamsplitter(state, (mode, vac), 0.5)
    amps = state.amplitudes
    good = _project_number(amps, (mode, vac), (0, 1))
    out_good = np.moveaxis(good, k - 1, mode)  # `anc` lands where `mode` was
    if patterns == "single":
        return FockKet(out_good)
    mirrored = _project_number(amps, (mode, vac), (1, 0))
    parity = (-1.0) ** np.arange(ket.dim)
    shape = [1] * k
    shape[mode] = ket.dim
    out_mirror = np.moveaxis(mirrored, k - 1, mode) * parity.reshape(shape)
    total = np.vdot(out_good, out_good).real + np.vdot(out_mirror, out_mirror).real
    ref = out_good if np.vdot(out_good, out_good).real > 0 else out_mirror
    ref_norm = math.sqrt(np.vdot(ref, ref).real)
    if ref_norm == 0:
        return FockKet(np.zeros_like(out_good))
    return FockKet(ref * (math.sqrt(total) / ref_norm))


def nla_success_estimate(spec: NlaSpec) -> float:
    """Rough heralding probability 1/(g+1)^(2N); not exact."""
    return 1.0 / (spec.gain + 1.0) ** (2 * spec.scissors)
