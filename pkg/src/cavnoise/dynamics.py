"""Linear dynamics of the cavity mode and its outputs.

Everything here works at the operator/moment level, which is exact for a
linear Langevin equation: means follow the driven linear ODE, normally ordered
photon numbers follow their own closed equations, and commutators of the
formal solution are computed analytically.  Noise inputs are vacuum.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import CoefficientError, DomainError
from .model import CavityCoefficients, cross_residual


@dataclass(frozen=True)
class ResponseKernel:
    """Response of the cavity and the outputs at lag ``t`` after an impulse.

    ``output_from_input[p, q]`` is the smooth kernel from input port ``q`` to output
    port ``p``; the prompt (delta) parts are ``prompt_reflection`` and ``prompt_noise``.
    """

    pole: complex
    lag: float
    cavity_initial: complex
    cavity_from_input: np.ndarray
    cavity_from_noise: np.ndarray
    output_initial: np.ndarray
    output_from_input: np.ndarray
    output_from_noise: np.ndarray
    prompt_reflection: np.ndarray
    prompt_noise: np.ndarray


def impulse_response(c: CavityCoefficients, t: float) -> ResponseKernel:
    if t < 0:
        raise DomainError("lag must be non-negative")
    decay = cmath.exp(-c.pole * t)
    t_c = np.array([p.t_c for p in c.ports])
    t_o = np.array([p.t_o for p in c.ports])
    return ResponseKernel(
        pole=c.pole,
        lag=float(t),
        cavity_initial=decay,
        cavity_from_input=t_c * decay,
        cavity_from_noise=c.noise_cav * decay,
        output_initial=t_o * decay,
        output_from_input=np.outer(t_o, t_c) * decay,
        output_from_noise=np.outer(t_o, c.noise_cav) * decay,
        prompt_reflection=np.array([p.r_o for p in c.ports]),
        prompt_noise=np.vstack([p.noise_out for p in c.ports]).reshape(c.n_ports, c.noise_dim),
    )


def _feed_strength(c: CavityCoefficients) -> float:
    """Total strength of everything driving the mode: ``sum |t_c|^2 + |noise_cav|^2``."""
    return sum(abs(p.t_c) ** 2 for p in c.ports) + c.noise_cav_norm2


def cavity_commutator(c: CavityCoefficients, t: float) -> float:
    """Exact ``[a(t), a^dag(t)]`` of the formal solution, starting from 1 at ``t = 0``."""
    if t < 0:
        raise DomainError("time must be non-negative")
    e = math.exp(-c.gamma * t)
    return e + _feed_strength(c) / c.gamma * (1.0 - e)


@dataclass(frozen=True)
class CommutatorKernel:
    """``[b_p(t1), b_q^dag(t2)]`` split into a delta part and an exponential part.

    For ``t1 > t2`` the smooth part is
    ``(smooth_coeff + transient_coeff * exp(-gamma * t2)) * exp(-pole * (t1 - t2))``;
    ``transient_coeff`` is non-zero only if the decay rate constraint fails.
    For ``t1 < t2`` use ``smooth_coeff_reverse`` and ``conj(pole)`` with ``t2 - t1``
    (``transient_coeff_reverse`` and ``exp(-gamma * t1)``).
    """

    singular_coeff: float | complex
    smooth_coeff: complex
    transient_coeff: complex
    smooth_coeff_reverse: complex
    transient_coeff_reverse: complex
    pole: complex


def output_commutator_kernel(
    c: CavityCoefficients, port: int = 0, other: int | None = None
) -> CommutatorKernel:
    """Commutator kernel of output ``port`` with output ``other`` (default: itself)."""
    q = port if other is None else other
    bp, bq = c.ports[port], c.ports[q]
    ratio = _feed_strength(c) / c.gamma
    singular = complex(np.vdot(bq.noise_out, bp.noise_out))
    if port == q:
        singular = abs(bp.r_o) ** 2 + singular.real
    # bracket_q = conj(t_o q) [a, a^dag](t2) + t_c q conj(r_o q) + <o_q, c>
    #           = conj(cross_q) + conj(t_o q) ([a, a^dag](t2) - 1)
    fwd = bp.t_o * cross_residual(c, q).conjugate() + bp.t_o * bq.t_o.conjugate() * (ratio - 1)
    fwd_tr = bp.t_o * bq.t_o.conjugate() * (1 - ratio)
    rev = (bq.t_o * cross_residual(c, port).conjugate()
           + bq.t_o * bp.t_o.conjugate() * (ratio - 1)).conjugate()
    rev_tr = (bq.t_o * bp.t_o.conjugate() * (1 - ratio)).conjugate()
    return CommutatorKernel(singular, fwd, fwd_tr, rev, rev_tr, c.pole)


def extraction_efficiency(c: CavityCoefficients, port: int = 0) -> float:
    """Fraction of an initially stored excitation leaving through ``port``: ``|t_o|^2 / Gamma``."""
    return abs(c.ports[port].t_o) ** 2 / c.gamma


@dataclass(frozen=True)
class TrajectorySeries:
    times: np.ndarray
    mean_amp: np.ndarray
    photon_number: np.ndarray
    out_flux: np.ndarray  # shape (n_ports, n_times)
    out_mean: np.ndarray  # shape (n_ports, n_times)


def _grid(times) -> np.ndarray:
    t = np.asarray(times, dtype=float).reshape(-1)
    if t.size == 0 or not np.all(np.isfinite(t)):
        raise DomainError("time grid must be non-empty and finite")
    if np.any(np.diff(t) <= 0):
        raise DomainError("time grid must be strictly increasing")
    return t


Drive = Callable[[float], Sequence[complex]]


def simulate_mean(
    c: CavityCoefficients,
    drive: Drive | None = None,
    a0: complex = 0.0,
    times: Sequence[float] = (0.0,),
) -> TrajectorySeries:
    """Mean amplitudes under a coherent drive, exact for piecewise-constant drives.

    ``drive(t)`` returns the coherent input amplitude of every port; its value at
    ``times[k]`` is held on ``[times[k], times[k+1])``.  The cavity state is
    coherent, so ``photon_number = |<a>|^2`` and ``out_flux = |<b_out>|^2``.
    """
    t = _grid(times)
    n_ports = c.n_ports
    t_c = np.array([p.t_c for p in c.ports])
    t_o = np.array([p.t_o for p in c.ports])
    r_o = np.array([p.r_o for p in c.ports])

    def beta(tk):
        if drive is None:
            return np.zeros(n_ports, dtype=complex)
        b = np.asarray(drive(tk), dtype=complex).reshape(-1)
        if b.size != n_ports:
            raise CoefficientError(f"drive must return {n_ports} amplitude(s)")
        if not np.all(np.isfinite(b)):
            raise DomainError("drive is not finite on the grid")
        return b

    pole = c.pole
    a = np.empty(t.size, dtype=complex)
    out = np.empty((n_ports, t.size), dtype=complex)
    a[0] = complex(a0)
    b = beta(t[0])
    out[:, 0] = t_o * a[0] + r_o * b
    for k in range(t.size - 1):
        h = t[k + 1] - t[k]
        phi = cmath.exp(-pole * h)
        # (1 - e^{-pole h}) / pole, written with expm1 for small steps
        kappa = -np.expm1(-pole * h) / pole
        a[k + 1] = phi * a[k] + kappa * np.dot(t_c, b)
        b = beta(t[k + 1])
        out[:, k + 1] = t_o * a[k + 1] + r_o * b
    return TrajectorySeries(t, a, np.abs(a) ** 2, np.abs(out) ** 2, out)


def simulate_photon_number(
    c: CavityCoefficients, n0: float, times: Sequence[float]
) -> TrajectorySeries:
    """Free decay of an initial population ``n0`` with vacuum inputs."""
    if n0 < 0:
        raise DomainError("initial photon number must be non-negative")
    t = _grid(times)
    n = n0 * np.exp(-c.gamma * t)
    to2 = np.array([abs(p.t_o) ** 2 for p in c.ports])
    zeros = np.zeros(t.size, dtype=complex)
    return TrajectorySeries(t, zeros, n, np.outer(to2, n), np.zeros((c.n_ports, t.size), complex))


def simulate(
    c: CavityCoefficients,
    times: Sequence[float],
    n0: float = 0.0,
    a0: complex = 0.0,
    drive: Drive | None = None,
) -> TrajectorySeries:
    """Coherent part plus an incoherent initial population ``n0``.

    For linear dynamics with vacuum noise the two contributions add:
    ``<a^dag a> = |<a>|^2 + n0 e^{-Gamma t}`` and likewise for each output flux.
    """
    m = simulate_mean(c, drive, a0, times)
    f = simulate_photon_number(c, n0, times)
    return TrajectorySeries(
        m.times, m.mean_amp, m.photon_number + f.photon_number, m.out_flux + f.out_flux, m.out_mean
    )
