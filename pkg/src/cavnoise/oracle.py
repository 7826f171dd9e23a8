"""Brute-force commutator check on a time-binned operator basis.

Every operator is a coefficient row over the slots ``{a(0)} U {(bin m, channel j)}``
where the channels are the radiative inputs followed by the noise basis.  A
binned input ``B_{m,j} = (1/dt) * integral over bin m`` has
``[B_{m,j}, B_{m',j'}^dag] = delta_{mm'} delta_{jj'} / dt``, so the commutator of
two rows is their inner product with weight 1 on ``a(0)`` and ``1/dt`` elsewhere.

The mode is advanced bin by bin with the exact exponential update for
bin-constant inputs.  The binned output uses the mode amplitude at the start
of its bin, which makes the scheme first order in ``dt``.  Nothing here uses
the analytic kernels of :mod:`cavnoise.dynamics`.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ResourceBoundError
from .model import CavityCoefficients

MAX_BINS = 100_000
FULL_MATRIX_MAX_BINS = 2_000


@dataclass(frozen=True)
class OracleReport:
    dt: float
    t_max: float
    n_bins: int
    cavity_deviation: float
    output_deviation: tuple[float, ...]
    diagonal_deviation: tuple[float, ...]
    offdiagonal_deviation: tuple[float, ...]
    cross_port_deviation: float | None

    def as_dict(self) -> dict:
        return {
            "dt": self.dt,
            "t_max": self.t_max,
            "n_bins": self.n_bins,
            "cavity_deviation": self.cavity_deviation,
            "output_deviation": list(self.output_deviation),
            "diagonal_deviation": list(self.diagonal_deviation),
            "offdiagonal_deviation": list(self.offdiagonal_deviation),
            "cross_port_deviation": self.cross_port_deviation,
        }


def _setup(c: CavityCoefficients, dt: float, t_max: float):
    if not (dt > 0 and t_max > 0):
        raise DomainError("dt and t_max must be positive")
    n = int(round(t_max / dt))
    if n > MAX_BINS:
        raise ResourceBoundError(f"{n} bins exceeds the bound of {MAX_BINS}")
    n = max(n, 1)
    n_ports = c.n_ports
    k = n_ports + c.noise_dim
    drive = np.concatenate([[p.t_c for p in c.ports], c.noise_cav]).astype(complex)
    direct = np.zeros((n_ports, k), dtype=complex)
    for i, p in enumerate(c.ports):
        direct[i, i] = p.r_o
        direct[i, n_ports:] = p.noise_out
    t_o = np.array([p.t_o for p in c.ports])
    step = cmath.exp(-c.pole * dt)
    gain = -np.expm1(-c.pole * dt) / c.pole
    return n, k, drive, direct, t_o, step, gain


def _comm(x: np.ndarray, y: np.ndarray, dt: float) -> complex:
    # weight 1 on the a(0) slot, 1/dt on bin slots
    return x[0] * np.conj(y[0]) + np.vdot(y[1:], x[1:]) / dt


def discretized_commutator_oracle(
    c: CavityCoefficients, dt: float, t_max: float, full_matrix: bool = False
) -> OracleReport:
    """Maximum deviations of the binned commutators from their canonical values.

    Reports ``max_n |[a_n, a_n^dag] - 1|`` and, per output port,
    ``max |dt [Y_n, Y_m^dag] - delta_nm|``.  The streaming evaluation checks the
    diagonal and the first sub-diagonal; for a single damped mode the
    off-diagonal entries shrink geometrically with the lag, so the first
    sub-diagonal holds the maximum.  ``full_matrix=True`` forms every row and
    the whole matrix instead (limited to small grids).
    """
    n, k, drive, direct, t_o, step, gain = _setup(c, dt, t_max)
    if full_matrix:
        return _full(c, dt, t_max, n, k, drive, direct, t_o, step, gain)
    n_ports = c.n_ports
    size = 1 + n * k
    a = np.zeros(size, dtype=complex)
    a[0] = 1.0
    prev = None
    cav_dev = 0.0
    diag = np.zeros(n_ports)
    off = np.zeros(n_ports)
    cross = 0.0
    for m in range(n):
        end = 1 + (m + 1) * k
        lo = 1 + m * k
        cav_dev = max(cav_dev, abs(_comm(a[:end], a[:end], dt) - 1.0))
        rows = np.zeros((n_ports, end), dtype=complex)
        rows[:, :lo] = np.outer(t_o, a[:lo])
        rows[:, lo:end] = direct
        for p in range(n_ports):
            diag[p] = max(diag[p], abs(dt * _comm(rows[p], rows[p], dt) - 1.0))
            if prev is not None:
                off[p] = max(off[p], abs(dt * _comm(rows[p], prev[p], dt)))
            for q in range(n_ports):
                if q == p:
                    continue
                cross = max(cross, abs(dt * _comm(rows[p], rows[q], dt)))
                if prev is not None:
                    cross = max(cross, abs(dt * _comm(rows[p], prev[q], dt)))
        prev = [np.concatenate([r, np.zeros(k)]) for r in rows]
        a[:end] *= step
        a[lo:end] += gain * drive
    cav_dev = max(cav_dev, abs(_comm(a, a, dt) - 1.0))
    out = tuple(float(max(d, o)) for d, o in zip(diag, off))
    return OracleReport(
        dt, t_max, n, float(cav_dev), out, tuple(map(float, diag)), tuple(map(float, off)),
        float(cross) if n_ports > 1 else None,
    )


def _full(c, dt, t_max, n, k, drive, direct, t_o, step, gain) -> OracleReport:
    if n > FULL_MATRIX_MAX_BINS:
        raise ResourceBoundError(f"full matrix limited to {FULL_MATRIX_MAX_BINS} bins")
    n_ports = c.n_ports
    size = 1 + n * k
    a = np.zeros(size, dtype=complex)
    a[0] = 1.0
    a_rows = np.zeros((n + 1, size), dtype=complex)
    y = np.zeros((n_ports, n, size), dtype=complex)
    for m in range(n):
        a_rows[m] = a
        lo = 1 + m * k
        y[:, m, :] = np.outer(t_o, a)
        y[:, m, lo : lo + k] += direct
        a = a * step
        a[lo : lo + k] += gain * drive
    a_rows[n] = a
    w = np.full(size, 1.0 / dt)
    w[0] = 1.0
    cav = np.einsum("is,is,s->i", a_rows, a_rows.conj(), w).real
    eye = np.eye(n)
    diag, off = [], []
    for p in range(n_ports):
        g = dt * (y[p] * w) @ y[p].conj().T
        dev = np.abs(g - eye)
        diag.append(float(np.max(np.diagonal(dev))))
        off.append(float(np.max(dev - np.diag(np.diagonal(dev)))) if n > 1 else 0.0)
    cross = None
    if n_ports > 1:
        cross = max(
            float(np.max(np.abs(dt * (y[p] * w) @ y[q].conj().T)))
            for p in range(n_ports) for q in range(n_ports) if p != q
        )
    out = tuple(max(d, o) for d, o in zip(diag, off))
    return OracleReport(
        dt, t_max, n, float(np.max(np.abs(cav - 1.0))), out, tuple(diag), tuple(off), cross
    )


def convergence_study(c: CavityCoefficients, dts, t_max: float, port: int = 0) -> dict:
    """Output-commutator deviation over a sequence of bin widths.

    Returns the deviations, successive ratios, and the zero-width limit of a
    least-squares line through ``(dt, deviation)``.
    """
    dts = [float(x) for x in dts]
    devs = [discretized_commutator_oracle(c, dt, t_max).output_deviation[port] for dt in dts]
    if len(dts) < 2:
        raise ValueError("need at least two bin widths")
    ratios = [float(devs[i] / devs[i + 1]) for i in range(len(devs) - 1)]
    slope, intercept = np.polyfit(dts, devs, 1)
    return {
        "dts": dts,
        "deviations": devs,
        "ratios": ratios,
        "limit": float(intercept),
        "slope": float(slope),
    }
