"""Cavity coefficient data model and the commutator-preservation constraints.

A realistic cavity is described by

    da/dt = -(i*omega + gamma/2) a + sum_p t_c[p] b_in[p] + sum_k noise_cav[k] c_k
    b_out[p] = t_o[p] a + r_o[p] b_in[p] + sum_k noise_out[p][k] c_k

with the noise operators ``c_k`` forming an orthonormal, delta-correlated basis.
The coefficient vectors ``noise_cav`` and ``noise_out`` are stored in that
basis; the cross coefficient

    xi[p] = sum_k noise_cav[k] * conj(noise_out[p][k]) = [C_cav(t1), C_out[p]^dag(t2)] / delta

is derived on demand and never stored.

Orientation of the cross constraint: preserving ``[b_out(t1), b_out^dag(t2)]``
requires ``t_o + conj(t_c) r_o + conj(xi) = 0``.  The conjugate is what makes
the discretized commutator of the output field delta-correlated (see
``cavnoise.oracle``) and is what the closed-form replacement schemes satisfy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CoefficientError

DEFAULT_TOL = 1e-10


def _as_vector(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise CoefficientError(f"{name} contains a non-finite entry")
    arr.setflags(write=False)
    return arr


def _as_amp(value, name: str) -> complex:
    z = complex(value)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise CoefficientError(f"{name} is not finite: {value!r}")
    return z


@dataclass(frozen=True)
class RadiativePort:
    """One radiative input-output channel.

    Parameters
    ----------
    t_c : complex
        Injection coefficient of the port's input into the cavity mode, sqrt(1/time).
    t_o : complex
        Extraction coefficient of the cavity mode into the port's output, sqrt(1/time).
    r_o : complex
        Prompt reflection of the port's input into its output (dimensionless).
    noise_out : array of complex
        Output-noise coefficients in the model's shared noise basis (dimensionless).
    """

    t_c: complex
    t_o: complex
    r_o: complex
    noise_out: np.ndarray = field(default_factory=lambda: _as_vector([], "noise_out"))

    def __post_init__(self):
        object.__setattr__(self, "t_c", _as_amp(self.t_c, "t_c"))
        object.__setattr__(self, "t_o", _as_amp(self.t_o, "t_o"))
        object.__setattr__(self, "r_o", _as_amp(self.r_o, "r_o"))
        object.__setattr__(self, "noise_out", _as_vector(self.noise_out, "noise_out"))

    @property
    def noise_out_norm2(self) -> float:
        return float(np.vdot(self.noise_out, self.noise_out).real)

    def replace(self, **changes) -> "RadiativePort":
        kw = dict(t_c=self.t_c, t_o=self.t_o, r_o=self.r_o, noise_out=self.noise_out)
        kw.update(changes)
        return RadiativePort(**kw)

    def __eq__(self, other):
        if not isinstance(other, RadiativePort):
            return NotImplemented
        return (
            self.t_c == other.t_c
            and self.t_o == other.t_o
            and self.r_o == other.r_o
            and np.array_equal(self.noise_out, other.noise_out)
        )

    __hash__ = None


@dataclass(frozen=True)
class CavityCoefficients:
    """Full c-number description of a (possibly multi-port) cavity with unwanted noise.

    Construction validates shapes and finiteness only; physicality is checked
    separately by :func:`constraint_residuals` so that off-manifold points stay
    representable.
    """

    gamma: float
    omega: float
    ports: tuple[RadiativePort, ...]
    noise_cav: np.ndarray

    def __post_init__(self):
        gamma = float(self.gamma)
        omega = float(self.omega)
        if not (math.isfinite(gamma) and math.isfinite(omega)):
            raise CoefficientError("gamma and omega must be finite")
        if gamma <= 0:
            raise CoefficientError(f"decay rate must be positive, got {gamma}")
        ports = tuple(self.ports)
        if not ports:
            raise CoefficientError("at least one radiative port is required")
        for p in ports:
            if not isinstance(p, RadiativePort):
                raise CoefficientError("ports must be RadiativePort instances")
        noise_cav = _as_vector(self.noise_cav, "noise_cav")
        for i, p in enumerate(ports):
            if p.noise_out.shape != noise_cav.shape:
                raise CoefficientError(
                    f"dimension mismatch: port {i} has {p.noise_out.size} noise coefficients, "
                    f"noise_cav has {noise_cav.size}"
                )
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "ports", ports)
        object.__setattr__(self, "noise_cav", noise_cav)

    @property
    def noise_dim(self) -> int:
        return int(self.noise_cav.size)

    @property
    def n_ports(self) -> int:
        return len(self.ports)

    @property
    def pole(self) -> complex:
        """Complex decay constant ``i*omega + gamma/2``."""
        return complex(self.gamma / 2, self.omega)

    @property
    def noise_cav_norm2(self) -> float:
        return float(np.vdot(self.noise_cav, self.noise_cav).real)

    def xi(self, port: int = 0) -> complex:
        """Cross coefficient ``sum_k noise_cav[k] * conj(noise_out[k])`` for one port."""
        return complex(np.sum(self.noise_cav * np.conj(self.ports[port].noise_out)))

    def noise_vectors(self) -> np.ndarray:
        """Stack ``[noise_cav, noise_out(port 0), noise_out(port 1), ...]`` as rows."""
        return np.vstack([self.noise_cav] + [p.noise_out for p in self.ports]).reshape(
            1 + self.n_ports, self.noise_dim
        )

    def with_noise(self, noise_cav, noise_outs: Sequence) -> "CavityCoefficients":
        """Same rates and port coefficients, new noise vectors (one per port)."""
        ports = tuple(p.replace(noise_out=v) for p, v in zip(self.ports, noise_outs, strict=True))
        return CavityCoefficients(self.gamma, self.omega, ports, noise_cav)

    def replace_port(self, index: int, **changes) -> "CavityCoefficients":
        ports = list(self.ports)
        ports[index] = ports[index].replace(**changes)
        return CavityCoefficients(self.gamma, self.omega, tuple(ports), self.noise_cav)

    def __eq__(self, other):
        if not isinstance(other, CavityCoefficients):
            return NotImplemented
        return (
            self.gamma == other.gamma
            and self.omega == other.omega
            and self.ports == other.ports
            and np.array_equal(self.noise_cav, other.noise_cav)
        )

    __hash__ = None


def make_cavity_coefficients(gamma, omega, ports, noise_cav) -> CavityCoefficients:
    """Validated constructor; accepts any sequences for the noise vectors."""
    return CavityCoefficients(gamma, omega, tuple(ports), noise_cav)


def ideal_cavity(gamma: float = 1.0, omega: float = 0.0) -> CavityCoefficients:
    """Lossless one-sided cavity: ``t_c = t_o = sqrt(gamma)``, ``r_o = -1``, no noise."""
    s = math.sqrt(gamma)
    return CavityCoefficients(gamma, omega, (RadiativePort(s, s, -1.0, []),), [])


@dataclass(frozen=True)
class ConstraintReport:
    decay_residual: float
    unitarity_residual: tuple[float, ...]
    cross_residual: tuple[complex, ...]
    inequality_slacks: tuple[float, float, float, float] | None
    tol: float
    passed: bool

    @property
    def max_abs_residual(self) -> float:
        vals = [abs(self.decay_residual)]
        vals += [abs(u) for u in self.unitarity_residual]
        vals += [abs(x) for x in self.cross_residual]
        return max(vals)

    @property
    def min_slack(self) -> float | None:
        return None if self.inequality_slacks is None else min(self.inequality_slacks)

    def as_dict(self) -> dict:
        return {
            "decay_residual": self.decay_residual,
            "unitarity_residual": list(self.unitarity_residual),
            "cross_residual": [{"re": z.real, "im": z.imag} for z in self.cross_residual],
            "inequality_slacks": None
            if self.inequality_slacks is None
            else list(self.inequality_slacks),
            "tol": self.tol,
            "passed": self.passed,
        }


def decay_residual(c: CavityCoefficients) -> float:
    """``gamma - (|noise_cav|^2 + sum_p |t_c[p]|^2)``."""
    return c.gamma - (c.noise_cav_norm2 + sum(abs(p.t_c) ** 2 for p in c.ports))


def unitarity_residual(c: CavityCoefficients, port: int = 0) -> float:
    p = c.ports[port]
    return abs(p.r_o) ** 2 + p.noise_out_norm2 - 1.0


def cross_residual(c: CavityCoefficients, port: int = 0) -> complex:
    p = c.ports[port]
    # conj(xi) = sum_k conj(noise_cav[k]) * noise_out[k]
    return p.t_o + p.t_c.conjugate() * p.r_o + complex(np.vdot(c.noise_cav, p.noise_out))


def inequality_slacks(c: CavityCoefficients) -> tuple[float, float, float, float]:
    """Slacks of the four one-sided necessary conditions; all must be >= 0.

    The fourth bound is ``|t_o + conj(t_c) r_o|^2 <= (gamma - |t_c|^2)(1 - |r_o|^2)``,
    i.e. Cauchy-Schwarz applied to ``|xi| <= |noise_cav| |noise_out|`` once the
    equality constraints are substituted.
    """
    if c.n_ports != 1:
        raise CoefficientError("inequality bounds are only defined for one-port models")
    p = c.ports[0]
    tc2, to2, ro2 = abs(p.t_c) ** 2, abs(p.t_o) ** 2, abs(p.r_o) ** 2
    s1 = c.gamma - tc2
    s2 = c.gamma - to2
    s3 = 1.0 - ro2
    s4 = s1 * s3 - abs(p.t_o + p.t_c.conjugate() * p.r_o) ** 2
    return (s1, s2, s3, s4)


def constraint_residuals(c: CavityCoefficients, tol: float = DEFAULT_TOL) -> ConstraintReport:
    """Evaluate every equality residual (and the one-port inequality slacks)."""
    dec = decay_residual(c)
    uni = tuple(unitarity_residual(c, i) for i in range(c.n_ports))
    cross = tuple(cross_residual(c, i) for i in range(c.n_ports))
    slacks = inequality_slacks(c) if c.n_ports == 1 else None
    ok = abs(dec) <= tol and all(abs(u) <= tol for u in uni) and all(abs(x) <= tol for x in cross)
    if slacks is not None:
        ok = ok and all(s >= -tol for s in slacks)
    return ConstraintReport(dec, uni, cross, slacks, tol, bool(ok))


def is_physical(c: CavityCoefficients, tol: float = DEFAULT_TOL) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    return constraint_residuals(c, tol).passed


def ideal_reflection(t_o: complex, t_c: complex) -> complex:
    """Reflection of a noise-free cavity implied by its transmissions: ``-t_o / conj(t_c)``."""
    t_c = complex(t_c)
    if t_c == 0:
        raise ZeroDivisionError("injection coefficient t_c is zero; reflection undefined")
    return -complex(t_o) / t_c.conjugate()


def ideal_residuals(c: CavityCoefficients, port: int = 0) -> tuple[float, float, complex]:
    """Residuals of the noise-free relations, ignoring any noise coefficients.

    Returns ``(gamma - |t_c|^2, |r_o|^2 - 1, t_o + conj(t_c) r_o)``.
    """
    p = c.ports[port]
    return (
        c.gamma - abs(p.t_c) ** 2,
        abs(p.r_o) ** 2 - 1.0,
        p.t_o + p.t_c.conjugate() * p.r_o,
    )
