"""Replacement schemes: beam-splitter networks that model unwanted noise.

One-sided schemes (primary cavity with coupling ``gamma``, absorption rate
``absorb_rate`` and three splitters):

* ``complete``       - bs1 and bs2 model loss inside the coupling mirror on the
  incoming and outgoing path, bs3 (a U(2) splitter) closes a feedback loop
  between the outgoing and incoming paths.  Noise slots: ``(c1, c2, c)``.
* ``no_mirror_loss`` - the complete scheme with bs1 = bs2 = identity.
* ``no_feedback``    - bs3 and the absorption channel removed.  Noise slots ``(c1, c2)``.

The two-sided scheme places a copy of the complete-scheme mirror block on each
side of a primary cavity with couplings ``gamma_right`` and ``gamma_left``:
right side bs1/bs2/bs5, left side bs3/bs4/bs6.  Noise slots ``(c1, c2, c3, c4, c)``.

Beam-splitter convention: ``T = cos(theta) e^{i mu}``, ``R = sin(theta) e^{i nu}``,
matrix ``e^{i phi} [[T, R], [-conj(R), conj(T)]]``.  In the feedback splitter
the phase ``phi`` multiplies only the external output, leaving the feedback
arm untouched.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import FormatError, NearSingularFeedbackError
from .model import CavityCoefficients, RadiativePort
from .network import ScatteringNetwork, compose_netlist, eliminate_network

LOOP_GUARD = 1e-9

KINDS = ("complete", "no_mirror_loss", "no_feedback", "two_sided", "network")
REQUIRED_SPLITTERS = {
    "complete": ("bs1", "bs2", "bs3"),
    "no_mirror_loss": ("bs3",),
    "no_feedback": ("bs1", "bs2"),
    "two_sided": ("bs1", "bs2", "bs3", "bs4", "bs5", "bs6"),
    "network": (),
}
# splitters that may carry a global phase
U2_SLOTS = {"complete": ("bs3",), "no_mirror_loss": ("bs3",), "two_sided": ("bs5", "bs6")}


@dataclass(frozen=True)
class BeamSplitterParams:
    theta: float = 0.0
    mu: float = 0.0
    nu: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        for name in ("theta", "mu", "nu", "phi"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise FormatError(f"beam splitter {name} must be finite")
            object.__setattr__(self, name, v)

    @property
    def T(self) -> complex:
        return math.cos(self.theta) * cmath.exp(1j * self.mu)

    @property
    def R(self) -> complex:
        return math.sin(self.theta) * cmath.exp(1j * self.nu)


IDENTITY = BeamSplitterParams()


def bs_matrix(p: BeamSplitterParams) -> np.ndarray:
    """``e^{i phi} [[T, R], [-conj(R), conj(T)]]``."""
    t, r = p.T, p.R
    return cmath.exp(1j * p.phi) * np.array([[t, r], [-r.conjugate(), t.conjugate()]])


def _feedback_block(p: BeamSplitterParams) -> np.ndarray:
    # inputs (returning path x, external input b); outputs (external output, forward path y)
    t, r = p.T, p.R
    return np.array(
        [[cmath.exp(1j * p.phi) * t, cmath.exp(1j * p.phi) * r], [-r.conjugate(), t.conjugate()]]
    )


@dataclass(frozen=True)
class SchemeSpec:
    kind: str
    gamma: float = 1.0
    omega0: float = 0.0
    absorb_rate: float = 0.0
    splitters: Mapping[str, BeamSplitterParams] = field(default_factory=dict)
    gamma_right: float | None = None
    gamma_left: float | None = None
    network: ScatteringNetwork | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise FormatError(f"unknown scheme kind {self.kind!r}")
        object.__setattr__(self, "splitters", dict(self.splitters))
        missing = [k for k in REQUIRED_SPLITTERS[self.kind] if k not in self.splitters]
        if missing:
            raise FormatError(f"scheme {self.kind!r} is missing splitters {missing}")
        extra = [k for k in self.splitters if k not in REQUIRED_SPLITTERS[self.kind]]
        if extra:
            raise FormatError(f"scheme {self.kind!r} does not use splitters {extra}")
        for name, bs in self.splitters.items():
            if not isinstance(bs, BeamSplitterParams):
                raise FormatError(f"splitter {name} must be BeamSplitterParams")
            if bs.phi != 0 and name not in U2_SLOTS.get(self.kind, ()):
                raise FormatError(f"splitter {name} is SU(2); phi must be 0")
        rates = [self.gamma] if self.kind != "two_sided" else [self.gamma_right, self.gamma_left]
        if self.kind == "two_sided" and (self.gamma_right is None or self.gamma_left is None):
            raise FormatError("two_sided scheme needs gamma_right and gamma_left")
        if self.kind != "network" and any(not (r > 0 and math.isfinite(r)) for r in rates):
            raise FormatError("radiative decay rates must be positive")
        if not (self.absorb_rate >= 0 and math.isfinite(self.absorb_rate)):
            raise FormatError("absorb_rate must be non-negative")
        if not math.isfinite(self.omega0):
            raise FormatError("omega0 must be finite")
        if self.kind == "network" and self.network is None:
            raise FormatError("network scheme needs a network payload")

    def bs(self, name: str) -> BeamSplitterParams:
        return self.splitters[name]


def _loop_denominator(bs1, bs2, bs3) -> complex:
    return 1 - bs3.R.conjugate() * bs1.T * bs2.T


def _check_loop(den: complex) -> None:
    if abs(den) <= LOOP_GUARD:
        raise NearSingularFeedbackError(
            f"feedback loop denominator |1 - conj(R3) T1 T2| = {abs(den):.3g} is below {LOOP_GUARD}"
        )


def _complete_closed_form(gamma, omega0, absorb_rate, bs1, bs2, bs3):
    t1, r1, t2, r2, t3, r3 = bs1.T, bs1.R, bs2.T, bs2.R, bs3.T, bs3.R
    loop = r3.conjugate() * t1 * t2
    den = 1 - loop
    _check_loop(den)
    d2 = abs(den) ** 2
    sg = math.sqrt(gamma)
    ph = cmath.exp(1j * bs3.phi)

    big_gamma = gamma * (1 - abs(loop) ** 2) / d2 + absorb_rate
    omega = omega0 - 0.5j * gamma * (loop - loop.conjugate()) / d2
    t_c = sg * t1 * t3.conjugate() / den
    a_c1 = sg * r1 / den
    a_c2 = -sg * t1 * r2 * r3.conjugate() / den
    t_o = sg * ph * t2 * t3 / den
    r_o = ph * (r3 - t1 * t2) / den
    a_o1 = -ph * t2 * r1 * t3 / den
    a_o2 = ph * r2 * t3 / den
    return big_gamma, omega, t_c, (a_c1, a_c2), t_o, r_o, (a_o1, a_o2)


def compose_complete(s: SchemeSpec) -> CavityCoefficients:
    """Closed-form coefficients of the complete one-sided scheme."""
    if s.kind not in ("complete", "no_mirror_loss"):
        raise FormatError(f"compose_complete needs a complete scheme, got {s.kind!r}")
    bs1 = s.splitters.get("bs1", IDENTITY)
    bs2 = s.splitters.get("bs2", IDENTITY)
    g, w, t_c, a_c, t_o, r_o, a_o = _complete_closed_form(
        s.gamma, s.omega0, s.absorb_rate, bs1, bs2, s.bs("bs3")
    )
    # the frequency shift is i times an anti-Hermitian combination, hence real
    noise_cav = [a_c[0], a_c[1], math.sqrt(s.absorb_rate)]
    port = RadiativePort(t_c, t_o, r_o, [a_o[0], a_o[1], 0.0])
    return CavityCoefficients(g, w.real, (port,), noise_cav)


def compose_no_mirror_loss(s: SchemeSpec) -> CavityCoefficients:
    """Complete scheme without mirror loss: bs1 = bs2 = identity."""
    if s.kind != "no_mirror_loss":
        raise FormatError(f"expected a no_mirror_loss scheme, got {s.kind!r}")
    return compose_complete(s)


def compose_no_feedback(s: SchemeSpec) -> CavityCoefficients:
    """Mirror loss without feedback or absorption: ``Gamma = gamma``, ``omega = omega0``."""
    if s.kind != "no_feedback":
        raise FormatError(f"expected a no_feedback scheme, got {s.kind!r}")
    t1, r1 = s.bs("bs1").T, s.bs("bs1").R
    t2, r2 = s.bs("bs2").T, s.bs("bs2").R
    sg = math.sqrt(s.gamma)
    port = RadiativePort(sg * t1, sg * t2, -t1 * t2, [-r1 * t2, r2])
    return CavityCoefficients(s.gamma, s.omega0, (port,), [sg * r1, 0.0])


def _mirror_block(prefix: str, bs_in, bs_out, bs_fb) -> tuple[dict, list]:
    """Blocks and internal links of one lossy mirror with feedback.

    Ports are addressed as ``(block, index)``:
    forward-path splitter ``in``: inputs (y, c_in), outputs (d_in, c_in_out);
    return-path splitter ``out``: inputs (d_out, c_out), outputs (x, c_out_out);
    feedback splitter ``fb``: inputs (x, b_in), outputs (b_out, y).
    """
    blocks = {
        prefix + "in": bs_matrix(bs_in),
        prefix + "out": bs_matrix(bs_out),
        prefix + "fb": _feedback_block(bs_fb),
    }
    links = [((prefix + "out", 0), (prefix + "fb", 0)), ((prefix + "fb", 1), (prefix + "in", 0))]
    return blocks, links


def build_network(s: SchemeSpec) -> ScatteringNetwork:
    """Assemble the scheme's splitters and wiring into one unitary scattering matrix.

    Channel order: cavity channels, external channels, noise channels.
    """
    if s.kind == "network":
        return s.network
    if s.kind == "complete":
        sides = [("R.", s.gamma, s.bs("bs1"), s.bs("bs2"), s.bs("bs3"))]
    elif s.kind == "two_sided":
        sides = [
            ("R.", s.gamma_right, s.bs("bs1"), s.bs("bs2"), s.bs("bs5")),
            ("L.", s.gamma_left, s.bs("bs3"), s.bs("bs4"), s.bs("bs6")),
        ]
    else:
        raise FormatError(f"scheme kind {s.kind!r} has no network form")

    blocks, links = {}, []
    cav_in, cav_out, ext_in, ext_out, noise_in, noise_out = [], [], [], [], [], []
    for prefix, _, bs_in, bs_out, bs_fb in sides:
        b, l = _mirror_block(prefix, bs_in, bs_out, bs_fb)
        blocks.update(b)
        links += l
        cav_in.append((prefix + "out", 0))
        cav_out.append((prefix + "in", 0))
        ext_in.append((prefix + "fb", 1))
        ext_out.append((prefix + "fb", 0))
        noise_in += [(prefix + "in", 1), (prefix + "out", 1)]
        noise_out += [(prefix + "in", 1), (prefix + "out", 1)]
    smat = compose_netlist(blocks, links, cav_in + ext_in + noise_in, cav_out + ext_out + noise_out)
    n = len(sides)
    partition = ("cavity",) * n + ("external",) * n + ("noise",) * (2 * n)
    couplings = tuple(math.sqrt(side[1]) for side in sides)
    return ScatteringNetwork(smat, partition, couplings, s.omega0, s.absorb_rate)


def compose_two_sided(s: SchemeSpec) -> CavityCoefficients:
    if s.kind != "two_sided":
        raise FormatError(f"expected a two_sided scheme, got {s.kind!r}")
    for side in (("bs1", "bs2", "bs5"), ("bs3", "bs4", "bs6")):
        _check_loop(_loop_denominator(*(s.bs(k) for k in side)))
    return eliminate_network(build_network(s))


def compose(s: SchemeSpec) -> CavityCoefficients:
    """Dispatch on ``s.kind``."""
    if s.kind == "complete":
        return compose_complete(s)
    if s.kind == "no_mirror_loss":
        return compose_no_mirror_loss(s)
    if s.kind == "no_feedback":
        return compose_no_feedback(s)
    if s.kind == "two_sided":
        return compose_two_sided(s)
    return eliminate_network(s.network)


def feedback_free_residual(c: CavityCoefficients) -> complex:
    """``t_o t_c / Gamma + r_o``; vanishes on models without feedback or absorption."""
    p = c.ports[0]
    return p.t_o * p.t_c / c.gamma + p.r_o


def lossless_mirror_residual(c: CavityCoefficients) -> float:
    """``|r_o|^2 - 1``; vanishes when the mirror itself adds no noise."""
    return abs(c.ports[0].r_o) ** 2 - 1.0
