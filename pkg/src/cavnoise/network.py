"""Linear scattering networks and Markovian feedback elimination.

A :class:`ScatteringNetwork` is a static unitary ``S`` acting on labelled
channels.  Channel ``i`` has one input (column ``i``) and one output (row
``i``) and is one of

* ``"cavity"``   - the output drives a mirror of an ideal primary cavity with
  coupling ``g``; the mirror's outgoing field ``g*a - d_in`` returns on the input,
* ``"external"`` - a radiative port of the effective cavity,
* ``"noise"``    - an unwanted-noise port; its input is a basis noise operator.

:func:`eliminate_network` removes the cavity channels by solving the
instantaneous loop and returns the effective :class:`CavityCoefficients`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import FormatError, NearSingularFeedbackError
from .geometry import is_unitary
from .model import CavityCoefficients, RadiativePort

CHANNEL_KINDS = ("cavity", "external", "noise")
LOOP_COND_MAX = 1e9
CROSS_REFLECTION_TOL = 1e-12


@dataclass(frozen=True)
class ScatteringNetwork:
    s_matrix: np.ndarray
    partition: tuple[str, ...]
    cavity_couplings: tuple[float, ...]
    omega0: float = 0.0
    absorb_rate: float = 0.0
    unitary_tol: float = 1e-12

    def __post_init__(self):
        s = np.array(self.s_matrix, dtype=complex)
        part = tuple(self.partition)
        g = tuple(float(x) for x in self.cavity_couplings)
        if s.ndim != 2 or s.shape[0] != s.shape[1]:
            raise FormatError(f"s_matrix must be square, got shape {s.shape}")
        if not np.all(np.isfinite(s)):
            raise FormatError("s_matrix contains a non-finite entry")
        if len(part) != s.shape[0]:
            raise FormatError(
                f"partition labels {len(part)} channels but s_matrix has {s.shape[0]}"
            )
        bad = [k for k in part if k not in CHANNEL_KINDS]
        if bad:
            raise FormatError(f"unknown channel kind(s): {sorted(set(bad))}")
        n_cav = part.count("cavity")
        if n_cav == 0 or part.count("external") == 0:
            raise FormatError("network needs at least one cavity and one external channel")
        if len(g) != n_cav:
            raise FormatError(f"{n_cav} cavity channels but {len(g)} couplings")
        if any(not (x > 0 and math.isfinite(x)) for x in g):
            raise FormatError("cavity couplings must be positive")
        if not (self.absorb_rate >= 0 and math.isfinite(self.absorb_rate)):
            raise FormatError("absorb_rate must be non-negative")
        if not is_unitary(s, self.unitary_tol):
            raise FormatError("s_matrix is not unitary")
        s.setflags(write=False)
        object.__setattr__(self, "s_matrix", s)
        object.__setattr__(self, "partition", part)
        object.__setattr__(self, "cavity_couplings", g)

    def indices(self, kind: str) -> list[int]:
        return [i for i, k in enumerate(self.partition) if k == kind]

    def counts(self) -> dict[str, int]:
        return {k: self.partition.count(k) for k in CHANNEL_KINDS}


def compose_netlist(
    blocks: Mapping[str, np.ndarray],
    links: Sequence[tuple[tuple[str, int], tuple[str, int]]],
    inputs: Sequence[tuple[str, int]],
    outputs: Sequence[tuple[str, int]],
) -> np.ndarray:
    """Scattering matrix of interconnected blocks.

    ``blocks[name]`` maps that block's inputs to its outputs.  Each link sends
    output ``(block, j)`` into input ``(block, i)``.  Every block input must be
    fed by exactly one link or network input, and every block output must go to
    exactly one link or network output.  Returns the matrix mapping ``inputs`` (in
    order) to ``outputs`` (in order).
    """
    names = list(blocks)
    in_off, out_off = {}, {}
    n_in = n_out = 0
    for name in names:
        m = np.asarray(blocks[name], dtype=complex)
        in_off[name], out_off[name] = n_in, n_out
        n_out += m.shape[0]
        n_in += m.shape[1]
    sblk = np.zeros((n_out, n_in), dtype=complex)
    for name in names:
        m = np.asarray(blocks[name], dtype=complex)
        sblk[out_off[name] : out_off[name] + m.shape[0], in_off[name] : in_off[name] + m.shape[1]] = m

    def pin(port, off, kind):
        name, k = port
        if name not in blocks:
            raise FormatError(f"unknown block {name!r}")
        size = np.shape(blocks[name])[0 if kind == "out" else 1]
        if not 0 <= k < size:
            raise FormatError(f"block {name!r} has no {kind}put {k}")
        return off[name] + k

    fed_in = [0] * n_in
    used_out = [0] * n_out
    conn = np.zeros((n_in, n_out))
    for src, dst in links:
        o, i = pin(src, out_off, "out"), pin(dst, in_off, "in")
        conn[i, o] = 1.0
        fed_in[i] += 1
        used_out[o] += 1
    ext_in = np.zeros((n_in, len(inputs)))
    for j, port in enumerate(inputs):
        i = pin(port, in_off, "in")
        ext_in[i, j] = 1.0
        fed_in[i] += 1
    ext_out = np.zeros((len(outputs), n_out))
    for j, port in enumerate(outputs):
        o = pin(port, out_off, "out")
        ext_out[j, o] = 1.0
        used_out[o] += 1
    if any(f != 1 for f in fed_in) or any(u != 1 for u in used_out):
        raise FormatError("netlist has a dangling or multiply connected port")
    loop = np.eye(n_in) - conn @ sblk
    if np.linalg.cond(loop) > LOOP_COND_MAX:
        raise NearSingularFeedbackError("internal loop of the netlist is singular")
    return ext_out @ sblk @ np.linalg.solve(loop, ext_in)


def eliminate_network(net: ScatteringNetwork) -> CavityCoefficients:
    """Effective cavity coefficients after eliminating the cavity-facing channels.

    Writing ``v`` for the network outputs on cavity channels and ``u = g*a - v`` for
    the returning mirror fields, ``(1 + S_cc) v = S_cc g a + S_ce b + S_cn c``.  The
    loop matrix ``M = 1 + S_cc`` must be well conditioned.  The noise basis of the
    result is the network's noise channels in order, followed by the primary
    cavity's absorption channel.
    """
    s = net.s_matrix
    ic, ie, inn = net.indices("cavity"), net.indices("external"), net.indices("noise")
    g = np.array(net.cavity_couplings, dtype=complex)
    sub = lambda r, c: s[np.ix_(r, c)]
    s_cc, s_ce, s_cn = sub(ic, ic), sub(ic, ie), sub(ic, inn)
    s_ec, s_ee, s_en = sub(ie, ic), sub(ie, ie), sub(ie, inn)

    loop = np.eye(len(ic)) + s_cc
    if np.linalg.cond(loop) > LOOP_COND_MAX:
        raise NearSingularFeedbackError(
            "feedback loop through the cavity mirrors is near-singular "
            f"(condition number {np.linalg.cond(loop):.3g})"
        )
    inv = np.linalg.inv(loop)

    pole = 1j * net.omega0 + 0.5 * float(np.sum(np.abs(g) ** 2)) - g @ inv @ s_cc @ g
    gamma = 2.0 * pole.real + net.absorb_rate
    omega = pole.imag
    t_c = g @ inv @ s_ce
    a_noise = g @ inv @ s_cn
    t_o = s_ec @ inv @ g
    refl = s_ee - s_ec @ inv @ s_ce
    out_noise = s_en - s_ec @ inv @ s_cn

    off = refl - np.diag(np.diag(refl))
    if off.size and np.max(np.abs(off)) > CROSS_REFLECTION_TOL:
        raise FormatError(
            "network couples distinct external ports promptly; not representable "
            "as per-port reflection coefficients"
        )
    noise_cav = np.concatenate([a_noise, [math.sqrt(net.absorb_rate)]])
    ports = tuple(
        RadiativePort(t_c[k], t_o[k], refl[k, k], np.concatenate([out_noise[k], [0.0]]))
        for k in range(len(ie))
    )
    return CavityCoefficients(gamma, omega, ports, noise_cav)
