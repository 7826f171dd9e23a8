"""Scheme families as maps from flat real parameter vectors, plus seeded sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .model import CavityCoefficients
from .schemes import (
    IDENTITY,
    BeamSplitterParams,
    SchemeSpec,
    _loop_denominator,
    compose,
)

HALF_PI = math.pi / 2


@dataclass(frozen=True)
class Box:
    """Sampling ranges for one kind of parameter."""

    theta: tuple[float, float]
    phase: tuple[float, float]
    gamma: tuple[float, float]
    absorb: tuple[float, float]
    omega0: tuple[float, float]


# interior box for Jacobian rank studies: keeps away from rank-dropping boundaries
RANK_BOX = Box(
    theta=(0.1, HALF_PI - 0.1),
    phase=(-math.pi + 0.1, math.pi - 0.1),
    gamma=(0.5, 2.0),
    absorb=(0.1, 2.0),
    omega0=(-1.0, 1.0),
)
# wide box for constraint sweeps
SWEEP_BOX = Box(
    theta=(0.1, HALF_PI - 0.1),
    phase=(-math.pi, math.pi),
    gamma=(0.1, 10.0),
    absorb=(0.0, 5.0),
    omega0=(-5.0, 5.0),
)

_KIND_OF_NAME = {
    "theta": "theta",
    "mu": "phase",
    "nu": "phase",
    "phi": "phase",
    "omega0": "omega0",
    "gamma": "gamma",
    "gamma_right": "gamma",
    "gamma_left": "gamma",
    "absorb_rate": "absorb",
}


def _bs(p, i) -> BeamSplitterParams:
    return BeamSplitterParams(p[i], p[i + 1], p[i + 2])


def _bs_u2(p, i) -> BeamSplitterParams:
    return BeamSplitterParams(p[i], p[i + 1], p[i + 2], p[i + 3])


def _complete(p) -> SchemeSpec:
    return SchemeSpec(
        "complete", gamma=p[11], omega0=p[10], absorb_rate=p[12],
        splitters={"bs1": _bs(p, 0), "bs2": _bs(p, 3), "bs3": _bs_u2(p, 6)},
    )


def _no_feedback(p) -> SchemeSpec:
    return SchemeSpec(
        "no_feedback", gamma=p[7], omega0=p[6], splitters={"bs1": _bs(p, 0), "bs2": _bs(p, 3)}
    )


def _no_mirror_loss(p) -> SchemeSpec:
    return SchemeSpec(
        "no_mirror_loss", gamma=p[5], omega0=p[4], absorb_rate=p[6], splitters={"bs3": _bs_u2(p, 0)}
    )


def _two_sided(p) -> SchemeSpec:
    names = ["bs1", "bs2", "bs3", "bs4"]
    sp = {n: _bs(p, 3 * i) for i, n in enumerate(names)}
    sp["bs5"] = _bs_u2(p, 12)
    sp["bs6"] = _bs_u2(p, 16)
    return SchemeSpec(
        "two_sided", omega0=p[20], gamma_right=p[21], gamma_left=p[22], absorb_rate=p[23],
        splitters=sp,
    )


def _bs_names(tag: str, u2: bool = False) -> list[str]:
    names = [f"theta{tag}", f"mu{tag}", f"nu{tag}"]
    return names + [f"phi{tag}"] if u2 else names


@dataclass(frozen=True)
class Family:
    name: str
    params: tuple[str, ...]
    to_scheme: Callable[[np.ndarray], SchemeSpec]
    loop_splitters: tuple[tuple[str, str, str], ...] = ()

    @property
    def n_params(self) -> int:
        return len(self.params)

    def scheme(self, p) -> SchemeSpec:
        p = np.asarray(p, dtype=float)
        if p.shape != (self.n_params,):
            raise ValueError(f"{self.name} takes {self.n_params} parameters, got {p.shape}")
        return self.to_scheme(p)

    def compose(self, p) -> CavityCoefficients:
        return compose(self.scheme(p))

    def loop_margin(self, p) -> float:
        """Smallest feedback-loop denominator modulus (inf without feedback)."""
        s = self.scheme(p)
        margins = [
            abs(_loop_denominator(*(s.splitters.get(k, IDENTITY) for k in trio)))
            for trio in self.loop_splitters
        ]
        return min(margins, default=math.inf)

    def sample(self, rng: np.random.Generator, box: Box = SWEEP_BOX, guard: float = 1e-6) -> np.ndarray:
        """One uniform draw from ``box``; redrawn while the loop margin is below ``guard``."""
        while True:
            p = np.array([rng.uniform(*getattr(box, _base_kind(n))) for n in self.params])
            if self.loop_margin(p) > guard:
                return p


def _base_kind(name: str) -> str:
    if name in _KIND_OF_NAME:
        return _KIND_OF_NAME[name]
    return _KIND_OF_NAME[name.rstrip("0123456789")]


FAMILIES: dict[str, Family] = {
    "complete": Family(
        "complete",
        tuple(_bs_names("1") + _bs_names("2") + _bs_names("3", True) + ["omega0", "gamma", "absorb_rate"]),
        _complete,
        (("bs1", "bs2", "bs3"),),
    ),
    "no_feedback": Family(
        "no_feedback",
        tuple(_bs_names("1") + _bs_names("2") + ["omega0", "gamma"]),
        _no_feedback,
    ),
    "no_mirror_loss": Family(
        "no_mirror_loss",
        tuple(_bs_names("3", True) + ["omega0", "gamma", "absorb_rate"]),
        _no_mirror_loss,
        (("bs1", "bs2", "bs3"),),
    ),
    "two_sided": Family(
        "two_sided",
        tuple(
            _bs_names("1") + _bs_names("2") + _bs_names("3") + _bs_names("4")
            + _bs_names("5", True) + _bs_names("6", True)
            + ["omega0", "gamma_right", "gamma_left", "absorb_rate"]
        ),
        _two_sided,
        (("bs1", "bs2", "bs5"), ("bs3", "bs4", "bs6")),
    ),
}


def get_family(name: str) -> Family:
    try:
        return FAMILIES[name]
    except KeyError:
        raise ValueError(f"unknown family {name!r}; choose from {sorted(FAMILIES)}") from None


def sample_models(family: str, n: int, seed: int, box: Box = SWEEP_BOX):
    """Yield ``(params, coefficients)`` for ``n`` seeded draws."""
    fam = get_family(family)
    rng = np.random.default_rng(seed)
    for _ in range(n):
        p = fam.sample(rng, box)
        yield p, fam.compose(p)
