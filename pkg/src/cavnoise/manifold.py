"""Completeness of scheme parametrizations via numerical Jacobian rank.

A scheme family maps real parameters to cavity coefficients.  Its image is a
full-dimensional patch of the constraint manifold iff the Jacobian of

    parameters -> gauge-invariant coefficient coordinates

has rank equal to the manifold dimension at generic points.  The coordinates
are (Gamma, omega, t_c, t_o, r_o, |noise_cav|^2, |noise_out|^2, xi) split into
real and imaginary parts, which are unchanged by rotations of the noise basis.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import CavityError, CoefficientError, DomainError, StencilError
from .families import RANK_BOX, Box, get_family
from .geometry import model_gram
from .model import CavityCoefficients

EMBEDDING_LABELS = (
    "gamma", "omega", "re_t_c", "im_t_c", "re_t_o", "im_t_o", "re_r_o", "im_r_o",
    "norm2_cav", "norm2_out", "re_xi", "im_xi",
)

# (real coordinate count, independent real constraint count)
_DIMENSION_COUNTS = {
    # Gamma, omega, t_c, t_o, r_o; decay rate, unit reflection, cross relation (2)
    "ideal_one_sided": (8, 4),
    # plus |A_c|^2, |A_o|^2, xi; decay, unitarity, cross (2)
    "noisy_one_sided": (12, 4),
    # the above plus t_o t_c / Gamma + r_o = 0 (2)
    "no_feedback_sub": (12, 6),
    # noise_out = 0 fixes |A_o|^2 and xi; remaining 9 coordinates carry decay, |r_o| = 1, cross (2)
    "no_mirror_loss_sub": (9, 4),
}

DEFAULT_FD_STEP = 1e-6
DEFAULT_RANK_RTOL = 1e-8
MODAL_FRACTION = 0.99


def embed_coefficients(c: CavityCoefficients) -> np.ndarray:
    """Twelve real gauge-invariant coordinates of a one-port model."""
    if c.n_ports != 1:
        raise CoefficientError("embedding is defined for one-port models; use embed_gram")
    p = c.ports[0]
    xi = c.xi(0)
    return np.array([
        c.gamma, c.omega,
        p.t_c.real, p.t_c.imag, p.t_o.real, p.t_o.imag, p.r_o.real, p.r_o.imag,
        c.noise_cav_norm2, p.noise_out_norm2, xi.real, xi.imag,
    ])


def embed_gram(c: CavityCoefficients) -> np.ndarray:
    """Gauge-invariant coordinates for any number of ports.

    Gamma, omega, each port's (t_c, t_o, r_o) as real pairs, then the diagonal
    and the upper triangle (real and imaginary parts) of the noise Gram matrix.
    No expected rank is asserted for multi-port families.
    """
    out = [c.gamma, c.omega]
    for p in c.ports:
        out += [p.t_c.real, p.t_c.imag, p.t_o.real, p.t_o.imag, p.r_o.real, p.r_o.imag]
    g = model_gram(c)
    n = g.shape[0]
    out += [g[i, i].real for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            out += [g[i, j].real, g[i, j].imag]
    return np.array(out)


def _embedder(c: CavityCoefficients) -> np.ndarray:
    return embed_coefficients(c) if c.n_ports == 1 else embed_gram(c)


def jacobian(family: str, p, step: float = DEFAULT_FD_STEP) -> np.ndarray:
    """Central-difference Jacobian of the embedded coefficients, one column per parameter."""
    if not step > 0:
        raise ValueError("step must be positive")
    fam = get_family(family)
    p = np.asarray(p, dtype=float)
    cols = []
    for i, name in enumerate(fam.params):
        e = np.zeros_like(p)
        e[i] = step
        try:
            plus = _embedder(fam.compose(p + e))
            minus = _embedder(fam.compose(p - e))
        except CavityError as exc:
            raise StencilError(name, exc) from exc
        cols.append((plus - minus) / (2 * step))
    return np.column_stack(cols)


def numerical_rank(m, rel_tol: float = DEFAULT_RANK_RTOL) -> tuple[int, np.ndarray]:
    """Count of singular values above ``rel_tol * sigma_max``, and the singular values."""
    m = np.atleast_2d(np.asarray(m, dtype=float))
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0, s
    return int(np.sum(s > rel_tol * s[0])), s


def manifold_dimension(model_class: str) -> int:
    try:
        coords, constraints = _DIMENSION_COUNTS[model_class]
    except KeyError:
        raise ValueError(
            f"unknown model class {model_class!r}; choose from {sorted(_DIMENSION_COUNTS)}"
        ) from None
    return coords - constraints


@dataclass(frozen=True)
class RankVerdict:
    family: str
    target: str
    rank: int
    expected: int
    complete: bool
    fraction: float
    samples_tested: int
    seed: int
    singular_values: tuple[float, ...]
    min_gap: float
    gap_fraction: float
    rank_counts: dict[int, int] = field(default_factory=dict)
    failed_samples: int = 0

    def as_dict(self) -> dict:
        return {
            "family": self.family,
            "target": self.target,
            "modal_rank": self.rank,
            "expected": self.expected,
            "complete": self.complete,
            "fraction": self.fraction,
            "samples_tested": self.samples_tested,
            "failed_samples": self.failed_samples,
            "seed": self.seed,
            "rank_counts": {str(k): v for k, v in sorted(self.rank_counts.items())},
            "median_singular_values": list(self.singular_values),
            "min_gap": self.min_gap,
            "gap_fraction": self.gap_fraction,
        }


GAP_THRESHOLD = 1e3


def _gap(s: np.ndarray, r: int) -> float:
    if r == 0:
        return 0.0
    if r >= s.size or s[r] == 0:
        return float("inf")
    return float(s[r - 1] / s[r])


def completeness_check(
    family: str,
    n_samples: int,
    seed: int,
    step: float = DEFAULT_FD_STEP,
    rel_tol: float = DEFAULT_RANK_RTOL,
    target: str = "noisy_one_sided",
    box: Box = RANK_BOX,
) -> RankVerdict:
    """Jacobian rank at ``n_samples`` seeded interior points.

    ``complete`` is true when the modal rank equals ``manifold_dimension(target)``
    and is attained at no less than 99% of the evaluated samples.  Samples are
    drawn and reported in index order, so the verdict is reproducible.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    fam = get_family(family)
    rng = np.random.default_rng(seed)
    ranks, svals, failed = [], [], 0
    for _ in range(n_samples):
        p = fam.sample(rng, box)
        try:
            j = jacobian(family, p, step)
        except StencilError:
            failed += 1
            continue
        r, s = numerical_rank(j, rel_tol)
        ranks.append(r)
        svals.append(s)
    if not ranks:
        raise DomainError("every sample failed stencil evaluation")
    counts = Counter(ranks)
    modal = max(sorted(counts), key=lambda r: counts[r])
    fraction = counts[modal] / len(ranks)
    at_modal = [s for r, s in zip(ranks, svals) if r == modal]
    gaps = [_gap(s, modal) for s in at_modal]
    expected = manifold_dimension(target)
    return RankVerdict(
        family=family,
        target=target,
        rank=modal,
        expected=expected,
        complete=bool(modal == expected and fraction >= MODAL_FRACTION),
        fraction=fraction,
        samples_tested=len(ranks),
        seed=seed,
        singular_values=tuple(float(x) for x in np.median(np.vstack(at_modal), axis=0)),
        min_gap=float(min(gaps)),
        gap_fraction=sum(g >= GAP_THRESHOLD for g in gaps) / len(gaps),
        rank_counts=dict(counts),
        failed_samples=failed,
    )
