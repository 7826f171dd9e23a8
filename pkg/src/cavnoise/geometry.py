"""Noise operators as vectors in a unitary space.

Every noise term is a linear combination of orthonormal, delta-correlated
basis operators, so all commutator data of a model is Gram data of its
coefficient vectors.  This module provides the scalar product, Gram matrix,
the magnitude/angle decomposition of the cross coefficient, and unitary
changes of basis including reduction to the minimal dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CoefficientError, UndefinedAngleError
from .model import CavityCoefficients

RANK_RTOL = 1e-12
UNITARY_TOL = 1e-12


def _vec(v) -> np.ndarray:
    arr = np.asarray(v, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise CoefficientError("noise vector contains a non-finite entry")
    return arr


def noise_inner_product(u, v) -> complex:
    """``sum_k conj(u_k) v_k``; swapping the arguments conjugates the result."""
    u, v = _vec(u), _vec(v)
    if u.shape != v.shape:
        raise CoefficientError(f"length mismatch: {u.size} vs {v.size}")
    return complex(np.vdot(u, v))


def gram_matrix(vectors) -> np.ndarray:
    """Hermitian matrix of pairwise scalar products, ``G[i, j] = <v_i, v_j>``."""
    vs = [_vec(v) for v in vectors]
    if not vs:
        return np.zeros((0, 0), dtype=complex)
    n = vs[0].size
    if any(v.size != n for v in vs):
        raise CoefficientError("length mismatch among noise vectors")
    m = np.vstack(vs).reshape(len(vs), n)
    return m.conj() @ m.T


def model_gram(c: CavityCoefficients) -> np.ndarray:
    """Gram matrix of ``[noise_cav, noise_out(port 0), ...]``."""
    return gram_matrix(list(c.noise_vectors()))


@dataclass(frozen=True)
class XiDecomposition:
    kappa: float
    zeta: float
    magnitude_c: float
    magnitude_o: float

    @property
    def xi(self) -> complex:
        return self.magnitude_c * self.magnitude_o * math.cos(self.zeta) * complex(
            math.cos(self.kappa), math.sin(self.kappa)
        )


def xi_decompose(noise_cav, noise_out) -> XiDecomposition:
    """Split ``xi = <noise_out, noise_cav>`` into norms, phase ``kappa`` and angle ``zeta``.

    ``zeta`` lies in ``[0, pi/2]`` and ``kappa`` in ``(-pi, pi]`` carries all of the
    phase; for orthogonal vectors ``kappa`` is 0.
    """
    c, o = _vec(noise_cav), _vec(noise_out)
    if c.shape != o.shape:
        raise CoefficientError(f"length mismatch: {c.size} vs {o.size}")
    nc = float(np.linalg.norm(c))
    no = float(np.linalg.norm(o))
    if nc == 0 or no == 0:
        raise UndefinedAngleError("angle between noise vectors is undefined for a zero vector")
    xi = complex(np.sum(c * np.conj(o)))
    cos_zeta = min(abs(xi) / (nc * no), 1.0)
    zeta = math.acos(cos_zeta)
    kappa = 0.0 if xi == 0 else math.atan2(xi.imag, xi.real)
    if kappa == -math.pi:
        kappa = math.pi
    return XiDecomposition(kappa, zeta, nc, no)


def _orthonormal_span(m: np.ndarray) -> np.ndarray:
    """Orthonormal basis (as rows) of the span of the rows of ``m``.

    Rows are processed in order; a row whose component orthogonal to the basis
    built so far is below ``RANK_RTOL * sigma_max`` is skipped.  Two passes of
    Gram-Schmidt keep the basis orthonormal for nearly parallel rows.
    """
    if m.size == 0:
        return np.zeros((0, m.shape[1]), dtype=complex)
    smax = np.linalg.svd(m, compute_uv=False)[0]
    cutoff = RANK_RTOL * smax
    basis: list[np.ndarray] = []
    for row in m:
        r = row.astype(complex)
        for _ in range(2):
            for e in basis:
                r = r - np.vdot(e, r) * e
        nr = np.linalg.norm(r)
        if nr > cutoff:
            basis.append(r / nr)
    if not basis:
        return np.zeros((0, m.shape[1]), dtype=complex)
    return np.vstack(basis)


def noise_rank(c: CavityCoefficients) -> int:
    """Number of singular values of the stacked noise vectors above the relative cutoff."""
    m = c.noise_vectors()
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > RANK_RTOL * s[0]))


def reduce_basis(c: CavityCoefficients) -> CavityCoefficients:
    """Equivalent model whose noise basis spans exactly the noise vectors.

    New coordinates are ``<e_j, v>`` for the orthonormal span ``e`` built from
    ``noise_cav`` first and then each port's ``noise_out``, so all Gram data is
    preserved.
    """
    m = c.noise_vectors()
    basis = _orthonormal_span(m)
    coords = m @ basis.conj().T
    return c.with_noise(coords[0], list(coords[1:]))


def is_unitary(u, tol: float = UNITARY_TOL) -> bool:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])), initial=0.0) <= tol)


def rotate_basis(c: CavityCoefficients, u) -> CavityCoefficients:
    """Apply the unitary ``u`` to every noise vector (``v -> u @ v``)."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (c.noise_dim, c.noise_dim):
        raise CoefficientError(f"rotation must be {c.noise_dim}x{c.noise_dim}, got {u.shape}")
    if not is_unitary(u):
        raise CoefficientError("rotation matrix is not unitary")
    return c.with_noise(u @ c.noise_cav, [u @ p.noise_out for p in c.ports])


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))
