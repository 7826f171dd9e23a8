import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cavnoise.errors import CoefficientError, UndefinedAngleError
from cavnoise.geometry import (
    gram_matrix,
    model_gram,
    noise_inner_product,
    noise_rank,
    random_unitary,
    reduce_basis,
    rotate_basis,
    xi_decompose,
)
from cavnoise.model import RadiativePort, constraint_residuals, make_cavity_coefficients

S = math.sqrt(0.5)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
cvec = st.integers(1, 5).flatmap(
    lambda n: st.tuples(arrays(float, n, elements=finite), arrays(float, n, elements=finite))
).map(lambda t: t[0] + 1j * t[1])


def test_inner_product_examples():
    assert noise_inner_product([1, 0], [0, 1]) == 0
    assert noise_inner_product([S, 0, 0], [-0.5, S, 0]) == pytest.approx(-0.5 * S)
    assert noise_inner_product([0.6, 0.8j], [0.6, 0.8j]) == pytest.approx(1.0)


def test_inner_product_length_mismatch():
    with pytest.raises(CoefficientError):
        noise_inner_product([1, 0], [1, 0, 0])


def test_gram_examples():
    assert np.array_equal(gram_matrix([[1, 0], [0, 1]]), np.eye(2))
    g = gram_matrix([[S, 0, 0], [-0.5, S, 0]])
    assert np.allclose(g, [[0.5, -0.5 * S], [-0.5 * S, 0.75]])
    assert gram_matrix([]).shape == (0, 0)


@given(cvec, cvec)
def test_conjugate_symmetry_and_cauchy_schwarz(u, v):
    if u.size != v.size:
        return
    assert noise_inner_product(v, u) == pytest.approx(noise_inner_product(u, v).conjugate())
    bound = np.linalg.norm(u) * np.linalg.norm(v)
    assert abs(noise_inner_product(u, v)) <= bound * (1 + 1e-12) + 1e-12


@given(st.lists(cvec, min_size=1, max_size=4))
def test_gram_hermitian_psd(vs):
    n = vs[0].size
    vs = [v for v in vs if v.size == n]
    g = gram_matrix(vs)
    assert np.allclose(g, g.conj().T)
    assert np.min(np.linalg.eigvalsh(g)) >= -1e-12 * max(np.trace(g).real, 1.0)


def test_xi_decompose_complete_example():
    d = xi_decompose([S, 0, 0], [-0.5, S, 0])
    assert d.kappa == pytest.approx(math.pi)
    assert d.zeta == pytest.approx(math.acos(1 / math.sqrt(3)))
    assert d.xi == pytest.approx(-0.5 * S)


def test_xi_decompose_orthogonal():
    d = xi_decompose([1, 0], [0, 2j])
    assert (d.kappa, d.zeta) == (0.0, pytest.approx(math.pi / 2))
    assert (d.magnitude_c, d.magnitude_o) == (1.0, 2.0)


def test_xi_decompose_zero_vector():
    with pytest.raises(UndefinedAngleError):
        xi_decompose([1, 0], [0, 0])


@given(cvec, cvec)
def test_xi_decompose_roundtrip(c, o):
    if c.size != o.size or np.linalg.norm(c) == 0 or np.linalg.norm(o) == 0:
        return
    d = xi_decompose(c, o)
    assert 0 <= d.zeta <= math.pi / 2
    assert -math.pi < d.kappa <= math.pi
    xi = complex(np.sum(c * np.conj(o)))
    assert abs(d.xi - xi) <= 1e-12 * (1 + d.magnitude_c * d.magnitude_o)


def test_reduce_symmetric_example(symmetric_loss):
    r = reduce_basis(symmetric_loss)
    assert r.noise_dim == 2
    assert np.allclose(r.noise_cav, [S, 0])
    assert np.allclose(r.ports[0].noise_out, [-0.5, S])
    assert np.max(np.abs(model_gram(r) - model_gram(symmetric_loss))) <= 1e-12


def test_reduce_orthogonal_case():
    c = make_cavity_coefficients(5.0, 0.0, [RadiativePort(2, 0, 0, [0, 0, 0.7j])], [0, 1.0, 0])
    r = reduce_basis(c)
    assert np.allclose(r.noise_cav, [1.0, 0])
    assert np.allclose(np.abs(r.ports[0].noise_out), [0, 0.7])


def test_reduce_two_dimensional_input_keeps_gram(nf_example):
    r = reduce_basis(nf_example)
    assert r.noise_dim == 2
    assert np.allclose(model_gram(r), model_gram(nf_example), atol=1e-12)


@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_reduce_idempotent_and_preserves_residuals(seed, dim):
    rng = np.random.default_rng(seed)
    # rank-deficient noise: two vectors embedded in `dim + 2` slots
    basis = random_unitary(dim + 2, rng)[:2]
    nc = rng.standard_normal(2) @ basis
    no = (rng.standard_normal(2) + 1j * rng.standard_normal(2)) @ basis
    c = make_cavity_coefficients(2.0, 0.1, [RadiativePort(0.3, 0.5j, -0.2, no)], nc)
    r = reduce_basis(c)
    assert r.noise_dim == noise_rank(c) <= 2
    assert reduce_basis(r).noise_dim == r.noise_dim
    assert np.max(np.abs(model_gram(r) - model_gram(c))) <= 1e-12
    a, b = constraint_residuals(c), constraint_residuals(r)
    assert b.unitarity_residual[0] == pytest.approx(a.unitarity_residual[0], abs=1e-12)
    assert abs(b.cross_residual[0] - a.cross_residual[0]) <= 1e-12


def test_rotate_identity_and_swap(nf_example):
    assert rotate_basis(nf_example, np.eye(2)) == nf_example
    swapped = rotate_basis(nf_example, [[0, 1], [1, 0]])
    assert np.array_equal(swapped.noise_cav, nf_example.noise_cav[::-1])
    assert constraint_residuals(swapped) == constraint_residuals(nf_example)


def test_rotate_rejects_non_unitary(nf_example):
    with pytest.raises(CoefficientError):
        rotate_basis(nf_example, [[1, 0], [0, 1.001]])
    with pytest.raises(CoefficientError):
        rotate_basis(nf_example, np.eye(3))


def test_random_rotation_of_complete_example(symmetric_loss):
    rng = np.random.default_rng(20240611)
    r = rotate_basis(symmetric_loss, random_unitary(3, rng))
    a, b = constraint_residuals(symmetric_loss), constraint_residuals(r)
    assert abs(a.decay_residual - b.decay_residual) <= 1e-12
    assert abs(a.cross_residual[0] - b.cross_residual[0]) <= 1e-12
    assert np.allclose(model_gram(r), model_gram(symmetric_loss), atol=1e-12)
