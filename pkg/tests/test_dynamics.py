import math

import numpy as np
import pytest
from scipy.integrate import quad

from cavnoise.dynamics import (
    cavity_commutator,
    extraction_efficiency,
    impulse_response,
    output_commutator_kernel,
    simulate,
    simulate_mean,
    simulate_photon_number,
)
from cavnoise.errors import DomainError
from cavnoise.families import sample_models
from cavnoise.model import RadiativePort, ideal_cavity, make_cavity_coefficients
from cavnoise.schemes import IDENTITY, SchemeSpec, compose

S = math.sqrt(0.5)


def test_cavity_commutator_examples(nf_example):
    assert cavity_commutator(nf_example, 0.0) == 1.0
    assert cavity_commutator(nf_example, 3.7) == pytest.approx(1.0, abs=1e-15)
    half = make_cavity_coefficients(2.0, 0.0, [RadiativePort(S, 0, 0, [0])], [S])
    assert cavity_commutator(half, 1.0) == pytest.approx(math.exp(-2) + 0.5 * (1 - math.exp(-2)))
    assert cavity_commutator(half, 1.0) == pytest.approx(0.56767, abs=1e-5)
    with pytest.raises(DomainError):
        cavity_commutator(half, -1.0)


def test_output_kernel_examples(nf_example, perturbed):
    k = output_commutator_kernel(ideal_cavity())
    assert (k.singular_coeff, k.smooth_coeff) == (1.0, 0)
    k = output_commutator_kernel(nf_example)
    assert k.singular_coeff == pytest.approx(1.0, abs=1e-15)
    assert abs(k.smooth_coeff) < 1e-12
    k = output_commutator_kernel(perturbed)
    assert k.singular_coeff == pytest.approx(0.9725)
    assert abs(k.smooth_coeff) > 1e-3


def _commutator_by_quadrature(c, t1, t2, p=0, q=0):
    """[b_p(t1), b_q^dag(t2)] for t1 > t2 from the impulse-response kernels."""
    k1 = impulse_response(c, t1)
    k2 = impulse_response(c, t2)
    total = k1.output_initial[p] * np.conj(k2.output_initial[q])

    def integrand(s, part):
        a, b = impulse_response(c, t1 - s), impulse_response(c, t2 - s)
        v = np.vdot(b.output_from_input[q], a.output_from_input[p])
        v += np.vdot(b.output_from_noise[q], a.output_from_noise[p])
        return getattr(v, part)

    re = quad(integrand, 0, t2, args=("real",), epsabs=1e-13, epsrel=1e-12)[0]
    im = quad(integrand, 0, t2, args=("imag",), epsabs=1e-13, epsrel=1e-12)[0]
    total += re + 1j * im
    lag = impulse_response(c, t1 - t2)
    # prompt parts of b_q(t2) against the delayed response of b_p(t1)
    total += lag.output_from_input[p, q] * np.conj(lag.prompt_reflection[q])
    total += np.vdot(lag.prompt_noise[q], lag.output_from_noise[p])
    return total


@pytest.mark.parametrize("which", ["nf_example", "perturbed", "symmetric_loss"])
def test_kernel_matches_quadrature(which, request):
    c = request.getfixturevalue(which)
    k = output_commutator_kernel(c)
    for t1, t2 in [(1.3, 0.4), (2.0, 1.5)]:
        expected = _commutator_by_quadrature(c, t1, t2)
        analytic = (k.smooth_coeff + k.transient_coeff * math.exp(-c.gamma * t2)) * np.exp(-k.pole * (t1 - t2))
        assert abs(analytic - expected) < 1e-9
        # reversed order follows from hermiticity
        rev = (k.smooth_coeff_reverse + k.transient_coeff_reverse * math.exp(-c.gamma * t2)) * np.exp(
            -k.pole.conjugate() * (t1 - t2))
        assert abs(rev - np.conj(expected)) < 1e-9


def test_off_balance_kernel_has_transient():
    c = make_cavity_coefficients(2.0, 0.3, [RadiativePort(S, 0.4, -0.2, [0])], [S])
    k = output_commutator_kernel(c)
    assert abs(k.transient_coeff) > 0.01
    assert abs(_commutator_by_quadrature(c, 1.1, 0.7) - (k.smooth_coeff + k.transient_coeff * math.exp(-1.4))
               * np.exp(-k.pole * 0.4)) < 1e-9


def test_two_sided_cross_port_kernel_vanishes():
    for _, c in sample_models("two_sided", 20, seed=4):
        k = output_commutator_kernel(c, 0, 1)
        assert abs(k.singular_coeff) < 1e-12
        assert abs(k.smooth_coeff) < 1e-12
        assert abs(_commutator_by_quadrature(c, 1.0, 0.5, 0, 1)) < 1e-9


@pytest.mark.parametrize("family", ["complete", "no_feedback", "no_mirror_loss", "two_sided"])
def test_composed_models_preserve_commutators(family):
    for _, c in sample_models(family, 100, seed=9):
        for t in (0.0, 0.1, 1.0, 10.0):
            assert cavity_commutator(c, t / c.gamma) == pytest.approx(1.0, abs=1e-12)
        for p in range(c.n_ports):
            k = output_commutator_kernel(c, p)
            assert k.singular_coeff == pytest.approx(1.0, abs=1e-12)
            assert abs(k.smooth_coeff) <= 1e-12


def test_impulse_response_examples():
    c = ideal_cavity()
    assert impulse_response(c, 0.0).cavity_initial == 1
    assert impulse_response(c, 2.0).cavity_initial == pytest.approx(math.exp(-1))
    with pytest.raises(DomainError):
        impulse_response(c, -0.1)


def test_input_kernel_energy(symmetric_loss):
    c = symmetric_loss
    f = lambda tau: abs(impulse_response(c, tau).output_from_input[0, 0]) ** 2
    val, _ = quad(f, 0, np.inf)
    p = c.ports[0]
    assert val == pytest.approx(abs(p.t_o) ** 2 * abs(p.t_c) ** 2 / c.gamma, rel=1e-10)


def test_mean_zero_without_drive(nf_example):
    tr = simulate_mean(nf_example, None, 0.0, np.linspace(0, 3, 31))
    assert not np.any(tr.mean_amp) and not np.any(tr.out_flux)


def test_steady_state_amplitude(symmetric_loss):
    tr = simulate_mean(symmetric_loss, lambda t: [1.0], 0.0, np.linspace(0, 60, 601))
    assert tr.mean_amp[-1] == pytest.approx(S / 0.5, abs=1e-12)
    assert tr.mean_amp[-1] == pytest.approx(1.41421, abs=1e-5)


def test_ideal_cavity_reemits_everything():
    tr = simulate_mean(ideal_cavity(), lambda t: [0.7], 0.0, np.linspace(0, 60, 121))
    assert abs(tr.out_mean[0, -1]) == pytest.approx(0.7, abs=1e-12)


def test_exponential_integrator_is_exact(nf_example):
    def drive(t):
        return [1.0 if t < 1.0 else 0.3j]

    coarse = simulate_mean(nf_example, drive, 0.2 - 0.1j, np.linspace(0, 4, 41))
    fine = simulate_mean(nf_example, drive, 0.2 - 0.1j, np.linspace(0, 4, 81))
    assert np.max(np.abs(fine.mean_amp[::2] - coarse.mean_amp)) < 1e-13
    assert np.max(np.abs(fine.out_mean[:, ::2] - coarse.out_mean)) < 1e-13


def test_free_decay_matches_closed_form(nf_example):
    a0 = 0.5 + 0.2j
    t = np.linspace(0, 2, 9)
    tr = simulate_mean(nf_example, None, a0, t)
    assert np.allclose(tr.mean_amp, a0 * np.exp(-nf_example.pole * t), atol=1e-15)


def test_grid_validation(nf_example):
    with pytest.raises(DomainError):
        simulate_mean(nf_example, None, 0, [0, 1, 1])
    with pytest.raises(DomainError):
        simulate_photon_number(nf_example, 1.0, [1, 0])
    with pytest.raises(DomainError):
        simulate_photon_number(nf_example, -1.0, [0, 1])


def test_photon_number():
    assert not np.any(simulate_photon_number(ideal_cavity(), 0.0, [0, 1]).photon_number)
    tr = simulate_photon_number(ideal_cavity(), 1.0, [0.0, 1.0])
    assert tr.photon_number[1] == pytest.approx(0.36788, abs=1e-5)
    assert tr.out_flux[0, 1] == pytest.approx(math.exp(-1))


def test_simulate_adds_incoherent_population(symmetric_loss):
    t = np.linspace(0, 1, 11)
    tr = simulate(symmetric_loss, t, n0=2.0, a0=1.0)
    assert tr.photon_number == pytest.approx(np.exp(-t) + 2 * np.exp(-t))


def test_extraction_efficiency_examples(symmetric_loss):
    assert extraction_efficiency(ideal_cavity()) == 1.0
    assert extraction_efficiency(symmetric_loss) == pytest.approx(0.5, abs=1e-12)
    sp = {k: IDENTITY for k in ("bs1", "bs2", "bs3", "bs4", "bs5", "bs6")}
    c = compose(SchemeSpec("two_sided", gamma_right=1.0, gamma_left=2.0, splitters=sp))
    assert extraction_efficiency(c, 0) == pytest.approx(1 / 3)


@pytest.mark.parametrize("family", ["complete", "no_feedback", "no_mirror_loss", "two_sided"])
def test_emitted_fraction_matches_efficiency(family):
    for _, c in sample_models(family, 10, seed=13):
        total = 0.0
        for p in range(c.n_ports):
            f = lambda t, p=p: simulate_photon_number(c, 1.0, [t]).out_flux[p, 0]
            emitted = quad(f, 0, np.inf, epsabs=1e-13)[0]
            assert emitted == pytest.approx(extraction_efficiency(c, p), rel=1e-9)
            total += emitted
        assert total <= 1 + 1e-12


def test_balance_holds_when_emission_equals_injection():
    # with |t_o| = |t_c| the stored energy splits into radiated and absorbed parts
    for _, c in sample_models("no_mirror_loss", 20, seed=17):
        radiated = sum(extraction_efficiency(c, p) for p in range(c.n_ports))
        assert radiated + c.noise_cav_norm2 / c.gamma == pytest.approx(1.0, abs=1e-12)
