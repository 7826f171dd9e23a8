"""Acceptance criteria, one test per criterion, each recording a pass/fail line."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from cavnoise.dynamics import cavity_commutator, extraction_efficiency, simulate_photon_number
from cavnoise.families import SWEEP_BOX, get_family, sample_models
from cavnoise.fileio import load_scheme
from cavnoise.geometry import model_gram, reduce_basis
from cavnoise.manifold import completeness_check, manifold_dimension
from cavnoise.model import constraint_residuals, ideal_reflection, ideal_residuals, inequality_slacks
from cavnoise.network import eliminate_network
from cavnoise.oracle import convergence_study
from cavnoise.schemes import (
    BeamSplitterParams,
    SchemeSpec,
    build_network,
    compose,
    feedback_free_residual,
    lossless_mirror_residual,
)

from conftest import SCHEME_DIR

FAMILIES = ("complete", "no_mirror_loss", "no_feedback", "two_sided")


def test_constraint_suite(verdict):
    worst_res, worst_slack, n = 0.0, math.inf, 0
    for fam in FAMILIES:
        for _, c in sample_models(fam, 10_000, seed=1):
            rep = constraint_residuals(c)
            worst_res = max(worst_res, rep.max_abs_residual)
            if rep.min_slack is not None:
                worst_slack = min(worst_slack, rep.min_slack)
            n += 1
    ok = worst_res <= 1e-10 and worst_slack >= -1e-12
    assert verdict(1, "constraint suite", ok,
                   f"{n} models, max |residual| {worst_res:.2e}, min slack {worst_slack:.3g}")


def test_lossless_reduction(verdict):
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(1000):
        mu = rng.uniform(-math.pi, math.pi, 4)
        s = SchemeSpec(
            "complete", gamma=rng.uniform(0.1, 10), omega0=rng.uniform(-5, 5),
            splitters={
                "bs1": BeamSplitterParams(0, mu[0], rng.uniform(-math.pi, math.pi)),
                "bs2": BeamSplitterParams(0, mu[1], rng.uniform(-math.pi, math.pi)),
                "bs3": BeamSplitterParams(0, mu[2], rng.uniform(-math.pi, math.pi), mu[3]),
            },
        )
        c = compose(s)
        p = c.ports[0]
        d, u, x = ideal_residuals(c)
        worst = max(worst, abs(d) / c.gamma, abs(u), abs(x) / math.sqrt(c.gamma),
                    abs(p.r_o - ideal_reflection(p.t_o, p.t_c)),
                    np.max(np.abs(c.noise_cav)), np.max(np.abs(p.noise_out)), abs(c.omega - s.omega0))
    assert verdict(2, "lossless reduction", worst <= 1e-14, f"1000 draws, max residual {worst:.2e}")


def test_network_oracle_equivalence(verdict):
    fam = get_family("complete")
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(1000):
        s = fam.scheme(fam.sample(rng, SWEEP_BOX))
        a, b = compose(s), eliminate_network(build_network(s))
        pa, pb = a.ports[0], b.ports[0]
        worst = max(worst, abs(a.gamma - b.gamma), abs(a.omega - b.omega), abs(pa.t_c - pb.t_c),
                    abs(pa.t_o - pb.t_o), abs(pa.r_o - pb.r_o),
                    np.max(np.abs(model_gram(a) - model_gram(b))))
    assert verdict(3, "network elimination vs closed form", worst <= 1e-10,
                   f"1000 draws, max difference {worst:.2e}")


def test_degenerate_certificates(verdict):
    nf = max(abs(feedback_free_residual(c)) for _, c in sample_models("no_feedback", 1000, seed=4))
    nml = 0.0
    for _, c in sample_models("no_mirror_loss", 1000, seed=4):
        p = c.ports[0]
        nml = max(nml, abs(lossless_mirror_residual(c)), abs(p.r_o - ideal_reflection(p.t_o, p.t_c)))
    q = BeamSplitterParams(math.pi / 4)
    witness = abs(feedback_free_residual(compose(SchemeSpec(
        "complete", gamma=1.0, splitters={"bs1": q, "bs2": q, "bs3": q}))))
    ok = nf <= 1e-12 and nml <= 1e-12 and witness >= 0.1
    assert verdict(4, "degenerate-scheme certificates", ok,
                   f"no_feedback {nf:.2e}, no_mirror_loss {nml:.2e}, witness violation {witness:.4f}")


def test_completeness_verdicts(verdict):
    cases = [("complete", "noisy_one_sided", 8), ("no_feedback", "no_feedback_sub", 6),
             ("no_mirror_loss", "no_mirror_loss_sub", 5)]
    parts, ok = [], True
    for fam, target, pinned in cases:
        v = completeness_check(fam, 100, seed=42, target=target)
        good = (v.rank == manifold_dimension(target) == pinned and v.fraction >= 0.99
                and v.min_gap >= 1e3)
        ok &= good
        parts.append(f"{fam} rank {v.rank} at {v.fraction:.0%} gap>={v.min_gap:.1e}")
    assert verdict(5, "completeness verdicts", ok, "; ".join(parts))


def test_commutator_preservation(verdict):
    worst = 0.0
    for fam in FAMILIES:
        for _, c in sample_models(fam, 1000, seed=6):
            for t in (0.0, 0.1, 1.0, 10.0):
                worst = max(worst, abs(cavity_commutator(c, t / c.gamma) - 1.0))
    dts = (4e-3, 2e-3, 1e-3)
    ratios = []
    for name in ("no_feedback_example", "symmetric_loss", "generic_complete"):
        c = compose(load_scheme(SCHEME_DIR / f"{name}.json"))
        ratios += convergence_study(c, dts, 5.0 / c.gamma)["ratios"]
    nf = compose(load_scheme(SCHEME_DIR / "no_feedback_example.json"))
    limit = convergence_study(nf.replace_port(0, r_o=-0.4), dts, 10.0)["limit"]
    ok = worst <= 1e-12 and all(abs(r - 2.0) <= 0.2 for r in ratios) and abs(limit - 0.0275) <= 1e-3
    assert verdict(6, "commutator preservation", ok,
                   f"analytic max dev {worst:.2e}; oracle ratios {min(ratios):.3f}..{max(ratios):.3f}; "
                   f"perturbed limit {limit:.5f}")


def test_energy_balance(verdict):
    # stated balance: sum_p integral of out_flux + |noise_cav|^2 / Gamma = 1 for n0 = 1
    worst, failures, n = 0.0, {}, 0
    for fam in FAMILIES:
        for _, c in sample_models(fam, 100, seed=7):
            emitted = 0.0
            for p in range(c.n_ports):
                flux = lambda t, p=p: simulate_photon_number(c, 1.0, [t]).out_flux[p, 0]
                emitted += quad(flux, 0, np.inf, epsabs=1e-13, epsrel=1e-12)[0]
            dev = abs(emitted + c.noise_cav_norm2 / c.gamma - 1.0)
            worst = max(worst, dev)
            failures[fam] = failures.get(fam, 0) + (dev > 1e-8)
            n += 1
    summary = ", ".join(f"{k} {v}/100" for k, v in failures.items())
    assert verdict(7, "energy balance", worst <= 1e-8,
                   f"{n} draws, max deviation {worst:.3g}; violations: {summary}")


def test_efficiency_anchor(verdict):
    eff = extraction_efficiency(compose(load_scheme(SCHEME_DIR / "symmetric_loss.json")))
    assert verdict(8, "efficiency anchor", abs(eff - 0.5) <= 1e-12, f"efficiency {eff!r}")


def test_basis_reduction(verdict):
    models = [compose(load_scheme(p)) for p in sorted(SCHEME_DIR.glob("*.json"))
              if p.stem != "near_singular_loop"]
    for fam in FAMILIES:
        models += [c for _, c in sample_models(fam, 500, seed=9)]
    worst_gram, ok_dims = 0.0, True
    for c in models:
        r = reduce_basis(c)
        ok_dims &= r.noise_dim <= (2 if c.n_ports == 1 else 3)
        worst_gram = max(worst_gram, float(np.max(np.abs(model_gram(r) - model_gram(c)))))
    one = max(reduce_basis(c).noise_dim for c in models if c.n_ports == 1)
    two = max(reduce_basis(c).noise_dim for c in models if c.n_ports == 2)
    assert verdict(9, "basis reduction", ok_dims and worst_gram <= 1e-12,
                   f"{len(models)} models, max dim one-sided {one} two-sided {two}, "
                   f"gram error {worst_gram:.2e}")
