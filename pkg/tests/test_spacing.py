import math

import numpy as np
import pytest
from scipy.integrate import quad

from qharper import ModelParams
from qharper.qspace import QuantumSpace, build_h0
from qharper.spacing import (
    GOE,
    POISSON,
    SpacingSample,
    berry_robnik_mixture,
    berry_robnik_reference,
    brody_pdf,
    brody_reference,
    ks_statistic,
    poisson_pdf,
    quasi_energy_spacings,
    wigner_dyson_pdf,
)

TWO_PI = 2 * math.pi


class TestQuasiEnergySpacings:
    def test_equally_spaced_circle(self):
        lam = np.linspace(-math.pi, math.pi, 12, endpoint=False)
        s = quasi_energy_spacings(lam).spacings
        assert np.abs(s - 1.0).max() < 1e-12

    def test_raw_circular_spacings_partition_circle(self, rng):
        lam = rng.uniform(-math.pi, math.pi, 57)
        s = quasi_energy_spacings(lam).spacings
        total_raw = s.sum() * (TWO_PI / len(s))  # mean of raw spacings is 2*pi/n
        assert abs(total_raw - TWO_PI) < 1e-10
        assert abs(s.mean() - 1.0) < 1e-10

    def test_rotation_invariance(self, rng):
        lam = rng.uniform(-math.pi, math.pi, 40)
        a = np.sort(quasi_energy_spacings(lam).spacings)
        b = np.sort(quasi_energy_spacings(np.mod(lam + 1.234 + math.pi, TWO_PI) - math.pi).spacings)
        assert np.abs(a - b).max() < 1e-10

    def test_minimum_count(self):
        with pytest.raises(ValueError):
            quasi_energy_spacings([0.1, 0.2])

    def test_regular_model_is_closer_to_poisson(self):
        p = ModelParams(1.5, 0.5)
        sp = QuantumSpace(101)
        energies = np.linalg.eigvalsh(build_h0(p, sp))
        lam = np.mod(-101 * energies + math.pi, TWO_PI) - math.pi
        sample = quasi_energy_spacings(lam)
        assert ks_statistic(sample, POISSON) < ks_statistic(sample, GOE)

    def test_subspace_spacings_are_not_a_partition_of_the_full_set(self, rng):
        lam = rng.uniform(-math.pi, math.pi, 30)
        full = np.sort(quasi_energy_spacings(lam).spacings)
        sub = np.sort(np.concatenate([
            quasi_energy_spacings(lam[:15]).spacings,
            quasi_energy_spacings(lam[15:]).spacings,
        ]))
        assert not np.allclose(full, sub)


class TestReferencePdfs:
    @pytest.mark.parametrize("s", [0.0, 0.5, 2.0])
    def test_brody_zero_is_poisson(self, s):
        assert brody_pdf(s, 0.0) == pytest.approx(math.exp(-s), abs=1e-14)

    def test_brody_one_is_wigner_surmise(self):
        s = np.linspace(0, 5, 200)
        assert np.abs(brody_pdf(s, 1.0) - wigner_dyson_pdf(s)).max() < 1e-10

    def test_wigner_dyson_vanishes_at_origin(self):
        assert wigner_dyson_pdf(0.0) == 0.0

    @pytest.mark.parametrize("pdf", [poisson_pdf, wigner_dyson_pdf,
                                     lambda s: brody_pdf(s, 0.3)])
    def test_unit_norm_and_mean(self, pdf):
        norm, _ = quad(lambda s: float(pdf(s)), 0, 50, limit=200)
        mean, _ = quad(lambda s: s * float(pdf(s)), 0, 50, limit=200)
        assert abs(norm - 1.0) < 1e-6
        assert abs(mean - 1.0) < 1e-6

    def test_brody_range_check(self):
        with pytest.raises(ValueError):
            brody_pdf(1.0, 1.5)


class TestBerryRobnikMixture:
    def test_single_poisson_component(self):
        pdf = berry_robnik_mixture([1.0], ["poisson"])
        s = np.linspace(0, 6, 100)
        assert np.abs(pdf(s) - np.exp(-s)).max() < 1e-12

    def test_single_goe_component(self):
        pdf = berry_robnik_mixture([1.0], ["goe"])
        s = np.linspace(0, 6, 100)
        assert np.abs(pdf(s) - wigner_dyson_pdf(s)).max() < 1e-12

    def test_three_component_model_sits_between_references(self):
        # pointwise between Poisson and the Wigner surmise; the band pinches
        # at the curves' crossing near s = 0.43, so start just above it
        pdf = berry_robnik_mixture([0.1, 0.45, 0.45], ["poisson", "goe", "goe"])
        s = np.linspace(0.55, 1.5, 60)
        vals = pdf(s)
        lo = np.minimum(poisson_pdf(s), wigner_dyson_pdf(s))
        hi = np.maximum(poisson_pdf(s), wigner_dyson_pdf(s))
        assert (vals >= lo - 1e-12).all()
        assert (vals <= hi + 1e-12).all()

    def test_unit_norm_and_mean(self):
        pdf = berry_robnik_mixture([0.1, 0.45, 0.45], ["poisson", "goe", "goe"])
        s = np.linspace(0, 30, 30001)
        vals = pdf(s)
        assert abs(np.trapezoid(vals, s) - 1.0) < 1e-6
        assert abs(np.trapezoid(s * vals, s) - 1.0) < 1e-6

    def test_input_validation(self):
        with pytest.raises(ValueError):
            berry_robnik_mixture([], [])
        with pytest.raises(ValueError):
            berry_robnik_mixture([0.5, 0.6], ["poisson", "goe"])
        with pytest.raises(ValueError):
            berry_robnik_mixture([1.0], ["gue"])


class TestKsStatistic:
    def test_self_consistency_monte_carlo(self):
        rng = np.random.default_rng(99)
        sample = SpacingSample(rng.exponential(size=10_000), "mc")
        assert ks_statistic(sample, POISSON) < 0.03
        # and a Wigner-surmise sample against GOE: invert the cdf analytically
        u = rng.uniform(size=10_000)
        s = np.sqrt(-4.0 / math.pi * np.log1p(-u))
        assert ks_statistic(SpacingSample(s, "mc"), GOE) < 0.03

    def test_constant_sample_against_poisson(self):
        sample = SpacingSample(np.ones(1000), "const")
        assert ks_statistic(sample, POISSON) == pytest.approx(math.exp(-1), abs=1e-12)

    def test_brody_reference_cdf_matches_pdf_integral(self):
        ref = brody_reference(0.3)
        val, _ = quad(lambda s: float(ref.pdf(s)), 0, 1.3, limit=200)
        assert abs(float(ref.cdf(1.3)) - val) < 1e-10

    def test_mixture_reference_quadrature_cdf(self):
        ref = berry_robnik_reference([0.1, 0.45, 0.45], ["poisson", "goe", "goe"])
        val, _ = quad(lambda s: float(ref.pdf(s)), 0, 1.3, limit=200)
        assert abs(float(ref.cdf(1.3)) - val) < 1e-6

    def test_berry_robnik_reference_is_usable(self):
        ref = berry_robnik_reference([0.1, 0.45, 0.45], ["poisson", "goe", "goe"])
        assert 0.0 < float(ref.cdf(1.0)) < 1.0

    def test_empty_sample_rejected(self):
        with pytest.raises(ValueError):
            ks_statistic(SpacingSample(np.array([]), "empty"), POISSON)

    def test_negative_spacings_rejected(self):
        with pytest.raises(ValueError):
            SpacingSample(np.array([0.5, -0.1]), "bad")
