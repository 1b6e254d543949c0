"""Coefficient families: formula spot checks, symmetry, parameter ranges,
daughter-distribution identities, and the sampled hypothesis certification."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from gcfpbe import (ActivatedSludge, Affine, ConstantKernel, ConstantRate,
                    DaughterDistribution, FragmentationRate, Gravitational,
                    LinearShear, ModifiedSmoluchowski, NonlinearShear,
                    PowerLaw, ProbeSpec, ProductKernel, TableKernel, TableRate,
                    daughter_count, eval_coagulation, eval_daughter,
                    eval_fragmentation_rate, verify_assumptions)
from gcfpbe.coefficients import death_is_bounded, growth_lipschitz_constant

from conftest import TABLE_KERNELS, zero_coeffs

sizes = st.floats(min_value=1e-6, max_value=1e6)


class TestKernelFormulas:
    def test_linear_shear_unit(self):
        assert eval_coagulation(LinearShear(), 1.0, 1.0) == pytest.approx(8.0)

    def test_gravitational_equal_sizes_vanishes(self):
        assert eval_coagulation(Gravitational(), 2.0, 2.0) == 0.0

    def test_product_half(self):
        assert eval_coagulation(ProductKernel(0.5), 4.0, 9.0) == pytest.approx(6.0)

    def test_nonlinear_shear(self):
        assert eval_coagulation(NonlinearShear(), 1.0, 1.0) == pytest.approx(2.0 ** (7.0 / 3.0))

    def test_modified_smoluchowski(self):
        # (1+1)^2 / (1*1 + 1) = 2
        assert eval_coagulation(ModifiedSmoluchowski(c=1.0), 1.0, 1.0) == pytest.approx(2.0)

    def test_activated_sludge(self):
        # s = 2, q = 1, u_c = 1: 2 / (1 + 1) = 1
        assert eval_coagulation(ActivatedSludge(q=1.0, u_c=1.0), 1.0, 1.0) == pytest.approx(1.0)

    def test_constant(self):
        assert eval_coagulation(ConstantKernel(3.5), 0.1, 200.0) == 3.5

    def test_domain_error_on_nonpositive_size(self):
        with pytest.raises(ValueError):
            eval_coagulation(LinearShear(), 0.0, 1.0)
        with pytest.raises(ValueError):
            eval_coagulation(LinearShear(), 1.0, -2.0)

    @pytest.mark.parametrize("name", sorted(TABLE_KERNELS))
    @given(u=sizes, u1=sizes)
    @settings(max_examples=25, deadline=None)
    def test_symmetry_exact(self, name, u, u1):
        k = TABLE_KERNELS[name]
        assert float(k(u, u1)) == float(k(u1, u))

    @pytest.mark.parametrize("name", sorted(TABLE_KERNELS))
    def test_nonnegative_on_probe_grid(self, name):
        u = np.geomspace(1e-8, 1e8, 40)
        U, V = np.meshgrid(u, u)
        assert np.all(TABLE_KERNELS[name](U, V) >= 0.0)


class TestKernelParameters:
    def test_product_rejects_omega_one(self):
        with pytest.raises(ValueError, match=r"\[0, 1\)"):
            ProductKernel(1.0)
        with pytest.raises(ValueError):
            ProductKernel(1.2)

    def test_sludge_rejects_bad_q(self):
        with pytest.raises(ValueError, match=r"\[0, 3\)"):
            ActivatedSludge(q=3.0, u_c=1.0)
        with pytest.raises(ValueError):
            ActivatedSludge(q=1.0, u_c=0.0)

    def test_smoluchowski_rejects_nonpositive_c(self):
        with pytest.raises(ValueError):
            ModifiedSmoluchowski(c=0.0)

    def test_constant_rejects_negative(self):
        with pytest.raises(ValueError):
            ConstantKernel(-1.0)


class TestTableKernel:
    def make(self):
        pts = np.array([0.5, 1.0, 2.0, 4.0])
        vals = np.add.outer(pts, pts ** 2)  # deliberately asymmetric samples
        return TableKernel(points=tuple(pts), values=tuple(map(tuple, vals)))

    def test_symmetrized_by_averaging(self):
        k = self.make()
        for u, u1 in [(0.7, 3.1), (1.0, 2.0), (0.5, 4.0)]:
            assert float(k(u, u1)) == float(k(u1, u))

    def test_interpolates_nodes(self):
        pts = (1.0, 2.0, 3.0)
        vals = tuple(tuple(float(a * b) for b in pts) for a in pts)
        k = TableKernel(points=pts, values=vals)
        assert float(k(2.0, 3.0)) == pytest.approx(6.0)

    def test_clamps_outside_range(self):
        k = self.make()
        assert float(k(1e-3, 1.0)) == float(k(0.5, 1.0))

    def test_rejects_bad_tables(self):
        with pytest.raises(ValueError):
            TableKernel(points=(1.0,), values=((1.0,),))
        with pytest.raises(ValueError):
            TableKernel(points=(1.0, 2.0), values=((1.0, 1.0),))
        with pytest.raises(ValueError):
            TableKernel(points=(2.0, 1.0), values=((1.0, 1.0), (1.0, 1.0)))


class TestFragmentationRate:
    def test_linear_case(self):
        assert eval_fragmentation_rate(FragmentationRate(1.0, 1.0), 3.0) == pytest.approx(3.0)

    def test_constant_rate_convention_at_zero(self):
        # 0^0 := 1 makes l1 = 0 the constant-rate case
        assert eval_fragmentation_rate(FragmentationRate(2.0, 0.0), 0.0) == pytest.approx(2.0)

    def test_sqrt_case(self):
        assert eval_fragmentation_rate(FragmentationRate(1.0, 0.5), 4.0) == pytest.approx(2.0)

    def test_negative_size_rejected(self):
        with pytest.raises(ValueError):
            eval_fragmentation_rate(FragmentationRate(1.0, 0.5), -1.0)

    def test_parameter_ranges(self):
        with pytest.raises(ValueError):
            FragmentationRate(-1.0, 0.5)
        with pytest.raises(ValueError):
            FragmentationRate(1.0, 1.5)

    @given(l0=st.floats(0.0, 10.0), l1=st.floats(0.0, 1.0), u=st.floats(0.0, 1e6))
    @settings(max_examples=50, deadline=None)
    def test_linear_bound_holds(self, l0, l1, u):
        spec = FragmentationRate(l0, l1)
        p, q = spec.linear_bound()
        assert spec(u) <= p * u + q + 1e-12 * (1.0 + u)


class TestDaughterDistribution:
    def test_binary_uniform_case(self):
        assert eval_daughter(DaughterDistribution(0.0), 0.5, 1.0) == pytest.approx(2.0)

    def test_zero_above_parent(self):
        for nu in (0.0, -0.25, -0.5, -0.9):
            assert eval_daughter(DaughterDistribution(nu), 2.0, 1.0) == 0.0

    def test_singular_case_value(self):
        # 1.5 * 0.25^{-0.5} = 3
        assert eval_daughter(DaughterDistribution(-0.5), 0.25, 1.0) == pytest.approx(3.0)

    def test_count(self):
        assert daughter_count(DaughterDistribution(0.0)) == pytest.approx(2.0)
        assert daughter_count(DaughterDistribution(-0.5)) == pytest.approx(3.0)

    def test_nu_range_enforced(self):
        with pytest.raises(ValueError):
            DaughterDistribution(-1.0)
        with pytest.raises(ValueError):
            DaughterDistribution(0.5)

    @pytest.mark.parametrize("nu", [0.0, -0.25, -0.5, -0.9])
    @pytest.mark.parametrize("parent", [0.37, 1.0, 12.5])
    def test_mass_conservation_closed_form_vs_quadrature(self, nu, parent):
        spec = DaughterDistribution(nu)
        closed = spec.mass_integral(0.0, parent, parent)
        assert closed == pytest.approx(parent, rel=1e-12)
        quad, _ = integrate.quad(lambda u: u * float(spec(u, parent)), 0.0, parent,
                                 epsabs=1e-13, epsrel=1e-13)
        assert quad == pytest.approx(parent, rel=1e-10)

    @pytest.mark.parametrize("nu", [0.0, -0.5, -0.9])
    def test_number_integral_matches_count(self, nu):
        spec = DaughterDistribution(nu)
        for parent in (0.2, 3.0):
            assert spec.number_integral(0.0, parent, parent) == \
                pytest.approx(spec.count(), rel=1e-12)


class TestRates:
    def test_affine_and_bounds(self):
        r = Affine(2.0, 1.0)
        assert r(3.0) == pytest.approx(7.0)
        assert r.linear_bound() == (2.0, 1.0)
        with pytest.raises(ValueError):
            Affine(-1.0, 0.0)

    def test_power_law(self):
        r = PowerLaw(2.0, 0.5)
        assert r(4.0) == pytest.approx(4.0)
        with pytest.raises(ValueError):
            PowerLaw(1.0, 1.5)

    def test_table_rate(self):
        r = TableRate(points=(0.0, 1.0, 2.0), values=(0.0, 1.0, 0.0))
        assert float(r(0.5)) == pytest.approx(0.5)
        assert float(r(5.0)) == pytest.approx(0.0)
        with pytest.raises(ValueError):
            TableRate(points=(0.0, 1.0), values=(0.0, -1.0))

    @given(u=st.floats(0.0, 1e6))
    @settings(max_examples=30, deadline=None)
    def test_power_law_linear_bound(self, u):
        r = PowerLaw(1.7, 0.3)
        p, q = r.linear_bound()
        assert r(u) <= p * u + q + 1e-12 * (1.0 + u)


class TestVerifyAssumptions:
    def test_constant_kernel_product_bound_constant(self):
        # brute-force oracle: max of 1/((1+u)(1+u1)) over the probe grid,
        # attained at the smallest probe pair
        probes = ProbeSpec(u_lo=1e-9, u_hi=1e3, n=40)
        u = probes.samples()
        oracle = float(np.max(1.0 / np.outer(1.0 + u, 1.0 + u)))
        coeffs = zero_coeffs(coag=ConstantKernel(1.0))
        report = verify_assumptions(coeffs, probes)
        assert report.satisfied("2.1")
        assert report.constant("2.1", "Upsilon0") == pytest.approx(oracle, rel=1e-12)
        assert report.constant("2.1", "Upsilon0") == pytest.approx(1.0, rel=1e-6)

    @pytest.mark.parametrize("name", ["linear_shear", "nonlinear_shear",
                                      "gravitational", "modified_smoluchowski",
                                      "activated_sludge"])
    def test_additive_bound_finite_for_shear_family(self, name):
        probes = ProbeSpec(u_lo=1.0, u_hi=100.0, n=40)
        report = verify_assumptions(zero_coeffs(coag=TABLE_KERNELS[name]), probes)
        assert report.satisfied("2.2")
        assert np.isfinite(report.constant("2.2", "Upsilon1"))

    def test_product_kernel_submultiplicative_tail(self):
        probes = ProbeSpec(u_lo=1e-3, u_hi=1e4, n=60)
        report = verify_assumptions(zero_coeffs(coag=ProductKernel(0.5)), probes)
        check = report.checks["2.3-2.4"]
        assert check.satisfied
        # fitted r(u)/u must decrease over the last probe decade
        u = probes.samples()
        r = np.sqrt(ProductKernel(0.5)(u, u))
        tail = r[u >= u[-1] / 10.0] / u[u >= u[-1] / 10.0]
        assert np.all(np.diff(tail) < 0.0)

    def test_gravitational_fails_submultiplicative(self):
        report = verify_assumptions(zero_coeffs(coag=Gravitational()),
                                    ProbeSpec(u_lo=1e-2, u_hi=1e2, n=30))
        assert not report.satisfied("2.3-2.4")

    def test_death_dominance_violation_reports_point(self):
        coeffs = zero_coeffs(growth=ConstantRate(1.0), death=ConstantRate(1.0))
        probes = ProbeSpec(u_lo=0.5, u_hi=10.0, n=16)
        report = verify_assumptions(coeffs, probes)
        check = report.checks["2.18"]
        assert not check.satisfied
        # at u = 0.5 the growth rate 1 exceeds u * mu = 0.5
        assert check.worst_point[0] == pytest.approx(0.5)

    def test_death_dominance_equality_case_passes(self):
        coeffs = zero_coeffs(growth=Affine(1.0, 0.0), death=ConstantRate(1.0))
        report = verify_assumptions(coeffs)
        assert report.satisfied("2.18")

    def test_kernel_floor_constants(self):
        report = verify_assumptions(zero_coeffs(coag=ConstantKernel(2.0)),
                                    lower_bound_thetas=(0.1, 1.0))
        assert report.satisfied("2.19")
        assert report.constant("2.19", "delta_0.1") == pytest.approx(2.0)

    def test_power_lower_bound_product_kernel(self):
        report = verify_assumptions(zero_coeffs(coag=ProductKernel(0.75)),
                                    power_lower_lambda=1.5)
        assert report.satisfied("2.21")
        assert report.constant("2.21", "Upsilon2") == pytest.approx(1.0, rel=1e-9)

    def test_power_lower_bound_fails_for_gravitational(self):
        report = verify_assumptions(zero_coeffs(coag=Gravitational()),
                                    power_lower_lambda=1.5)
        assert not report.satisfied("2.21")

    def test_lambda_range_enforced(self):
        with pytest.raises(ValueError):
            verify_assumptions(zero_coeffs(), power_lower_lambda=1.0)

    def test_probe_range_enforced(self):
        with pytest.raises(ValueError):
            ProbeSpec(u_lo=0.0, u_hi=1.0)

    def test_report_deterministic(self):
        coeffs = zero_coeffs(coag=ProductKernel(0.3), frag=FragmentationRate(1.0, 0.5),
                             growth=Affine(0.1, 0.2), death=PowerLaw(1.0, 1.0),
                             birth=ConstantRate(0.4))
        probes = ProbeSpec(u_lo=1e-6, u_hi=1e3, n=48)
        r1 = verify_assumptions(coeffs, probes, lower_bound_thetas=(0.1,),
                                power_lower_lambda=1.5)
        r2 = verify_assumptions(coeffs, probes, lower_bound_thetas=(0.1,),
                                power_lower_lambda=1.5)
        assert r1.to_json() == r2.to_json()

    def test_json_has_one_entry_per_hypothesis(self):
        import json
        report = verify_assumptions(zero_coeffs(coag=ConstantKernel(1.0)),
                                    lower_bound_thetas=(0.1,),
                                    power_lower_lambda=2.0)
        payload = json.loads(report.to_json())
        expected = {"2.1", "2.2", "2.3-2.4", "2.5", "2.6", "2.7", "2.9",
                    "2.10", "2.11", "2.18", "2.19", "2.21"}
        assert set(payload) == expected
        for entry in payload.values():
            assert {"hypothesis", "name", "satisfied", "constants"} <= set(entry)

    def test_envelope_constant_assembly(self):
        coeffs = zero_coeffs(frag=FragmentationRate(2.0, 1.0),
                             daughter=DaughterDistribution(-0.5),
                             growth=ConstantRate(1.0), birth=Affine(0.5, 0.5))
        report = verify_assumptions(coeffs)
        c = report.weighted_sup_constants()
        assert c["M"] == pytest.approx(3.0)
        # growth constant is the sampled sup of 1/(1+u), close to 1 at small probes
        assert report.envelope_growth_rate() == pytest.approx(
            c["a_sup"] + c["g_sup"] + 3.0 * c["alpha_linear"] + 1.0)


class TestAuxiliaryCertifiers:
    def test_bounded_death_detection(self):
        assert death_is_bounded(ConstantRate(2.0))
        assert not death_is_bounded(PowerLaw(1.0, 1.0))

    def test_lipschitz_growth(self):
        assert growth_lipschitz_constant(Affine(0.7, 0.1)) == pytest.approx(0.7)
        assert growth_lipschitz_constant(ConstantRate(3.0)) == 0.0
        assert growth_lipschitz_constant(PowerLaw(1.0, 0.5)) is None
        assert growth_lipschitz_constant(PowerLaw(2.0, 1.0)) == pytest.approx(2.0)
