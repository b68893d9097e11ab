import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import scalar_outcome
from stockblend.process import (
    ProcessParams,
    concentrate_f3,
    concentrate_grade,
    concentrate_rate,
    copper_tonnes_f1,
    cu_recovery,
    f_recovery_f4,
    parcel_volume_f2,
    throughput,
    u_recovery_f5,
)


def grades(cu=0.0, fe=0.0, au=0.0, u=0.0, f=0.0):
    g = np.zeros(7)
    g[[0, 2, 3, 4, 5]] = [cu, fe, au, u, f]
    return g


ZERO_FACTORS = ProcessParams(phi_cu=0.0, phi_fe=0.0)


class TestThroughput:
    def test_no_chemical_factors_gives_base_rate(self):
        assert throughput(grades(cu=0.03, fe=0.2), ZERO_FACTORS) == 100.0

    def test_copper_factor(self):
        p = ProcessParams(phi_fe=0.0)
        assert throughput(grades(cu=0.02), p) == pytest.approx(110.0, abs=1e-12)

    def test_floor_on_negative_factors(self):
        p = ProcessParams(phi_cu=-100.0)
        assert throughput(grades(cu=0.04), p) == pytest.approx(10.0)


class TestVolume:
    def test_zero_duration(self):
        assert parcel_volume_f2(0.0, grades(cu=0.02), ProcessParams()) == 0.0

    def test_linear_in_duration(self):
        assert parcel_volume_f2(10.0, grades(), ZERO_FACTORS) == 1000.0

    def test_doubling_duration_doubles_volume(self):
        g = grades(cu=0.027, fe=0.11)
        p = ProcessParams()
        assert parcel_volume_f2(2 * 13.7, g, p) == 2 * parcel_volume_f2(13.7, g, p)


class TestRecoveries:
    def test_constant_cu_recovery(self):
        p = ProcessParams(mu_cu1=0.8, mu_cu2=0.0)
        assert cu_recovery(0.0, p) == cu_recovery(0.037, p) == 0.8

    def test_affine_cu_recovery(self):
        assert cu_recovery(0.02, ProcessParams()) == pytest.approx(0.8, abs=1e-12)

    def test_cu_recovery_clamped(self):
        assert cu_recovery(0.01, ProcessParams(mu_cu1=1.5)) == 1.0

    def test_zero_grade_zero_recovery(self):
        p = ProcessParams()
        assert f_recovery_f4(0.0, p) == 0.0
        assert u_recovery_f5(0.0, p) == 0.0

    def test_f_recovery(self):
        assert f_recovery_f4(0.01, ProcessParams()) == pytest.approx(0.2, abs=1e-12)

    def test_u_recovery_clamped(self):
        assert u_recovery_f5(0.01, ProcessParams(mu_u=200.0)) == 1.0


class TestConcentrate:
    def test_zero_duration(self):
        assert concentrate_f3(0.0, grades(cu=0.02), ProcessParams()) == 0.0

    def test_worked_value(self):
        # rho = 100, g = 0.02, r = 0.8, gamma = 0.25, t = 50
        p = ProcessParams(phi_cu=0.0, phi_fe=0.0)
        assert concentrate_f3(50.0, grades(cu=0.02), p) == pytest.approx(320.0, rel=1e-12)

    def test_homogeneous_in_duration(self):
        g, p = grades(cu=0.031, fe=0.2), ProcessParams()
        assert concentrate_f3(2 * 41.3, g, p) == pytest.approx(2 * concentrate_f3(41.3, g, p), rel=1e-15)

    def test_rate_matches(self):
        g, p = grades(cu=0.018, fe=0.07), ProcessParams()
        assert concentrate_f3(7.5, g, p) == pytest.approx(7.5 * concentrate_rate(g, p), rel=1e-14)

    def test_gamma_floor(self):
        assert concentrate_grade(0.02, ProcessParams(gamma1=0.01)) == 0.05


class TestCopper:
    def test_undiscounted_first_month(self):
        g, p = grades(cu=0.02), ProcessParams(discount=1.0)
        w = parcel_volume_f2(10.0, g, p)
        assert copper_tonnes_f1(10.0, g, 4, p) == pytest.approx(w * 0.02 * 0.8, rel=1e-12)

    def test_one_discount_step(self):
        # undiscounted 100 t of copper, month 2 at 0.95
        p = ProcessParams(discount=0.95, phi_cu=0.0, phi_fe=0.0, mu_cu1=1.0, mu_cu2=0.0)
        g = grades(cu=0.02)
        t = 100.0 / (100.0 * 0.02)
        assert copper_tonnes_f1(t, g, 2, p) == pytest.approx(95.0, rel=1e-12)

    def test_copper_is_concentrate_times_grade(self):
        g, p = grades(cu=0.026, fe=0.1), ProcessParams(discount=1.0, gamma2=3.0)
        k = concentrate_f3(12.0, g, p)
        assert copper_tonnes_f1(12.0, g, 1, p) == pytest.approx(k * concentrate_grade(0.026, p), rel=1e-13)

    def test_month_is_one_based(self):
        with pytest.raises(ValueError):
            copper_tonnes_f1(1.0, grades(cu=0.02), 0, ProcessParams())

    @settings(max_examples=200, deadline=None)
    @given(
        t=st.floats(0, 1000),
        cu=st.floats(0, 0.1),
        fe=st.floats(0, 0.5),
        f=st.floats(0, 0.1),
        u=st.floats(0, 0.1),
        m=st.integers(1, 12),
    )
    def test_matches_scalar_oracle(self, t, cu, fe, f, u, m):
        g, p = grades(cu=cu, fe=fe, f=f, u=u), ProcessParams(gamma2=2.0)
        w, k, c, r_cu, r_f, r_u = scalar_outcome(t, g, p)
        assert parcel_volume_f2(t, g, p) == pytest.approx(w, rel=1e-12, abs=1e-12)
        assert concentrate_f3(t, g, p) == pytest.approx(k, rel=1e-12, abs=1e-12)
        assert copper_tonnes_f1(t, g, m, p) == pytest.approx(c * 0.98 ** (m - 1), rel=1e-12, abs=1e-12)
        assert (cu_recovery(cu, p), f_recovery_f4(f, p), u_recovery_f5(u, p)) == pytest.approx((r_cu, r_f, r_u))

    def test_copper_never_exceeds_feed(self):
        rng = np.random.default_rng(3)
        p = ProcessParams()
        for _ in range(500):
            g = grades(cu=rng.uniform(0, 0.05), fe=rng.uniform(0, 0.3))
            t = rng.uniform(0, 720)
            k = concentrate_f3(t, g, p)
            assert k * concentrate_grade(g[0], p) <= parcel_volume_f2(t, g, p) + 1e-9


class TestParams:
    def test_defaults(self):
        p = ProcessParams()
        assert (p.discount, p.base_throughput, p.phi_cu, p.phi_fe, p.phi_au, p.phi_u) == (
            0.98, 100.0, 5.0, 0.5, 0.0, 0.0,
        )
        assert (p.gamma1, p.gamma2, p.mu_cu1, p.mu_cu2, p.mu_fl, p.mu_u) == (0.25, 0.0, 0.7, 5.0, 20.0, 20.0)

    @pytest.mark.parametrize(
        "kwargs", [{"discount": 0.0}, {"discount": 1.5}, {"base_throughput": 0.0}, {"gamma1": 0.0}]
    )
    def test_rejects_out_of_range(self, kwargs):
        with pytest.raises(ValueError):
            ProcessParams(**kwargs)

    def test_dict_round_trip(self):
        p = ProcessParams(gamma2=1.5, discount=0.9)
        assert ProcessParams.from_dict(p.to_dict()) == p

    def test_unknown_key(self):
        with pytest.raises(ValueError, match="unknown"):
            ProcessParams.from_dict({"phi_zn": 1.0})
