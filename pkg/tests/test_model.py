import numpy as np
import pytest

from oracles import pairwise_spread
from stockblend.model import (
    Bounds,
    ContractError,
    Instance,
    Material,
    ParcelOutcome,
    Solution,
    StockpileState,
    claim_from_stockpiles,
    max_cu_grade_spread,
    mix_parcel_grades,
    update_stockpile_month_start,
)
from stockblend.process import ProcessParams


def state(tonnage, cu):
    g = np.zeros((len(cu), 7))
    g[:, Material.Cu] = cu
    return StockpileState(np.array(tonnage, dtype=float), g)


class TestMaterial:
    def test_order(self):
        assert [m.name for m in Material] == ["Cu", "Ag", "Fe", "Au", "U", "F", "S"]


class TestMixing:
    def test_midpoint(self):
        g = mix_parcel_grades(state([1, 1], [0.01, 0.03]), [0.5, 0.5])
        assert g[Material.Cu] == pytest.approx(0.02, abs=1e-15)

    def test_single_stockpile(self):
        assert mix_parcel_grades(state([1], [0.027]), [1.0])[Material.Cu] == 0.027

    def test_three_way(self):
        g = mix_parcel_grades(state([1, 1, 1], [0.01, 0.02, 0.04]), [0.25, 0.25, 0.5])
        assert g[Material.Cu] == pytest.approx(0.25 * 0.01 + 0.25 * 0.02 + 0.5 * 0.04, abs=1e-15)
        assert g[Material.Cu] == pytest.approx(0.0275, abs=1e-15)

    def test_access_subset(self):
        s = state([1, 1, 1], [0.01, 0.02, 0.04])
        assert mix_parcel_grades(s, [0.5, 0.5], access=(0, 2))[Material.Cu] == pytest.approx(0.025)

    @pytest.mark.parametrize("x", [[0.5, 0.6], [1.2, -0.2], [0.0, 0.0]])
    def test_rejects_unnormalized(self, x):
        with pytest.raises(ContractError):
            mix_parcel_grades(state([1, 1], [0.01, 0.03]), x)

    def test_rejects_length_mismatch(self):
        with pytest.raises(ContractError):
            mix_parcel_grades(state([1, 1], [0.01, 0.03]), [1.0])


class TestMonthStart:
    def test_equal_mass_average(self):
        out = update_stockpile_month_start(state([100], [0.02]), [100], np.array([[0.04, 0, 0, 0, 0, 0, 0]]))
        assert out.tonnage[0] == 200
        assert out.grades[0, Material.Cu] == pytest.approx(0.03, abs=1e-15)

    def test_no_haul_is_identity(self):
        s = state([100, 50], [0.02, 0.01])
        assert update_stockpile_month_start(s, [0, 0], np.ones((2, 7)) * 0.5) == s

    def test_weighted_average(self):
        out = update_stockpile_month_start(state([300], [0.01]), [100], np.array([[0.05] + [0] * 6]))
        assert out.grades[0, Material.Cu] == pytest.approx((0.01 * 300 + 0.05 * 100) / 400, abs=1e-15)
        assert out.grades[0, Material.Cu] == pytest.approx(0.02, abs=1e-15)

    def test_nonpositive_total_keeps_grades(self):
        s = state([-50.0], [0.02])
        out = update_stockpile_month_start(s, [30.0], np.array([[0.04] + [0] * 6]))
        assert out.tonnage[0] == -20.0
        assert out.grades[0, Material.Cu] == 0.02

    def test_rejects_negative_haul(self):
        with pytest.raises(ContractError):
            update_stockpile_month_start(state([1], [0.02]), [-1.0], np.zeros((1, 7)))


class TestClaim:
    def test_subtraction(self):
        out = claim_from_stockpiles(state([100, 50], [0.02, 0.01]), [0.5, 0.5], 60.0)
        np.testing.assert_array_equal(out.tonnage, [70, 20])

    def test_zero_volume(self):
        s = state([100, 50], [0.02, 0.01])
        assert claim_from_stockpiles(s, [0.5, 0.5], 0.0) == s

    def test_overdraw_allowed(self):
        out = claim_from_stockpiles(state([10, 10], [0.02, 0.01]), [1.0, 0.0], 25.0)
        np.testing.assert_array_equal(out.tonnage, [-15, 10])

    def test_grades_untouched(self):
        s = state([10, 10], [0.02, 0.01])
        out = claim_from_stockpiles(s, [0.3, 0.7], 5.0)
        np.testing.assert_array_equal(out.grades, s.grades)

    def test_access_subset(self):
        out = claim_from_stockpiles(state([10, 10, 10], [0, 0, 0]), [1.0], 4.0, access=(1,))
        np.testing.assert_array_equal(out.tonnage, [10, 6, 10])


class TestSpread:
    def test_single(self):
        assert max_cu_grade_spread([0.02]) == 0.0

    def test_three(self):
        assert max_cu_grade_spread([0.020, 0.025, 0.022]) == pytest.approx(0.005, abs=1e-15)

    def test_pairwise_oracle(self):
        values = np.random.default_rng(9).uniform(0.01, 0.04, 100).tolist()
        assert max_cu_grade_spread(values) == pairwise_spread(values)

    def test_nested_outcomes(self):
        def outcome(cu):
            g = np.zeros(7)
            g[0] = cu
            return ParcelOutcome(g, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)

        assert max_cu_grade_spread([[outcome(0.01)], [outcome(0.03), outcome(0.02)]]) == pytest.approx(0.02)

    def test_empty(self):
        with pytest.raises(ContractError):
            max_cu_grade_spread([])


class TestStateAndInstance:
    def test_state_shape_checked(self):
        with pytest.raises(ContractError):
            StockpileState(np.ones(2), np.ones((3, 7)))

    def test_instance_is_read_only(self, table_instance):
        with pytest.raises(ValueError):
            table_instance.haul_tonnage[0, 0] = 1.0

    def test_counts(self, two_month_instance):
        assert two_month_instance.months == 2
        assert two_month_instance.parcels_per_month == [2, 2]
        assert two_month_instance.total_parcels == 4
        assert two_month_instance.n_stockpiles == 4

    def test_validation(self):
        with pytest.raises(ContractError):
            Instance(
                available_duration=np.array([720.0]),
                haul_tonnage=np.zeros((1, 1)),
                haul_grades=np.zeros((1, 1, 7)),
                initial_state=StockpileState(np.array([-1.0]), np.zeros((1, 7))),
                target_concentrate=(np.array([10.0]),),
                access=(((0,),),),
                bounds=Bounds(0.0, 1.0, 1.0, 1.0),
                process=ProcessParams(),
            )

    def test_solution_copy_is_deep(self):
        sol = Solution([[np.array([0.5, 0.5])]], [np.array([10.0])])
        dup = sol.copy()
        dup.fractions[0][0][0] = 0.9
        assert sol != dup
        assert sol.months == 1
