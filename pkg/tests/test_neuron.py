import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from retinasim.errors import DomainError
from retinasim.neuron import (
    ACTIVITY_EPS,
    ActivationParams,
    InhibitionParams,
    TuningParams,
    activate,
    compete,
    inhibition_step,
    occurrence_probability,
    tuning_response,
)

# e^-1 and friends to 16 digits, from published tables
E_M1 = 0.36787944117144233
E_M2 = 0.1353352832366127
E_M3 = 0.049787068367863944

potential = st.floats(min_value=0.0, max_value=50.0, allow_nan=False)


class TestParams:
    @pytest.mark.parametrize("kwargs", [{"ceiling": 0}, {"gain": -1.0}])
    def test_activation_params_reject_nonpositive(self, kwargs):
        with pytest.raises(DomainError):
            ActivationParams(**kwargs)

    @pytest.mark.parametrize("kwargs", [{"peak": 0}, {"decay": 0}, {"reach": -0.1}])
    def test_tuning_params_reject_nonpositive(self, kwargs):
        with pytest.raises(DomainError):
            TuningParams(**kwargs)

    def test_inhibition_params_validate(self):
        with pytest.raises(DomainError):
            InhibitionParams(rate_ceiling=0)
        with pytest.raises(DomainError):
            InhibitionParams(mode="medium")
        with pytest.raises(DomainError):
            InhibitionParams(mode="soft", soft_duration=0)
        # soft_duration is irrelevant in hard mode
        InhibitionParams(mode="hard", soft_duration=0)


class TestActivate:
    def test_no_inputs_gives_zero(self):
        assert activate(ActivationParams(), []) == 0.0

    def test_unit_input(self):
        assert activate(ActivationParams(1, 1), [(1, 1)]) == pytest.approx(1 - E_M1, abs=1e-15)
        assert activate(ActivationParams(1, 1), [(1, 1)]) == pytest.approx(0.632121, abs=1e-6)

    def test_saturates_below_ceiling(self):
        p = ActivationParams(ceiling=2.0, gain=0.5)
        values = [activate(p, [(1.0, s)]) for s in (1, 10, 30, 60)]
        assert all(v < 2.0 for v in values)
        assert np.all(np.diff(values) > 0)
        assert values[-1] == pytest.approx(2.0, abs=1e-12)

    def test_negative_input_rejected(self):
        with pytest.raises(DomainError):
            activate(ActivationParams(), [(-0.1, 1.0)])
        with pytest.raises(DomainError):
            activate(ActivationParams(), [(0.1, -1.0)])

    @given(st.lists(st.tuples(potential, potential), max_size=6), potential)
    def test_monotone_in_each_input(self, inputs, extra):
        p = ActivationParams(ceiling=1.5, gain=0.3)
        base = activate(p, inputs)
        assert 0.0 <= base < p.ceiling or base == pytest.approx(p.ceiling)
        assert activate(p, inputs + [(1.0, extra)]) >= base


class TestTuning:
    def test_zero_distance_is_peak(self):
        assert tuning_response(TuningParams(peak=1.0, decay=7.0), 0.0) == 1.0

    def test_unit_distance(self):
        assert tuning_response(TuningParams(1.0, 1.0, 2.0), 1.0) == pytest.approx(E_M1, rel=1e-15)

    def test_beyond_reach_is_silent(self):
        assert tuning_response(TuningParams(1.0, 1.0, 2.0), 3.0) == 0.0

    def test_at_reach_still_responds(self):
        assert tuning_response(TuningParams(1.0, 1.0, 2.0), 2.0) == pytest.approx(E_M2)

    def test_negative_distance_rejected(self):
        with pytest.raises(DomainError):
            tuning_response(TuningParams(), -1e-9)

    def test_strictly_decreasing_inside_reach(self):
        p = TuningParams(peak=2.0, decay=0.7, reach=3.0)
        values = [tuning_response(p, d) for d in np.linspace(0, 3.0, 50)]
        assert np.all(np.diff(values) < 0)


class TestInhibitionStep:
    def test_isolated_cell_untouched(self):
        out = inhibition_step([3.0, 0.0, 0.0], InhibitionParams(), 0.1)
        np.testing.assert_array_equal(out, [3.0, 0.0, 0.0])

    def test_equal_cells_lose_the_same(self):
        out = inhibition_step([1.0, 1.0], InhibitionParams(), 0.1)
        assert out[0] == out[1] < 1.0

    def test_hand_computed_step(self):
        out = inhibition_step([2.0, 1.0, 1.0], InhibitionParams(1.0, 1.0), 0.1)
        expected = [2.0 - 0.1 * (1 - E_M2), 1.0 - 0.1 * (1 - E_M3), 1.0 - 0.1 * (1 - E_M3)]
        np.testing.assert_allclose(out, expected, rtol=0, atol=1e-15)

    def test_floored_at_zero(self):
        out = inhibition_step([5.0, 0.01], InhibitionParams(rate_ceiling=10.0), 0.1)
        assert out[1] == 0.0

    def test_rejects_bad_dt_and_negatives(self):
        with pytest.raises(DomainError):
            inhibition_step([1.0], InhibitionParams(), 0.0)
        with pytest.raises(DomainError):
            inhibition_step([1.0, -0.5], InhibitionParams(), 0.1)

    @given(potential, potential)
    def test_two_cells_keep_their_order(self, a, b):
        out = inhibition_step([a, b], InhibitionParams(), 0.05)
        if a > b:
            assert out[0] >= out[1]
        elif b > a:
            assert out[1] >= out[0]
        else:
            assert out[0] == out[1]


class TestCompete:
    hard = InhibitionParams(mode="hard")

    def test_dominant_cell_wins(self):
        winner, v, steps = compete([5.0, 0.1, 0.1], self.hard, 0.1)
        assert winner == 0
        assert np.count_nonzero(v > ACTIVITY_EPS) == 1
        assert steps > 0

    def test_tie_goes_to_lowest_index(self):
        winner, _, _ = compete([1.0, 1.0], self.hard, 0.1)
        assert winner == 0
        winner, _, _ = compete([0.0, 2.0, 2.0, 2.0], self.hard, 0.1)
        assert winner == 1

    def test_soft_mode_leaves_survivors(self):
        p = InhibitionParams(mode="soft", soft_duration=0.2)
        winner, v, steps = compete([1.0, 0.9], p, 0.1)
        assert steps == 2
        assert np.all(v > ACTIVITY_EPS)
        assert winner == 0

    def test_all_zero_has_no_winner(self):
        winner, v, steps = compete([0.0, 0.0, 0.0], self.hard, 0.1)
        assert winner is None and steps == 0

    def test_mode_override(self):
        p = InhibitionParams(mode="soft", soft_duration=0.1)
        _, v, _ = compete([1.0, 0.9], p, 0.1, mode="hard")
        assert np.count_nonzero(v > ACTIVITY_EPS) == 1

    def test_max_steps_caps_the_run(self):
        _, _, steps = compete([1.0, 0.999], self.hard, 0.001, max_steps=5)
        assert steps == 5

    @settings(max_examples=200)
    @given(st.floats(0.01, 10.0), st.floats(0.01, 10.0))
    def test_hard_winner_of_two_is_the_larger(self, a, b):
        winner, _, _ = compete([a, b], self.hard, 0.1)
        assert winner == (0 if a >= b else 1)

    @given(st.lists(st.floats(0.0, 5.0), min_size=2, max_size=6))
    def test_total_activity_decreases_while_contested(self, values):
        v = np.array(values)
        p = InhibitionParams()
        for _ in range(20):
            if np.count_nonzero(v > ACTIVITY_EPS) < 2:
                break
            nxt = inhibition_step(v, p, 0.1)
            assert nxt.sum() < v.sum()
            v = nxt


class TestOccurrenceProbability:
    def test_all_silent_is_impossible(self):
        assert occurrence_probability(3.0, [0.0, 0.0]) == 0.0

    def test_single_attribute(self):
        assert occurrence_probability(1.0, [0.7]) == pytest.approx(1 - math.exp(-0.7), rel=1e-15)

    def test_three_attributes(self):
        # product of the three misses, against 1 - e^-3 from the sum
        assert occurrence_probability(0.5, [1.0, 2.0, 3.0]) == pytest.approx(1 - E_M3, rel=1e-14)
        assert occurrence_probability(0.5, [1.0, 2.0, 3.0]) == pytest.approx(0.950213, abs=1e-6)

    def test_negative_rejected(self):
        with pytest.raises(DomainError):
            occurrence_probability(1.0, [0.1, -0.1])

    def test_matches_unit_activation(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            v = rng.uniform(0, 2, size=4)
            w = rng.uniform(0, 2, size=4)
            p = ActivationParams(ceiling=1.0, gain=0.8)
            assert activate(p, zip(w, v)) == pytest.approx(occurrence_probability(0.8, w * v), abs=1e-12)
