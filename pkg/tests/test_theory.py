import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from retinasim.errors import DomainError
from retinasim.theory import (
    ReceptiveFieldParams,
    frequency_sigma,
    receptive_field_optimum,
    receptive_field_value,
    saturation_gap,
)


class TestFrequencySigma:
    def test_single_dendrite_single_input(self):
        assert frequency_sigma(1, 1, 1.0, 1.0, 1.0) == pytest.approx(1 - math.exp(-1), rel=1e-15)
        assert frequency_sigma(1, 1, 1.0, 1.0, 1.0) == pytest.approx(0.632121, abs=1e-6)

    def test_sweep_peaks_at_matching_count(self):
        sigmas = [frequency_sigma(m, 5, 1.0, 1.0, 1.0) for m in range(1, 21)]
        assert int(np.argmax(sigmas)) + 1 == 5

    def test_silent_inputs(self):
        assert all(frequency_sigma(m, 4, 1.0, 2.0, 0.0) == 0.0 for m in range(1, 10))

    def test_invalid_counts(self):
        with pytest.raises(DomainError):
            frequency_sigma(0, 3, 1.0, 1.0, 1.0)

    @given(st.integers(1, 30), st.floats(0.05, 5.0), st.floats(0.05, 5.0), st.floats(0.05, 2.0))
    def test_argmax_is_n(self, n, budget, gain, v):
        sigmas = [frequency_sigma(m, n, budget, gain, v) for m in range(1, 61)]
        assert int(np.argmax(sigmas)) + 1 == n


class TestSaturationGap:
    @given(st.floats(1e-3, 30.0), st.integers(1, 40), st.integers(0, 40))
    def test_nonnegative_and_tight_only_at_equality(self, x, m, extra):
        n = m + extra
        gap = float(saturation_gap(x, m, n))
        assert gap >= -1e-12
        if n == m:
            assert abs(gap) <= 1e-12
        else:
            # direct evaluation without expm1 as an independent check
            direct = (n / m) * (1 - math.exp(-x)) - (1 - math.exp(-n * x / m))
            assert gap == pytest.approx(direct, abs=1e-12)

    def test_strict_for_moderate_arguments(self):
        assert saturation_gap(1.0, 2, 3) > 0.05


class TestReceptiveField:
    def test_concentric_regime(self):
        p = ReceptiveFieldParams(gain=0.01, crowding=1.0, floor=0.01)
        assert receptive_field_optimum(p, 50) == 1

    def test_background_regime(self):
        p = ReceptiveFieldParams(gain=10.0, crowding=0.001, floor=1.0)
        assert receptive_field_optimum(p, 50) >= 45
        assert receptive_field_optimum(p, 200) > receptive_field_optimum(p, 50)

    def test_balanced_matches_continuous_optimum(self):
        # g is not unimodal here, so compare with a dense sweep rather than a local solver
        p = ReceptiveFieldParams(gain=1.0, crowding=1.0, floor=0.1)
        n0 = receptive_field_optimum(p, 50)
        fine = np.linspace(1.0, 50.0, 490_001)
        best = fine[int(np.argmax(receptive_field_value(fine, p)))]
        assert n0 in (math.floor(best), math.ceil(best))
        integers = receptive_field_value(np.arange(1, 51), p)
        assert integers[n0 - 1] == integers.max()

    def test_ties_prefer_smaller_n(self):
        # with a vanishing gain g(n) is the same for every n
        p = ReceptiveFieldParams(gain=1e-300, crowding=0.0, floor=1.0)
        values = receptive_field_value(np.arange(1, 6), p)
        assert np.all(values == values[0])
        assert receptive_field_optimum(p, 5) == 1

    def test_invalid(self):
        with pytest.raises(DomainError):
            receptive_field_optimum(ReceptiveFieldParams(), 0)
        with pytest.raises(DomainError):
            ReceptiveFieldParams(gain=0.0)
