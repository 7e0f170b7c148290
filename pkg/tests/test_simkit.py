import math

import numpy as np
import pytest

from puritylab.core import BlochVector, sample_directions
from puritylab.simkit import (
    CountPair,
    measure_axis,
    measure_batch,
    split_shots,
    stream,
    tomography_counts,
)

Z = (0.0, 0.0, 1.0)


class TestMeasureAxis:
    def test_pure_state_along_axis(self):
        rng = stream(1, 0)
        for k in (0, 1, 5, 1000, 10**7):
            c = measure_axis(BlochVector(0, 0, 1), Z, k, rng)
            assert c == CountPair(k, 0)

    def test_maximally_mixed(self):
        n = 10**6
        c = measure_axis(BlochVector(0, 0, 0), (0.6, 0.0, 0.8), n, stream(2, 0))
        assert abs(c.frequency - 0.5) <= 3 * math.sqrt(0.25 / n)
        assert c.shots == n

    def test_partially_mixed(self):
        n = 10**6
        c = measure_axis(BlochVector(0, 0, 0.6), Z, n, stream(3, 0))
        assert abs(c.frequency - 0.8) <= 3 * math.sqrt(0.8 * 0.2 / n)

    @pytest.mark.parametrize("axis", [(0, 0, 2.0), (1, 1, 0), (0, 0, 0)])
    def test_non_unit_axis_rejected(self, axis):
        with pytest.raises(ValueError):
            measure_axis(BlochVector(0, 0, 0.5), axis, 10, stream(0, 0))

    def test_negative_shots_rejected(self):
        with pytest.raises(ValueError):
            measure_axis(BlochVector(0, 0, 0.5), Z, -1, stream(0, 0))

    def test_projection_law(self):
        # 2 plus/shots - 1 estimates r.m without bias.
        rng = np.random.default_rng(10)
        reps, shots = 10**4, 10**3
        for state in rng.uniform(-0.55, 0.55, size=(5, 3)):
            for axis in np.eye(3):
                plus = measure_batch(np.tile(state, (reps, 1)), axis, shots, stream(11, 0))
                est = 2.0 * plus / shots - 1.0
                assert abs(est.mean() - state @ axis) <= 4 * est.std(ddof=1) / math.sqrt(reps)


class TestTomography:
    def test_split(self):
        assert split_shots(9) == (3, 3, 3)
        assert split_shots(10) == (4, 3, 3)
        assert split_shots(11) == (4, 4, 3)
        with pytest.raises(ValueError):
            split_shots(2)

    def test_budgets_respected(self):
        c = tomography_counts(BlochVector(0.1, 0.2, 0.3), 10, stream(4, 0))
        assert [p.shots for p in c] == [4, 3, 3]

    def test_pure_z_state(self):
        n0 = 3 * 10**4
        c = tomography_counts(BlochVector(0, 0, 1), n0, stream(5, 0))
        assert c.z.frequency == 1.0
        for pair in (c.x, c.y):
            assert abs(pair.frequency - 0.5) <= 3 * math.sqrt(0.25 / pair.shots)


class TestStreams:
    def test_same_seed_same_counts(self):
        bloch = 0.7 * sample_directions(np.random.default_rng(0), 50)
        a = measure_batch(bloch, Z, 12345, stream(99, 3))
        b = measure_batch(bloch, Z, 12345, stream(99, 3))
        np.testing.assert_array_equal(a, b)

    def test_streams_differ_by_index_and_seed(self):
        x = stream(7, 0).integers(0, 2**63, 4)
        assert not np.array_equal(x, stream(7, 1).integers(0, 2**63, 4))
        assert not np.array_equal(x, stream(8, 0).integers(0, 2**63, 4))

    def test_stream_independent_of_consumption_elsewhere(self):
        ref = stream(5, 2).random(3)
        s1 = stream(5, 1)
        s1.random(1000)
        np.testing.assert_array_equal(stream(5, 2).random(3), ref)

    def test_small_and_large_shot_counts_exact(self):
        # Exact sampler on both sides of the inversion cut-off: binomial mean
        # and variance checked at 64 and 10^6 shots.
        bloch = np.tile([0.0, 0.0, 0.3], (200_000, 1))
        for n in (64, 10**6):
            k = measure_batch(bloch, Z, n, stream(12, n))
            p = 0.65
            assert abs(k.mean() - n * p) <= 4 * math.sqrt(n * p * (1 - p) / len(k))
            assert k.var() == pytest.approx(n * p * (1 - p), rel=0.02)
