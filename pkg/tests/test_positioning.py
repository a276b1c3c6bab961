import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial import distance as scipy_distance

from proxyfaug.datasets import EmptyDatasetError, Fingerprint, PowedConfig, SchemaError
from proxyfaug.positioning import (
    bray_curtis,
    dissimilarities,
    fit,
    neighbor_indices,
    predict,
    predict_batch,
)

from helpers import make_dataset
from oracles import knn_bruteforce

CFG = PowedConfig(beta=2.6, min_value=-157.0)


class TestBrayCurtis:
    def test_identity(self):
        assert bray_curtis([1.0, 2.0], [1.0, 2.0]) == 0.0

    def test_disjoint_support(self):
        assert bray_curtis([1.0, 0.0], [0.0, 1.0]) == 1.0

    def test_hand_example(self):
        assert bray_curtis([1.0, 2.0, 3.0], [2.0, 2.0, 4.0]) == pytest.approx(2.0 / 14.0, abs=1e-15)

    def test_matches_reference_implementation(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            u = rng.uniform(0.0, 1.0, 12)
            v = rng.uniform(0.0, 1.0, 12)
            assert bray_curtis(u, v) == pytest.approx(scipy_distance.braycurtis(u, v), rel=1e-12)

    def test_zero_denominator(self):
        assert bray_curtis([0.0, 0.0], [0.0, 0.0]) == 0.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            bray_curtis([1.0], [1.0, 2.0])

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=1, max_size=20),
           st.data())
    def test_symmetric_and_bounded(self, u, data):
        v = data.draw(st.lists(st.floats(min_value=0.0, max_value=1.0),
                               min_size=len(u), max_size=len(u)))
        d = bray_curtis(u, v)
        assert 0.0 <= d <= 1.0
        assert d == bray_curtis(v, u)


def grid_training_set(m=10, b=4, seed=0):
    rng = np.random.default_rng(seed)
    rssi = rng.uniform(-150.0, -70.0, (m, b))
    lats = 51.2 + 0.0001 * np.arange(m)
    lons = 4.4 + 0.0001 * np.arange(m)
    return make_dataset(rssi, lats, lons, floor=-157.0)


class TestFit:
    def test_valid_model(self):
        model = fit(grid_training_set(10), 6, CFG)
        assert model.k == 6
        assert model.size == 10
        assert np.all(model.train_matrix >= 0.0) and np.all(model.train_matrix <= 1.0)

    def test_k_zero_rejected(self):
        with pytest.raises(ValueError):
            fit(grid_training_set(10), 0, CFG)

    def test_k_beyond_training_size_rejected(self):
        with pytest.raises(ValueError):
            fit(grid_training_set(5), 6, CFG)

    def test_all_floor_rows_become_zero(self):
        ds = make_dataset([[-157.0, -157.0]], [51.2], [4.4], floor=-157.0)
        model = fit(ds, 1, CFG)
        assert np.array_equal(model.train_matrix, [[0.0, 0.0]])

    def test_below_floor_values_counted(self):
        ds = make_dataset([[-180.0, -100.0]], [51.2], [4.4])
        model = fit(ds, 1, CFG)
        assert model.n_clamped == 1
        assert model.train_matrix[0, 0] == 0.0

    def test_model_is_immutable(self):
        model = fit(grid_training_set(4), 1, CFG)
        with pytest.raises(ValueError):
            model.train_matrix[0, 0] = 0.5


class TestPredict:
    def test_training_row_maps_to_its_location(self):
        ds = grid_training_set(20, seed=3)
        model = fit(ds, 1, CFG)
        for i in (0, 7, 19):
            estimate = predict(model, ds[i])
            assert estimate.lat == float(ds.lats[i])
            assert estimate.lon == float(ds.lons[i])

    def test_two_equidistant_neighbors_average(self):
        cfg = PowedConfig(beta=2.6, min_value=-100.0)
        ds = make_dataset(
            [[0.0, -100.0], [-100.0, 0.0]],
            [0.0, 0.0],
            [0.0, 2.0],
            floor=-100.0,
        )
        model = fit(ds, 2, cfg)
        query = Fingerprint(np.array([-50.0, -50.0]), 0.0, 0.0)
        estimate = predict(model, query)
        assert estimate.lat == pytest.approx(0.0, abs=1e-12)
        assert estimate.lon == pytest.approx(1.0, abs=1e-12)

    def test_matches_bruteforce_oracle(self):
        rng = np.random.default_rng(4)
        ds = grid_training_set(50, b=6, seed=4)
        model = fit(ds, 5, CFG)
        for _ in range(50):
            query = rng.uniform(-150.0, -70.0, 6)
            expected = knn_bruteforce(ds.rssi.tolist(), query.tolist(), -157.0, 2.6, 5)
            assert neighbor_indices(model, query).tolist() == expected

    def test_tie_break_prefers_lower_index(self):
        row = [-100.0, -90.0, -120.0]
        ds = make_dataset([row, [-80.0, -85.0, -95.0], row], [51.2, 51.3, 51.4], [4.4, 4.5, 4.6],
                          floor=-157.0)
        model = fit(ds, 2, CFG)
        query = Fingerprint(np.array(row), 0.0, 0.0)
        assert neighbor_indices(model, query.rssi).tolist() == [0, 2]

    def test_storage_order_invariance(self):
        rng = np.random.default_rng(5)
        ds = grid_training_set(30, b=5, seed=5)
        query = Fingerprint(rng.uniform(-150.0, -70.0, 5), 0.0, 0.0)
        model = fit(ds, 4, CFG)
        baseline = predict(model, query)

        perm = rng.permutation(30)
        shuffled = make_dataset(ds.rssi[perm], ds.lats[perm], ds.lons[perm], floor=-157.0)
        estimate = predict(fit(shuffled, 4, CFG), query)
        assert estimate.lat == pytest.approx(baseline.lat, abs=1e-12)
        assert estimate.lon == pytest.approx(baseline.lon, abs=1e-12)

    def test_schema_mismatch(self):
        model = fit(grid_training_set(5, b=4), 1, CFG)
        with pytest.raises(SchemaError):
            predict(model, Fingerprint(np.zeros(3) - 100.0, 0.0, 0.0))


class TestPredictBatch:
    def test_singleton(self):
        ds = grid_training_set(10, seed=6)
        model = fit(ds, 3, CFG)
        queries = make_dataset(ds.rssi[:1], ds.lats[:1], ds.lons[:1], floor=-157.0)
        assert predict_batch(model, queries) == [predict(model, queries[0])]

    def test_parallel_matches_sequential(self):
        rng = np.random.default_rng(7)
        ds = grid_training_set(40, b=5, seed=7)
        model = fit(ds, 4, CFG)
        queries = make_dataset(
            rng.uniform(-150.0, -70.0, (500, 5)),
            np.full(500, 51.2),
            np.full(500, 4.4),
            floor=-157.0,
        )
        assert predict_batch(model, queries, threads=4) == predict_batch(model, queries, threads=1)

    def test_empty_batch(self):
        ds = grid_training_set(5)
        model = fit(ds, 1, CFG)
        empty = make_dataset(np.empty((0, 4)), np.empty(0), np.empty(0))
        with pytest.raises(EmptyDatasetError):
            predict_batch(model, empty)

    def test_batch_schema_mismatch(self):
        model = fit(grid_training_set(5, b=4), 1, CFG)
        queries = make_dataset([[-100.0, -90.0]], [51.2], [4.4])
        with pytest.raises(SchemaError):
            predict_batch(model, queries)


def test_dissimilarities_zero_denominator_row():
    # an all-floor query against an all-floor training row: defined as 0
    ds = make_dataset([[-157.0, -157.0], [-100.0, -90.0]], [51.2, 51.3], [4.4, 4.5],
                      floor=-157.0)
    model = fit(ds, 1, CFG)
    d = dissimilarities(model, np.array([-157.0, -157.0]))
    assert d[0] == 0.0
    assert d[1] == 1.0  # disjoint support
