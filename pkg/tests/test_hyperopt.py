import numpy as np
import pytest

from texdesign.designs import ModelVector, all_designs
from texdesign.hyperopt import (CategoricalDim, FloatDim, IntDim,
                                OptimizeResult, SearchSpace, TrialError,
                                TrialRecord, build_space, optimize, suggest)


def _uniform_history(space, rng, n, objective=None):
    records = []
    for t in range(n):
        params = suggest(space, records[:min(t, 9)], rng)  # stay in startup mode
        params = {d.name: params[d.name] for d in space.dims}
        value = float(rng.uniform()) if objective is None else objective(params)
        records.append(TrialRecord(index=t, params=params, objective=value))
    return records


class TestDimensions:
    def test_validation(self):
        with pytest.raises(ValueError):
            CategoricalDim("c", ())
        with pytest.raises(ValueError):
            IntDim("i", 5, 4)
        with pytest.raises(ValueError):
            FloatDim("f", 2.0, 2.0)
        with pytest.raises(ValueError):
            FloatDim("f", 0.0, 1.0, log=True)

    def test_space_rejects_duplicates(self):
        with pytest.raises(ValueError):
            SearchSpace(dims=(IntDim("a", 0, 1), IntDim("a", 0, 2)))
        with pytest.raises(ValueError):
            SearchSpace(dims=())

    def test_contains(self):
        space = SearchSpace(dims=(CategoricalDim("c", ("x", "y")),
                                  IntDim("i", 1, 4),
                                  FloatDim("f", 0.1, 10.0, log=True)))
        assert space.contains({"c": "x", "i": 2, "f": 1.0})
        assert not space.contains({"c": "z", "i": 2, "f": 1.0})
        assert not space.contains({"c": "x", "i": 5, "f": 1.0})
        assert not space.contains({"c": "x", "i": 2.5, "f": 1.0})
        assert not space.contains({"c": "x", "i": 2, "f": 100.0})


class TestBuildSpace:
    def test_dimension_counts(self):
        counts = {
            "AF+None+SVM-LK": 9,
            "FS+DC+DT": 11,
            "AF+DC+SVM-RBF": 10,
            "AF+None+DT": 10,
            "FS+None+SVM-LK": 10,
        }
        for label, n in counts.items():
            space = build_space(ModelVector.from_label(label))
            assert len(space.dims) == n, label

    def test_texture_dims_always_first_eight(self):
        for design in all_designs():
            names = build_space(design).names[:8]
            assert names == ("fos_levels", "glds_levels", "glds_distance",
                             "glcm_levels", "glcm_distance", "glrlm_levels",
                             "adf_angle_step", "rdf_radius_step")

    def test_selection_count_bounds(self):
        by_name = {d.name: d
                   for d in build_space(ModelVector.from_label("FS+DC+SVM-LK")).dims}
        assert (by_name["fs_count"].lo, by_name["fs_count"].hi) == (3, 38)
        by_name = {d.name: d
                   for d in build_space(ModelVector.from_label("FS+None+SVM-LK")).dims}
        assert (by_name["fs_count"].lo, by_name["fs_count"].hi) == (2, 38)

    def test_no_selection_dim_without_fs(self):
        assert "fs_count" not in build_space(ModelVector.from_label("AF+DC+DT")).names


class TestSuggest:
    def test_startup_is_uniform_and_in_bounds(self, rng):
        for design in all_designs():
            space = build_space(design)
            for _ in range(10):
                assert space.contains(suggest(space, [], rng))

    def test_model_phase_in_bounds_all_designs(self, rng):
        for design in all_designs():
            space = build_space(design)
            history = _uniform_history(space, rng, 15)
            for _ in range(20):
                assert space.contains(suggest(space, history, rng))

    def test_deterministic_given_rng_state(self):
        space = build_space(ModelVector.from_label("FS+DC+SVM-RBF"))
        history = _uniform_history(space, np.random.default_rng(3), 14)
        a = suggest(space, history, np.random.default_rng(11))
        b = suggest(space, history, np.random.default_rng(11))
        assert a == b

    def test_int_dims_stay_ints_after_startup(self, rng):
        space = SearchSpace(dims=(IntDim("depth", 1, 5),))
        history = _uniform_history(space, rng, 12)
        for _ in range(10):
            v = suggest(space, history, rng)["depth"]
            assert isinstance(v, int)

    def test_good_category_dominates(self):
        space = SearchSpace(dims=(CategoricalDim("c", ("a", "b", "x", "y")),))
        rng = np.random.default_rng(5)
        history = [TrialRecord(index=t, params={"c": choice},
                               objective=1.0 if choice == "a" else 0.0)
                   for t, choice in enumerate(["a", "b", "x", "y"] * 8)]
        picks = [suggest(space, history, rng)["c"] for _ in range(40)]
        assert picks.count("a") / len(picks) >= 0.75

    def test_numeric_density_concentrates(self):
        # good trials cluster near 2; the model phase should propose nearby
        space = SearchSpace(dims=(FloatDim("v", 0.0, 100.0),))
        rng = np.random.default_rng(9)
        history = []
        for t in range(40):
            v = float(rng.uniform(0, 100))
            history.append(TrialRecord(index=t, params={"v": v},
                                       objective=-abs(v - 2.0)))
        picks = [suggest(space, history, rng)["v"] for _ in range(20)]
        assert np.median(picks) < 25.0


class TestOptimize:
    def test_history_length_and_constant_objective(self):
        space = SearchSpace(dims=(FloatDim("v", 0.0, 1.0),))
        result = optimize(lambda p: 0.5, space, b=17, seed=0)
        assert len(result.history) == 17
        assert result.best_value == 0.5
        # ties resolve to the earliest trial
        assert result.best_params == result.history[0].params
        assert [r.index for r in result.history] == list(range(17))

    def test_deterministic(self):
        space = build_space(ModelVector.from_label("AF+None+SVM-RBF"))

        def objective(p):
            return -abs(np.log10(p["svm_c"]) - 1.0)

        a = optimize(objective, space, b=25, seed=42)
        b = optimize(objective, space, b=25, seed=42)
        assert a.best_value == b.best_value
        assert [r.params for r in a.history] == [r.params for r in b.history]

    def test_quadratic_objective_found(self):
        space = SearchSpace(dims=(FloatDim("svm_c", 1e-4, 1e4, log=True),))

        def objective(p):
            return -(np.log10(p["svm_c"]) - 1.0) ** 2

        for seed in (0, 1, 2):
            result = optimize(objective, space, b=60, seed=seed)
            assert result.best_value > -0.25, seed

    def test_objective_errors_are_tagged(self):
        space = SearchSpace(dims=(FloatDim("v", 0.0, 1.0),))

        def objective(p):
            if objective.calls == 3:
                raise RuntimeError("boom")
            objective.calls += 1
            return 0.0

        objective.calls = 0
        with pytest.raises(TrialError) as info:
            optimize(objective, space, b=10, seed=0)
        assert info.value.trial_index == 3

    def test_b_validated(self):
        space = SearchSpace(dims=(FloatDim("v", 0.0, 1.0),))
        with pytest.raises(ValueError):
            optimize(lambda p: 0.0, space, b=0, seed=0)

    def test_log_dim_samples_span_decades(self):
        space = SearchSpace(dims=(FloatDim("c", 1e-4, 1e4, log=True),))
        result = optimize(lambda p: 0.0, space, b=10, seed=7)  # startup only
        logs = [np.log10(r.params["c"]) for r in result.history]
        assert max(logs) - min(logs) > 2.0
