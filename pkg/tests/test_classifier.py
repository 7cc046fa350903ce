import numpy as np
import pytest

from varsched.classifier import (
    AppFeatures,
    KernelRecord,
    build_class_model,
    classify_app,
    features_from_kernels,
    fu_util,
    load_app_features,
    peak_fu_util,
)


def k(runtime, util, unit="tensor", ktype=None):
    return KernelRecord(ktype or f"k{runtime}", runtime, {unit: util})


class TestFuUtil:
    def test_single_kernel(self):
        assert fu_util([k(2.0, 6.0)], "tensor") == 6.0

    def test_runtime_weighted(self):
        kernels = [k(1.0, 2.0, ktype="a"), k(3.0, 6.0, ktype="b")]
        assert fu_util(kernels, "tensor") == 5.0

    def test_zero_util(self):
        assert fu_util([k(1.0, 0.0), k(2.0, 0.0, ktype="x")], "tensor") == 0.0

    def test_empty_raises(self):
        with pytest.raises(ValueError):
            fu_util([], "tensor")

    def test_split_invariance(self):
        whole = [KernelRecord("a", 4.0, {"texture": 3.0})]
        split = [KernelRecord("a1", 1.5, {"texture": 3.0}),
                 KernelRecord("a2", 2.5, {"texture": 3.0})]
        assert fu_util(whole, "texture") == pytest.approx(fu_util(split, "texture"))


class TestPeakFuUtil:
    def test_max_over_units(self):
        kernels = [KernelRecord("a", 1.0, {"single_precision": 1.0,
                                           "tensor": 7.0,
                                           "texture": 3.0})]
        assert peak_fu_util(kernels) == 7.0

    def test_single_unit(self):
        assert peak_fu_util([k(1.0, 4.5)]) == 4.5

    def test_all_zero(self):
        assert peak_fu_util([KernelRecord("a", 1.0, {})]) == 0.0


class TestClassModel:
    def test_two_point_ordering(self):
        apps = [AppFeatures("mem", 0.0, 9.0), AppFeatures("cpu", 9.0, 1.0)]
        model = build_class_model(apps, 2, seed=0)
        # class A = higher peak FU utilization centroid
        assert classify_app(model, apps[0]) == 0
        assert classify_app(model, apps[1]) == 1

    def test_k1_single_class(self):
        apps = [AppFeatures("a", 1.0, 2.0), AppFeatures("b", 3.0, 4.0)]
        model = build_class_model(apps, 1, seed=0)
        assert all(classify_app(model, a) == 0 for a in apps)

    def test_table2_like_layout(self):
        # Compute-bound image models, mid language models, memory-bound apps.
        apps = [
            AppFeatures("resnet50", 3.0, 8.5),
            AppFeatures("vgg19", 2.5, 9.0),
            AppFeatures("dcgan", 3.5, 8.0),
            AppFeatures("bert", 4.5, 5.0),
            AppFeatures("gpt2", 5.0, 5.5),
            AppFeatures("pointnet", 7.5, 2.0),
            AppFeatures("pagerank", 8.5, 1.0),
        ]
        model = build_class_model(apps, 3, seed=0)
        labels = {a.app_name: classify_app(model, a) for a in apps}
        assert labels["resnet50"] == labels["vgg19"] == labels["dcgan"] == 0
        assert labels["bert"] == labels["gpt2"] == 1
        assert labels["pointnet"] == labels["pagerank"] == 2

    def test_centroid_classifies_to_itself(self):
        apps = [AppFeatures(f"a{i}", float(i), float(9 - i)) for i in range(8)]
        model = build_class_model(apps, 3, seed=1)
        for i, c in enumerate(model.centroids):
            assert classify_app(model, AppFeatures("probe", c[0], c[1])) == i

    def test_peak_util_non_increasing_with_index(self):
        rng = np.random.default_rng(3)
        apps = [AppFeatures(f"a{i}", *rng.uniform(0, 10, 2)) for i in range(20)]
        model = build_class_model(apps, 4, seed=2)
        peaks = model.centroids[:, 1]
        assert (np.diff(peaks) <= 1e-12).all()

    def test_tie_goes_to_lower_class(self):
        apps = [AppFeatures("a", 0.0, 0.0), AppFeatures("b", 4.0, 4.0)]
        model = build_class_model(apps, 2, seed=0)
        mid = AppFeatures("mid", 2.0, 2.0)
        assert classify_app(model, mid) == 0

    def test_feature_range_enforced(self):
        with pytest.raises(ValueError):
            AppFeatures("bad", 11.0, 1.0)
        with pytest.raises(ValueError):
            AppFeatures("bad", 1.0, -0.1)


class TestIO:
    def test_load_app_features(self, tmp_path):
        p = tmp_path / "apps.csv"
        p.write_text("app_name,dram_util,peak_fu_util\nresnet,3.0,8.5\n")
        apps = load_app_features(p)
        assert apps == [AppFeatures("resnet", 3.0, 8.5)]

    def test_load_bad_row_names_row(self, tmp_path):
        p = tmp_path / "apps.csv"
        p.write_text("app_name,dram_util,peak_fu_util\nresnet,3.0,8.5\nbad,x,1\n")
        with pytest.raises(ValueError, match="row 3"):
            load_app_features(p)

    def test_features_from_kernels(self):
        kernels = [KernelRecord("a", 1.0, {"tensor": 8.0, "texture": 2.0})]
        f = features_from_kernels("app", 3.0, kernels)
        assert f.peak_fu_util == 8.0
