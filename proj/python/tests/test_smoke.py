import numpy as np
import pytest

import discbench as db


@pytest.fixture(scope="module")
def split():
    return db.synthetic_split(num_classes=4, dim=12, informative_dims=3, separation=2.0, seed=3,
                              train_per_class=40, test_per_class=30)


def test_dataset_roundtrip(tmp_path):
    x = np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])
    ds = db.FeatureDataset(x, [0, 1], 2, backbone="resnet18", dataset="toy")
    path = tmp_path / "toy.fzf"
    db.write_feature_file(ds, path)
    back = db.read_feature_file(path)
    np.testing.assert_array_equal(back.features, x)
    assert back.labels == [0, 1]
    assert (back.num_classes, back.backbone, back.dataset) == (2, "resnet18", "toy")


def test_bad_file_raises_format_error(tmp_path):
    path = tmp_path / "bad.fzf"
    path.write_bytes(b"NOPE" + bytes(32))
    with pytest.raises(db.FormatError):
        db.read_feature_file(path)
    assert issubclass(db.FormatError, db.Error)


def test_invalid_labels_rejected():
    with pytest.raises(db.Error):
        db.FeatureDataset(np.zeros((2, 2)), [0, 5], 2)


def test_lda_shape_and_values(split):
    train, _ = split
    p = db.fit("lda", train)
    assert p.weights.shape == (12, 3)
    assert p.out_dim == 3
    vals = p.discriminant_values
    assert np.all(np.diff(vals) <= 1e-12) and np.all(vals >= -1e-12)
    z = p.transform(train.features)
    np.testing.assert_allclose(z, (train.features - p.center) @ p.weights, atol=1e-10)


def test_scatter_trace_decomposition(split):
    train, _ = split
    sc = db.scatter_matrices(train)
    x = train.features - train.features.mean(axis=0)
    assert np.trace(sc.between) + np.trace(sc.within) == pytest.approx(np.sum(x * x), rel=1e-10)
    assert 0.0 <= db.ledoit_wolf_alpha(train) <= 1.0


def test_every_method_runs(split):
    train, test = split
    for name in db.method_names():
        rec = db.run_trial(name, train, test, seed=0, timing=False)
        assert rec["status"] == "ok", (name, rec["status"])
        assert 0.0 <= rec["accuracy"] <= 1.0


def test_capacity_error(split):
    train, _ = split
    with pytest.raises(db.CapacityError):
        db.fit("lda", train, out_dim=4)


def test_unknown_method():
    with pytest.raises(db.ArgumentError, match="lda"):
        db.fit("kpca", db.FeatureDataset(np.eye(2), [0, 1], 2))


def test_classifier_separable():
    x = np.array([[-2.0], [-1.0], [1.0], [2.0]])
    model = db.train_classifier(x, [0, 0, 1, 1], 2)
    assert model.converged
    assert model.predict(x) == [0, 0, 1, 1]
    assert db.accuracy(model.predict(x), [0, 0, 1, 1]) == 1.0


def test_statistics():
    t, p = db.paired_t_test([1, 2, 3, 4, 5], [0, 0, 0, 0, 0])
    assert t == pytest.approx(4.2426, abs=1e-4)
    assert p == pytest.approx(0.0132, abs=1e-4)
    assert db.wilcoxon_signed_rank([1, 2, 3, 4, 5], [0, 0, 0, 0, 0]) == pytest.approx(0.0625)
    frontier = db.pareto_frontier([("a", 0.9, 1.0), ("b", 0.8, 2.0), ("c", 0.7, 0.5)])
    assert frontier == ["a", "c"]
    assert db.pearson_correlation([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0)


def test_cli_help():
    code, out, _ = db.cli(["--help"])
    assert code == 0
    assert "run" in out
