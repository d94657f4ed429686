import numpy as np
import pytest
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import Pipeline

from v2gen.estimators import TensorKnnClassifier, ViewGridEncoder, check_meshes
from v2gen.mesh import TriangleMesh, normalize
from v2gen.shapes import box, make_toy_dataset


class TestViewGridEncoder:
    def test_transform_shape(self):
        meshes = [m for m, _ in make_toy_dataset(["box", "cone"], 2, seed=2)]
        enc = ViewGridEncoder(config="1x4x5x5", channels=("depth",)).fit(meshes)
        X = enc.transform(meshes)
        assert X.shape == (4, 100)
        assert X.dtype == np.float32

    def test_multi_channel_width(self):
        meshes = [m for m, _ in make_toy_dataset(["box"], 2, seed=2)]
        enc = ViewGridEncoder(config="1x2x3x3", channels=("depth", "cos_inc")).fit(meshes)
        assert enc.transform(meshes).shape == (2, 36)

    def test_not_fitted(self):
        with pytest.raises(NotFittedError):
            ViewGridEncoder().transform([box()])

    def test_normalizes_by_default(self):
        enc = ViewGridEncoder(config="1x1x1x1").fit([box()])
        X = enc.transform([box()])  # raw unit cube is accepted
        assert X.shape == (1, 1)

    def test_rejects_unnormalized_when_disabled(self):
        enc = ViewGridEncoder(config="1x1x1x1", normalize_input=False).fit([box()])
        with pytest.raises(ValueError, match="normalized"):
            enc.transform([box()])
        assert enc.transform([normalize(box())]).shape == (1, 1)

    def test_get_params_round_trip(self):
        enc = ViewGridEncoder(config="2x2x4x4", n_jobs=2)
        params = enc.get_params()
        assert params["config"] == "2x2x4x4"
        clone = ViewGridEncoder(**params)
        assert clone.get_params() == params

    def test_check_meshes_rejects_non_mesh(self):
        with pytest.raises(TypeError):
            check_meshes([box(), "not a mesh"])
        with pytest.raises(TypeError):
            check_meshes(box())


class TestTensorKnnClassifier:
    def test_fit_predict(self):
        X = np.array([[0.0, 0.0], [0.1, 0.0], [5.0, 5.0], [5.1, 5.0]])
        y = ["a", "a", "b", "b"]
        clf = TensorKnnClassifier(n_neighbors=1).fit(X, y)
        preds = clf.predict(np.array([[0.05, 0.0], [5.05, 5.0]]))
        assert list(preds) == ["a", "b"]
        assert set(clf.classes_) == {"a", "b"}

    def test_not_fitted(self):
        with pytest.raises(NotFittedError):
            TensorKnnClassifier().predict(np.zeros((1, 2)))

    def test_bad_k(self):
        with pytest.raises(ValueError):
            TensorKnnClassifier(n_neighbors=5).fit(np.zeros((2, 2)), ["a", "b"])

    def test_score_via_mixin(self):
        X = np.array([[0.0], [1.0], [10.0], [11.0]])
        y = ["a", "a", "b", "b"]
        clf = TensorKnnClassifier(n_neighbors=1).fit(X, y)
        assert clf.score(X, y) == 1.0


def test_pipeline_composition():
    dataset = make_toy_dataset(["box", "icosphere"], 4, seed=6)
    meshes = [m for m, _ in dataset]
    labels = [lab for _, lab in dataset]
    pipe = Pipeline(
        [
            ("encode", ViewGridEncoder(config="1x4x8x8")),
            ("knn", TensorKnnClassifier(n_neighbors=1)),
        ]
    )
    pipe.fit(meshes, labels)
    assert pipe.score(meshes, labels) == 1.0  # exact training vectors recalled
