import json
import os
import pathlib

import numpy as np
import pytest

import revinv

sklearn = pytest.importorskip("sklearn")
from sklearn.cluster import DBSCAN, HDBSCAN  # noqa: E402
from sklearn.decomposition import PCA  # noqa: E402
from sklearn.feature_extraction.text import TfidfVectorizer  # noqa: E402
from sklearn.metrics import silhouette_score  # noqa: E402

FIXTURE = pathlib.Path(os.environ.get("REVINV_FIXTURE", pathlib.Path(__file__).parents[2] / "data" / "fixture"))


def blobs(seed, n_per=25, d=6, k=3, spread=0.08):
    rng = np.random.default_rng(seed)
    centers = rng.normal(size=(k, d))
    x = np.vstack([c + spread * rng.normal(size=(n_per, d)) for c in centers])
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def same_partition(a, b):
    a, b = list(a), list(b)
    fwd, back = {}, {}
    for x, y in zip(a, b):
        if (x == -1) != (y == -1):
            return False
        if x == -1:
            continue
        if fwd.setdefault(x, y) != y or back.setdefault(y, x) != x:
            return False
    return True


def test_extract_and_normalize():
    src = "contract C {\n  function f(uint a) external {\n    require(a > 0, \"A: zero\");\n  }\n}\n"
    e = revinv.extract(src, 3)
    assert e == {"predicate": "a > 0", "message": "A: zero", "kind": "require"}
    assert revinv.normalize("  (( A  >  0 )) ") == "a > 0"
    iid = revinv.invariant_id("a > 0")
    assert iid.startswith("inv-") and len(iid) == 16
    with pytest.raises(revinv.RevinvError):
        revinv.extract(src, 2)
    with pytest.raises(ValueError):
        revinv.normalize("  ")


def test_tfidf_matches_sklearn():
    docs = [
        "balanceof(from) >= amount",
        "msg.sender == owner",
        "amount > 0 && amount <= maxpertx",
        "to != address(0)",
        "balanceof(to) + amount <= maxwallet",
    ]
    ours = revinv.tfidf(docs)
    vec = TfidfVectorizer(tokenizer=revinv.tokenize, lowercase=False, token_pattern=None)
    ref = vec.fit_transform(docs).toarray()
    assert ours.shape == ref.shape
    np.testing.assert_allclose(ours @ ours.T, ref @ ref.T, atol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_dbscan_matches_sklearn(seed):
    x = blobs(seed)
    dist = revinv.cosine_distances(x)
    for eps in (0.01, 0.02, 0.05):
        for min_samples in (3, 5):
            ref = DBSCAN(eps=eps, min_samples=min_samples, metric="precomputed").fit(dist).labels_
            assert same_partition(revinv.dbscan(x, eps, min_samples), ref)


@pytest.mark.parametrize("seed", range(5))
def test_hdbscan_matches_sklearn_on_blobs(seed):
    x = blobs(seed)
    dist = revinv.cosine_distances(x)
    ref = HDBSCAN(min_cluster_size=5, metric="precomputed", cluster_selection_method="eom").fit(dist).labels_
    ours = revinv.hdbscan(x, 5)
    assert same_partition(ours, ref)
    assert len(set(ours) - {-1}) == 3


@pytest.mark.parametrize("seed", range(5))
def test_silhouette_matches_sklearn(seed):
    x = blobs(seed, spread=0.4)
    labels = revinv.kmeans(x, 3, seed=seed)
    ref = silhouette_score(x, labels, metric="cosine")
    assert revinv.silhouette(x, labels) == pytest.approx(ref, abs=1e-9)


def test_pca_matches_sklearn():
    rng = np.random.default_rng(3)
    x = rng.normal(size=(40, 5)) * np.array([5.0, 3.0, 1.0, 0.5, 0.1])
    ours = revinv.pca_2d(x)
    ref = PCA(n_components=2).fit(x)
    np.testing.assert_allclose(ours["explained"], ref.explained_variance_ratio_, rtol=1e-9)
    proj = ref.transform(x)
    np.testing.assert_allclose(np.abs(ours["x"]), np.abs(proj[:, 0]), atol=1e-9)
    np.testing.assert_allclose(np.abs(ours["y"]), np.abs(proj[:, 1]), atol=1e-9)


def test_metrics_and_cochran():
    x = blobs(1)
    labels = [i // 25 for i in range(75)]
    assert revinv.silhouette(x, labels) > 0.9
    assert revinv.s_dbw(x, labels) >= 0.0
    assert revinv.coverage([0] * 377 + [-1] * 350, 727) == 51.86
    assert revinv.cochran_sample_size() == 9604


def test_fuzz_verdicts():
    v = revinv.fuzz(seed=1)
    assert v["verdict"] == "FAIL"
    assert len(v["counterexample"]) == 2
    assert revinv.fuzz(seed=1, patched=True)["verdict"] == "PASS"


def test_pipeline_on_fixture(tmp_path):
    out = tmp_path / "out"
    r = revinv.run_pipeline(FIXTURE / "corpus.jsonl", FIXTURE / "sources", out, grid=FIXTURE / "grid.json")
    assert r["exit_code"] == 0
    assert r["n_invariants"] > 0
    assert r["best"] is not None
    sel = json.loads((out / "selection.json").read_text())
    assert sel
    assert (out / "pca.csv").exists()
