import numpy as np
import pytest

from errlens.ingest import load_dataset
from errlens.projection import (
    Projection2D,
    filter_projection,
    joint_affinities,
    kl_divergence,
    pca_project,
    project_store,
    tsne_project,
)

from conftest import record, synthetic_records, write_corpus


def test_pca_recovers_planar_data():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(40, 2))
    x -= x.mean(axis=0)
    out = pca_project(x, d=2)
    # projection of 2D data onto its own principal plane loses nothing:
    # pairwise distances are preserved exactly up to rotation
    d_in = np.linalg.norm(x[:, None] - x[None, :], axis=-1)
    d_out = np.linalg.norm(out[:, None] - out[None, :], axis=-1)
    assert np.allclose(d_in, d_out, atol=1e-9)


def test_pca_identical_points_map_to_origin():
    x = np.ones((5, 4))
    out = pca_project(x)
    assert np.allclose(out, 0.0)


def test_pca_requires_three_vectors():
    with pytest.raises(ValueError, match="at least 3"):
        pca_project(np.ones((2, 4)))


def test_pca_variance_matches_eigendecomposition():
    rng = np.random.default_rng(7)
    x = rng.normal(size=(50, 10)) @ np.diag(np.linspace(3, 0.1, 10))
    centered = x - x.mean(axis=0)
    cov = centered.T @ centered / (len(x) - 1)
    eigvals = np.sort(np.linalg.eigvalsh(cov))[::-1]
    out = pca_project(x, d=2)
    got = np.var(out, axis=0, ddof=1)
    assert np.allclose(np.sort(got)[::-1], eigvals[:2], rtol=1e-9)


def test_pca_sign_convention_deterministic():
    rng = np.random.default_rng(3)
    x = rng.normal(size=(30, 6))
    a = pca_project(x)
    b = pca_project(x.copy())
    assert np.array_equal(a, b)


def test_affinities_uniform_for_identical_points():
    x = np.zeros((4, 3))
    p, _ = joint_affinities(x, 1.0)
    off_diag = p[~np.eye(4, dtype=bool)]
    assert np.allclose(off_diag, off_diag[0])
    assert np.all(np.isfinite(p))


def test_tsne_identical_embeddings_finite():
    y, kl0, kl1 = tsne_project(np.zeros((5, 4)), perplexity=1.0, iters=60, seed=0)
    assert np.isfinite(y).all()


def test_entropy_matches_perplexity_target():
    rng = np.random.default_rng(11)
    x = rng.normal(size=(80, 10))
    _, entropies = joint_affinities(x, 12.0)
    assert np.abs(entropies - np.log2(12.0)).max() <= 1e-5


def test_final_kl_below_initial():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(100, 20))
    _, kl0, kl1 = tsne_project(x, perplexity=15, iters=1000, seed=4)
    assert kl1 < kl0


def test_gradient_matches_finite_differences():
    from errlens import kernels

    rng = np.random.default_rng(2)
    x = rng.normal(size=(10, 5))
    p, _ = joint_affinities(x, 3.0)
    y = rng.normal(size=(10, 2))
    grad, _ = kernels.tsne_grad(np.ascontiguousarray(y), p, True)
    h = 1e-6
    fd = np.zeros_like(y)
    for i in range(10):
        for c in range(2):
            yp = y.copy()
            yp[i, c] += h
            ym = y.copy()
            ym[i, c] -= h
            fd[i, c] = (kl_divergence(yp, p) - kl_divergence(ym, p)) / (2 * h)
    assert np.linalg.norm(grad - fd) / np.linalg.norm(grad) < 1e-5


def test_same_seed_bit_identical():
    rng = np.random.default_rng(5)
    x = rng.normal(size=(60, 8))
    y1, _, _ = tsne_project(x, perplexity=10, iters=250, seed=9)
    y2, _, _ = tsne_project(x, perplexity=10, iters=250, seed=9)
    assert np.array_equal(y1, y2)


def test_perplexity_clamped_with_warning():
    rng = np.random.default_rng(6)
    x = rng.normal(size=(12, 4))
    with pytest.warns(UserWarning, match="clamped"):
        tsne_project(x, perplexity=30, iters=30, seed=0)


def test_project_store_prefers_ingested(corpus_file):
    recs = [
        record("a", ["x"], prediction="pos", projection=[0.1, 0.2]),
        record("b", ["y"], prediction="pos", projection=[0.3, 0.4]),
    ]
    store = load_dataset(corpus_file(recs))
    proj = project_store(store)
    assert proj.method == "ingested"
    assert proj.coords[1][0] == 0.3


def test_project_store_none_without_embeddings(corpus_file):
    recs = [record("a", ["x"], prediction="pos")]
    store = load_dataset(corpus_file(recs))
    assert project_store(store) is None


def test_filter_projection_subset_and_flags(tmp_path):
    recs = synthetic_records(n_test=30, n_train=0, seed=71, with_embeddings=True)
    store = load_dataset(write_corpus(tmp_path / "c.jsonl", recs))
    proj = project_store(store, method="pca")
    all_pts = filter_projection(proj, [r.id for r in store.test_records], store)
    assert len(all_pts) == 30
    assert filter_projection(proj, [], store) == []
    some = filter_projection(proj, ["d3", "d7"], store)
    assert {p[0] for p in some} == {"d3", "d7"}
    by_id = {p[0]: p for p in all_pts}
    for pt in some:
        assert by_id[pt[0]] == pt  # coordinates unchanged, no re-fit
    for pt in all_pts:
        idx = store.id_to_test_index[pt[0]]
        assert pt[3] == (not bool(store.error_labels[idx]))


def test_planted_cluster_is_tighter_than_corpus(tmp_path):
    rng = np.random.default_rng(8)
    recs = []
    for i in range(80):
        clustered = i < 20
        center = np.array([4.0, 4.0, 4.0, 4.0]) if clustered else np.zeros(4)
        spread = 0.2 if clustered else 2.0
        emb = center + rng.normal(scale=spread, size=4)
        text = "medicare topic" if clustered else f"general w{i % 9}"
        recs.append(record(f"d{i}", [text], prediction="pos", embedding=list(emb)))
    store = load_dataset(write_corpus(tmp_path / "c.jsonl", recs))
    proj = project_store(store, method="tsne", perplexity=10, iters=500, seed=3)

    def mean_pairwise(points):
        pts = np.array([(x, y) for _, x, y, _ in points])
        d = np.linalg.norm(pts[:, None] - pts[None, :], axis=-1)
        return d[np.triu_indices(len(pts), 1)].mean()

    cluster_ids = [f"d{i}" for i in range(20)]
    all_ids = [r.id for r in store.test_records]
    assert mean_pairwise(filter_projection(proj, cluster_ids, store)) < mean_pairwise(
        filter_projection(proj, all_ids, store)
    )


def test_tsne_coordinates_always_finite_random():
    rng = np.random.default_rng(13)
    x = rng.normal(size=(50, 20)) * 100
    y, _, _ = tsne_project(x, perplexity=5, iters=300, seed=1)
    assert np.isfinite(y).all()
