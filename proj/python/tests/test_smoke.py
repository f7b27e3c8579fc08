import numpy as np
import pytest

import teamseg


def test_mask_and_generator_shapes():
    mask = teamseg.make_mask("three_region", 120, 100)
    assert mask.shape == (100, 120)
    assert set(np.unique(mask)) == {0, 1, 2}
    img, models = teamseg.generate(mask, "gmm", 64, sigma=8.0, seed=1)
    assert img.shape == mask.shape
    assert img.min() >= 0 and img.max() < 64
    assert models.shape == (64, 3)
    np.testing.assert_allclose(models.sum(axis=0), 1.0)


def test_generation_is_seeded():
    mask = teamseg.make_mask("two_region", 80, 80)
    a, _ = teamseg.generate(mask, "rand", 16, seed=5)
    b, _ = teamseg.generate(mask, "rand", 16, seed=5)
    c, _ = teamseg.generate(mask, "rand", 16, seed=6)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_moments_are_normalized():
    img = np.array([[0, 1], [1, 0]], dtype=np.int32)
    alpha, beta, colors, slices = teamseg.moments(img, 2, r=1, slices=2, beta_mode="axis")
    np.testing.assert_array_equal(alpha, [0.5, 0.5])
    np.testing.assert_array_equal(beta, [[0.0, 0.5], [0.5, 0.0]])
    assert colors == [0, 1]
    assert slices[1][0, 1] == 2.0


def test_segment_two_region_gmm():
    mask = teamseg.make_mask("two_region", 150, 150)
    img, _ = teamseg.generate(mask, "gmm", 64, sigma=6.0, seed=2)
    labels, theta, w = teamseg.segment(img, 64, 2)
    assert labels.shape == mask.shape
    assert theta.shape == (64, 2)
    assert w.sum() == pytest.approx(1.0)
    jac, perm = teamseg.mean_jaccard(mask, labels, 2)
    assert jac >= 0.97
    gt_theta, gt_w = teamseg.models_from_gt(img, 64, mask)
    db, dbw, _ = teamseg.model_set_distance(gt_theta, gt_w, theta, w)
    assert db <= 0.02
    assert dbw <= 0.01


def test_metrics_and_projection():
    p = np.array([0.5, 0.5])
    q = np.array([0.9, 0.1])
    assert teamseg.bhattacharyya(p, q) == teamseg.bhattacharyya(q, p)
    assert teamseg.bhattacharyya(p, p) == 0.0
    np.testing.assert_allclose(teamseg.project_simplex(np.array([1.2, -0.2])), [1.0, 0.0])


def test_rank_deficiency_is_reported():
    img = np.zeros((20, 20), dtype=np.int32)
    img[:, 10:] = 1
    with pytest.raises(teamseg.RankDeficientError):
        teamseg.estimate(img, 4, 3, slices=2)


def test_graymap_round_trip(tmp_path):
    img = np.arange(12, dtype=np.int32).reshape(3, 4)
    path = str(tmp_path / "x.pgm")
    teamseg.save_graymap(img, 300, path)
    back, levels = teamseg.load_graymap(path)
    assert levels == 300
    assert np.array_equal(back, img)
