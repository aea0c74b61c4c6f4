import subprocess
import sys

import numpy as np
import pytest

from resumejudge import kernels


rng = np.random.default_rng(42)


def random_problem(n=60, k=5, d=8):
    points = rng.normal(size=(n, d))
    centers = rng.normal(size=(k, d))
    return points, centers


def test_assign_labels_paths_agree():
    points, centers = random_problem()
    labels_np, d2_np = kernels._assign_labels_np(points, centers)
    labels_py, d2_py = kernels._assign_labels_py(points, centers)
    np.testing.assert_array_equal(labels_np, np.asarray(labels_py))
    np.testing.assert_allclose(d2_np, np.asarray(d2_py), rtol=1e-12, atol=1e-12)


def test_assign_labels_matches_bruteforce():
    points, centers = random_problem(n=30, k=4, d=3)
    labels, d2 = kernels.assign_labels(points, centers)
    for i in range(30):
        dists = [float(np.sum((points[i] - c) ** 2)) for c in centers]
        assert labels[i] == int(np.argmin(dists))
        assert d2[i] == pytest.approx(min(dists), rel=1e-12, abs=1e-12)


def test_sum_by_label_paths_agree():
    points, centers = random_problem(n=50, k=6)
    labels, _ = kernels.assign_labels(points, centers)
    sums_np, counts_np = kernels._sum_by_label_np(points, labels, 6)
    sums_py, counts_py = kernels._sum_by_label_py(points, labels, 6)
    np.testing.assert_allclose(sums_np, np.asarray(sums_py), atol=1e-12)
    np.testing.assert_array_equal(counts_np, np.asarray(counts_py))


def test_sum_by_label_handles_empty_cluster():
    points = np.ones((4, 2))
    labels = np.array([0, 0, 2, 2], dtype=np.int64)
    sums, counts = kernels.sum_by_label(points, labels, 3)
    assert counts.tolist() == [2, 0, 2]
    np.testing.assert_allclose(np.asarray(sums)[1], 0.0)


def test_min_sqdist_paths_agree():
    points, centers = random_problem(n=40, k=1, d=5)
    current = rng.uniform(0.1, 5.0, size=40)
    out_np = kernels._min_sqdist_np(points, centers[0], current)
    out_py = kernels._min_sqdist_py(points, centers[0], current)
    np.testing.assert_allclose(out_np, np.asarray(out_py), atol=1e-12)


def test_min_sqdist_takes_elementwise_minimum():
    points = np.array([[0.0, 0.0], [3.0, 4.0]])
    center = np.array([0.0, 0.0])
    current = np.array([10.0, 9.0])
    out = np.asarray(kernels.min_sqdist(points, center, current))
    # point 0 is at the center (d2=0 < 10); point 1 has d2=25 > 9.
    np.testing.assert_allclose(out, [0.0, 9.0])


def test_min_sqdist_with_infinite_current():
    points, centers = random_problem(n=12, k=1, d=4)
    current = np.full(12, np.inf)
    out = np.asarray(kernels.min_sqdist(points, centers[0], current))
    expected = ((points - centers[0]) ** 2).sum(axis=1)
    np.testing.assert_allclose(out, expected, rtol=1e-12)


@pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba unavailable")
def test_numba_and_numpy_paths_numerically_identical():
    points, centers = random_problem(n=80, k=7, d=16)
    labels_nb, d2_nb = kernels._assign_labels_nb(points, centers)
    labels_np, d2_np = kernels._assign_labels_np(points, centers)
    np.testing.assert_array_equal(np.asarray(labels_nb), labels_np)
    np.testing.assert_allclose(np.asarray(d2_nb), d2_np, rtol=1e-12, atol=1e-12)
    sums_nb, counts_nb = kernels._sum_by_label_nb(points, labels_np, 7)
    sums_np, counts_np = kernels._sum_by_label_np(points, labels_np, 7)
    np.testing.assert_allclose(np.asarray(sums_nb), sums_np, rtol=1e-12, atol=1e-12)
    np.testing.assert_array_equal(np.asarray(counts_nb), counts_np)
    current = np.full(80, np.inf)
    np.testing.assert_allclose(
        np.asarray(kernels._min_sqdist_nb(points, centers[0], current)),
        kernels._min_sqdist_np(points, centers[0], current),
        rtol=1e-12,
        atol=1e-12,
    )


def test_warmup_reports_active_path():
    path = kernels.warmup()
    assert path in ("numba", "numpy")
    assert path == kernels.ACTIVE_PATH


def test_env_flag_disables_numba():
    code = (
        "import os; os.environ['RESUMEJUDGE_DISABLE_NUMBA'] = '1'; "
        "from resumejudge import kernels; "
        "assert kernels.ACTIVE_PATH == 'numpy', kernels.ACTIVE_PATH; "
        "assert kernels.warmup() == 'numpy'; "
        "import numpy as np; "
        "pts = np.arange(12, dtype=np.float64).reshape(4, 3); "
        "ctr = pts[:2].copy(); "
        "lbl, d2 = kernels.assign_labels(pts, ctr); "
        "assert lbl.tolist() == [0, 1, 1, 1], lbl; "
        "assert d2[0] == 0.0"
    )
    result = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True)
    assert result.returncode == 0, result.stderr


def test_both_paths_importable_regardless_of_flag():
    assert callable(kernels._assign_labels_np)
    assert callable(kernels._sum_by_label_np)
    assert callable(kernels._min_sqdist_np)
    if kernels.HAVE_NUMBA:
        assert callable(kernels._assign_labels_nb)
        assert callable(kernels._sum_by_label_nb)
        assert callable(kernels._min_sqdist_nb)
