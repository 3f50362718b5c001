import numpy as np

from gbta.roots import cluster, levenberg_marquardt, match


def test_lm_finds_square_roots():
    # x^2 = 2 from both sides
    fun = lambda x, rows: x ** 2 - 2  # noqa: E731
    jac = lambda x, rows: (2 * x)[:, :, None]  # noqa: E731
    res = levenberg_marquardt(fun, jac, np.array([[1.0], [-3.0], [10.0]]))
    np.testing.assert_allclose(np.abs(res.x[:, 0]), np.sqrt(2), rtol=1e-14)
    assert np.all(res.residual < 1e-14)


def test_lm_singular_root():
    # (x - 1)^2 = 0 has a double root; still resolved well below 1e-6
    fun = lambda x, rows: (x - 1) ** 2  # noqa: E731
    jac = lambda x, rows: (2 * (x - 1))[:, :, None]  # noqa: E731
    res = levenberg_marquardt(fun, jac, np.array([[3.0]]), max_iter=400, ftol=1e-40)
    assert abs(res.x[0, 0] - 1) < 1e-8


def test_lm_per_row_data():
    targets = np.array([1.0, 4.0, 9.0])
    fun = lambda x, rows: x ** 2 - targets[rows, None]  # noqa: E731
    jac = lambda x, rows: (2 * x)[:, :, None]  # noqa: E731
    res = levenberg_marquardt(fun, jac, np.ones((3, 1)))
    np.testing.assert_allclose(res.x[:, 0], [1, 2, 3], rtol=1e-13)


def test_cluster_and_match():
    pts = np.array([[0.0, 0], [1e-9, 0], [1, 1], [1, 1 + 1e-8], [5, 5]])
    centres = cluster(pts, 1e-6)
    assert len(centres) == 3
    pairs, lost, free = match(centres, [np.array([1.0, 1]), np.array([0.0, 0]), np.array([2.0, 2])])
    assert sorted(pairs) == [(0, 1), (1, 0)]
    assert lost == [2] and free == [2]
