import numpy as np
from numpy.testing import assert_allclose

from src.utils.numerics import local_maxima, local_minima, real_cubic_roots, sign_changes, unwrap_anchored


def test_three_real_roots():
    assert_allclose(real_cubic_roots(1.0, -6.0, 11.0, -6.0), [1.0, 2.0, 3.0], rtol=1e-14)


def test_single_real_root():
    roots = real_cubic_roots(1.0, 0.0, 1.0, 1.0)
    assert len(roots) == 1
    x = roots[0]
    assert abs(x ** 3 + x + 1.0) < 1e-14
    assert_allclose(x, -0.6823278038280193, rtol=1e-14)


def test_degenerate_leading_coefficient():
    assert_allclose(real_cubic_roots(0.0, 1.0, -3.0, 2.0), [1.0, 2.0], rtol=1e-15)
    assert real_cubic_roots(0.0, 1.0, 0.0, 1.0) == []
    assert_allclose(real_cubic_roots(0.0, 0.0, 2.0, -1.0), [0.5])


def test_local_extrema():
    values = [0.0, 2.0, 1.0, 1.0, 3.0, 0.5]
    assert list(local_maxima(values)) == [1, 4]
    assert list(local_minima([3.0, 1.0, 2.0, 0.0, 4.0])) == [1, 3]


def test_unwrap_keeps_anchor_principal():
    phases = [3.0, -3.0, -2.5]
    anchored_first = unwrap_anchored(phases, 0)
    assert anchored_first[0] == 3.0
    assert_allclose(anchored_first[1], -3.0 + 2 * np.pi)

    anchored_last = unwrap_anchored(phases, 2)
    assert_allclose(anchored_last[2], -2.5)
    assert_allclose(anchored_last[0], 3.0 - 2 * np.pi)


def test_sign_changes_interpolates():
    crossings = sign_changes([1.0, 2.0, 3.0, 4.0], [1.0, 0.5, -1.0, -2.0])
    assert len(crossings) == 1
    x, direction = crossings[0]
    assert direction == "+-"
    assert_allclose(x, 2.0 + 0.5 / 1.5)


def test_sign_changes_skips_missing_and_zero():
    crossings = sign_changes([1.0, 2.0, 3.0, 4.0], [-1.0, None, 0.0, 2.0])
    assert [d for _, d in crossings] == ["-+"]
    assert_allclose(crossings[0][0], 1.0 + 1.0 * 3.0 / 3.0)
