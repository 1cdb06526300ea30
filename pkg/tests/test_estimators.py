"""Dimension estimator calibrated on loci whose dimension is known exactly."""

import numpy as np
import pytest

from peskine_lab.estimators import (
    BudgetExceeded,
    DimEstimate,
    LocusPredicate,
    enumerate_locus,
    image_dim_estimate,
    slice_dim_estimate,
)
from peskine_lab.polynomial import Poly
from peskine_lab.rng import Rng


def linear_locus(n, d, p, seed=100):
    """Affine predicate for a random linear subspace of known dimension d."""
    rng = Rng(seed)
    from peskine_lab import linalg

    normals = linalg.sample_full_rank(rng, n - d, n, p)

    def test_batch(points):
        return ~((points @ normals.T % p).any(axis=1))

    return LocusPredicate(kind="affine", n=n, p=p, test_batch=test_batch, name="linear")


def cubic_hypersurface(n, p):
    def test_batch(points):
        vals = (points[:, 0] ** 3 + points[:, 1] ** 3 + points[:, 2] ** 3) % p
        return vals == (points[:, 3] * points[:, 4] * points[:, 5]) % p

    return LocusPredicate(kind="affine", n=n, p=p, test_batch=test_batch, name="cubic")


def test_predicate_width_and_count():
    pred = linear_locus(6, 3, 5)
    assert pred.width == 6
    assert pred.point_count() == 5**6
    proj = LocusPredicate(
        kind="projective", n=5, p=5, test_batch=lambda b: b[:, 0] == 0
    )
    assert proj.width == 6
    assert proj.point_count() == (5**6 - 1) // 4


def test_predicate_rejects_unknown_kind():
    with pytest.raises(ValueError):
        LocusPredicate(kind="weird", n=5, p=5, test_batch=lambda b: b[:, 0] == 0)


def test_enumerate_locus_exact():
    pred = linear_locus(4, 2, 3)
    pts, count = enumerate_locus(pred)
    assert count == 3**2
    assert pts == sorted(pts)
    arr = np.array(pts)
    assert pred.test_batch(arr).all()


def test_enumerate_locus_budget():
    pred = linear_locus(10, 2, 11)
    with pytest.raises(BudgetExceeded):
        enumerate_locus(pred, budget=1000)


@pytest.mark.parametrize("d", [12, 15, 18])
def test_linear_calibration(d):
    # Known-dimension loci in 20 variables at the sizes the orbit checks use.
    pred = linear_locus(20, d, 5, seed=200 + d)
    est = slice_dim_estimate(pred, Rng(300 + d), trials=50)
    assert est.estimated_dim == d
    assert not est.ambiguous


def test_cubic_hypersurface_dim():
    est = slice_dim_estimate(cubic_hypersurface(20, 7), Rng(17), trials=30)
    assert est.estimated_dim == 19
    assert not est.ambiguous


def test_empty_locus():
    pred = LocusPredicate(
        kind="affine",
        n=20,
        p=5,
        test_batch=lambda b: np.zeros(len(b), dtype=bool),
    )
    est = slice_dim_estimate(pred, Rng(18), trials=10, budget=10**6)
    assert est.estimated_dim == -1
    assert not est.ambiguous


def test_projective_drop():
    # Projective line inside P^5: locus x2 = ... = x5 = 0 has dimension 1.
    def test_batch(points):
        return ~(points[:, 2:].any(axis=1))

    pred = LocusPredicate(kind="projective", n=5, p=7, test_batch=test_batch)
    est = slice_dim_estimate(pred, Rng(19), trials=30)
    assert est.estimated_dim == 1


def test_estimate_deterministic_across_threads():
    pred = linear_locus(20, 15, 5, seed=77)
    a = slice_dim_estimate(pred, Rng(20), trials=12, threads=1)
    b = slice_dim_estimate(pred, Rng(20), trials=12, threads=4)
    assert a == b


def test_threshold_validation():
    pred = linear_locus(6, 3, 5)
    with pytest.raises(ValueError):
        slice_dim_estimate(pred, Rng(1), hit_threshold=0.3, miss_threshold=0.4)


def test_image_dim_estimate_linear():
    # Parametrization t -> (t0, t1, t0 + t1, 0): differential rank 2.
    p = 7
    x0 = Poly.variable(0, 2, p)
    x1 = Poly.variable(1, 2, p)
    polys = [x0, x1, x0 + x1, Poly.constant(0, 2, p)]
    assert image_dim_estimate(polys, Rng(5), samples=10) == 2


def test_image_dim_estimate_quadratic():
    # (t0^2, t0 t1, t1^2) has generic differential rank 2.
    p = 11
    t0 = Poly.variable(0, 2, p)
    t1 = Poly.variable(1, 2, p)
    polys = [t0 * t0, t0 * t1, t1 * t1]
    assert image_dim_estimate(polys, Rng(6), samples=10) == 2
