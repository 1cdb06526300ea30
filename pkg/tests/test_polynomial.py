import numpy as np
import pytest

from peskine_lab.polynomial import Poly, jacobian_matrix, monomials_of_degree
from peskine_lab.rng import Rng


def xy_poly(p=7):
    # 3*x0^2*x1 + 5*x1 + 1 over F_p
    return Poly.from_dict({(0, 0, 1): 3, (1,): 5, (): 1}, nvars=2, p=p)


def test_evaluate():
    f = xy_poly()
    assert f.evaluate([1, 1]) == (3 + 5 + 1) % 7
    assert f.evaluate([2, 3]) == (3 * 4 * 3 + 5 * 3 + 1) % 7
    assert f.evaluate([0, 0]) == 1


def test_evaluate_batch_matches_scalar():
    f = xy_poly()
    rng = Rng(3)
    pts = rng.matrix(40, 2, 7)
    batch = f.evaluate_batch(pts)
    assert batch.shape == (40,)
    for row, val in zip(pts, batch):
        assert f.evaluate(row) == int(val)


def test_add_mul_consistent_with_evaluation():
    p = 11
    rng = Rng(4)
    f = xy_poly(p)
    g = Poly.from_dict({(0, 1): 2, (): 4}, nvars=2, p=p)
    fg = f * g
    s = f + g
    for _ in range(20):
        pt = rng.ints(2, p)
        assert fg.evaluate(pt) == f.evaluate(pt) * g.evaluate(pt) % p
        assert s.evaluate(pt) == (f.evaluate(pt) + g.evaluate(pt)) % p


def test_partial():
    f = xy_poly()
    # d/dx0 (3 x0^2 x1 + 5 x1 + 1) = 6 x0 x1
    fx = f.partial(0)
    assert fx.as_dict() == {(0, 1): 6}
    # d/dx1 = 3 x0^2 + 5
    fy = f.partial(1)
    assert fy.as_dict() == {(0, 0): 3, (): 5}


def test_total_degree_and_zero():
    f = xy_poly()
    assert f.total_degree() == 3
    assert not f.is_zero()
    z = Poly.constant(0, 2, 7)
    assert z.is_zero()
    assert Poly.constant(3, 2, 7).total_degree() == 0


def test_uses_variable():
    f = Poly.from_dict({(0, 1): 2}, nvars=3, p=7)
    assert f.uses_variable(0) and f.uses_variable(1)
    assert not f.uses_variable(2)


def test_variable_and_scale():
    x1 = Poly.variable(1, 3, 5)
    assert x1.evaluate([4, 2, 0]) == 2
    assert x1.scale(3).evaluate([0, 2, 0]) == 6 % 5


def test_coefficients_reduced_mod_p():
    f = Poly.from_dict({(0,): 9, (): 7}, nvars=1, p=7)
    assert f.as_dict() == {(0,): 2}


def test_jacobian_matrix():
    p = 7
    f = Poly.from_dict({(0, 0): 1}, nvars=2, p=p)  # x0^2
    g = Poly.from_dict({(0, 1): 1}, nvars=2, p=p)  # x0 x1
    jac = jacobian_matrix([f, g], [3, 4])
    # rows: gradients at (3, 4): (2*3, 0) and (4, 3)
    assert jac.tolist() == [[6, 0], [4, 3]]


def test_monomials_of_degree():
    monos = monomials_of_degree(3, 2)
    assert len(monos) == 6
    assert all(len(m) == 2 for m in monos)
    assert len(set(monos)) == 6
