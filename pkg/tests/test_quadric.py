import itertools

import numpy as np
import pytest

from qmonodromy.coeffs import QuadricCoeffs, quadric_coeffs
from qmonodromy.quadric import (PencilSpec, Proj1Point, Quad4Point, boundary_analysis, classify,
                                eval_affine, eval_form, eval_form_residual, pencil_membership,
                                pencil_residual, special_line_point)


def rand_pt(rng):
    return Quad4Point(tuple(Proj1Point(*(rng.normal(size=2) + 1j * rng.normal(size=2)))
                            for _ in range(4)))


def test_proj1_basics():
    a = Proj1Point(2, 4)
    assert a.equals(Proj1Point(1, 2)) and a.affine() == 0.5
    assert Proj1Point.from_affine(complex("inf")).is_inf()
    assert Proj1Point(0, 3).is_zero()
    assert a.flip().affine() == 2
    with pytest.raises(ValueError):
        Proj1Point(0, 0)


def test_no_square_terms(ref):
    c = quadric_coeffs(ref, 1)
    assert eval_form(c, Quad4Point.from_affine([1, 0, 0, 0])) == 0


def test_plane_at_infinity(ref, rng):
    c = quadric_coeffs(ref, 1)
    r1, r2 = rng.normal(size=2) + 1j * rng.normal(size=2)
    r3 = (c.D * r1 - c.F * r2) / c.B
    pt = Quad4Point.from_affine([r1, r2, r3, complex("inf")])
    assert eval_form_residual(c, pt) < 1e-14


def test_affine_matches_homogeneous(ref, rng):
    c = quadric_coeffs(ref, 1)
    r = rng.normal(size=4) + 1j * rng.normal(size=4)
    pt = Quad4Point.from_affine(r)
    scale = np.prod([max(1, abs(v)) for v in r])
    assert abs(eval_form(c, pt) * scale - eval_affine(c, r)) < 1e-12 * scale


def test_classify_examples(ref):
    assert classify(QuadricCoeffs(1, 1, 1, 1, 1, 1)).rank == 4
    res = classify(QuadricCoeffs(2, 2, 1, 1, 1, 1))
    assert res.rank == 3
    assert np.abs(res.singular_locus).min() > 1e-6
    assert classify(quadric_coeffs(ref, 1)).rank == 4


def test_classify_rank3_kernel():
    c = QuadricCoeffs(2, 2, 1, 1, 1, 1)
    from qmonodromy.coeffs import gram_matrix
    v = classify(c).singular_locus
    assert np.linalg.norm(gram_matrix(c) @ v) < 1e-12


def test_classify_rejects_low_rank():
    with pytest.raises(ValueError):
        classify(QuadricCoeffs(1, 0, 0, 0, 0, 0))


def test_classify_both_rows(param_sets):
    for p in param_sets[:10]:
        assert classify(quadric_coeffs(p, 1)).rank == classify(quadric_coeffs(p, 2)).rank


def test_pencil_trivial(ref):
    g1, g2 = quadric_coeffs(ref, 1), quadric_coeffs(ref.at_omega(1.3), 1)
    pen = PencilSpec(g1, g2)
    l1, l2 = pencil_membership(g1, pen)
    assert abs(l1 - 1) < 1e-10 and abs(l2) < 1e-10
    target = QuadricCoeffs.from_array(2 * g1.as_array() - 3 * g2.as_array())
    l1, l2 = pencil_membership(target, pen)
    assert abs(l1 - 2) < 1e-9 and abs(l2 + 3) < 1e-9


def test_pencil_rejects_proportional(ref):
    g = quadric_coeffs(ref, 1)
    with pytest.raises(ValueError):
        PencilSpec(g, QuadricCoeffs.from_array(5j * g.as_array()))


def test_pencil_nonmember(rng, ref):
    pen = PencilSpec(quadric_coeffs(ref, 1), quadric_coeffs(ref.at_omega(1.3), 1))
    other = QuadricCoeffs.from_array(rng.normal(size=6))
    assert pencil_membership(other, pen) is None
    assert pencil_residual(other, pen)[2] > 1e-3


def test_boundary(ref):
    c = quadric_coeffs(ref, 1)
    rep = boundary_analysis(c)
    assert np.allclose(rep.single_infinity[4], [-c.D, c.F, c.B])
    assert rep.double_infinity[3, 4] == c.B
    assert rep.double_infinity_empty
    assert max(rep.triple_infinity_residual.values()) == 0
    assert min(rep.gradient_min_norm.values()) > 0


@pytest.mark.parametrize("kind", ["0", "inf"])
def test_special_lines(ref, rng, kind):
    c = quadric_coeffs(ref, 1)
    for idx in itertools.combinations((1, 2, 3, 4), 3):
        for _ in range(10):
            v = complex(rng.normal(), rng.normal())
            assert abs(eval_form(c, special_line_point(kind, idx, v))) == 0


def test_chart_independence(ref, rng):
    c = quadric_coeffs(ref, 1)
    for _ in range(10):
        pt = rand_pt(rng)
        lam = np.exp(rng.normal() + 1j * rng.uniform(0, 6.3))
        k = rng.integers(4)
        comps = list(pt.comps)
        comps[k] = Proj1Point(lam * comps[k].x, lam * comps[k].y)
        assert abs(eval_form_residual(c, pt) - eval_form_residual(c, Quad4Point(tuple(comps)))) < 1e-12


def test_diagonal_action(ref, rng):
    c = quadric_coeffs(ref, 1)
    for _ in range(10):
        pt = rand_pt(rng)
        lam = np.exp(rng.normal() + 1j * rng.uniform(0, 6.3))
        assert abs(eval_form_residual(c, pt) - eval_form_residual(c, pt.scaled(lam))) < 1e-12
