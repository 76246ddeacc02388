import itertools

import numpy as np
import pytest

from qmonodromy.coeffs import quadric_coeffs
from qmonodromy.monodromy import (CONSTRAINTS, MonodromyRep, SamplingError, basis_eval_matrix,
                                  default_x0, det_locus, eq_constant, parse_constraint, pi_mixed,
                                  rho_rank1, rho_tuple, sample_point, select_convention,
                                  tensor_pair)
from qmonodromy.params import ParamSet
from qmonodromy.quadric import Proj1Point, eval_form_residual
from qmonodromy.theta import theta


@pytest.fixture(scope="module")
def samples(ref):
    rng = np.random.default_rng(99)
    return [sample_point(ref, rng) for _ in range(100)]


def test_basis_table(ref):
    for i, j in itertools.product((1, 2), (1, 2)):
        B = basis_eval_matrix(ref, i, j)
        assert B[0, 0] == 0 and B[1, 1] == 0
        if (i, j) == (1, 1):
            want = theta(ref.q, -ref.x[1] / ref.x[0]) * theta(
                ref.q, -ref.x[0] * ref.x[1] * ref.sigma[0] / ref.rho[0])
            assert abs(B[1, 0] - want) < 1e-14 * abs(want)
        for a, b in itertools.combinations(range(4), 2):
            minor = B[a, 0] * B[b, 1] - B[a, 1] * B[b, 0]
            assert abs(minor) > 1e-8 * np.abs(B).max() ** 2


def test_samples_det_and_quadrics(ref, samples):
    c1, c2 = quadric_coeffs(ref, 1), quadric_coeffs(ref, 2)
    for M in samples:
        assert max(M.det_residual(k) for k in (1, 2, 3, 4)) < 1e-7
        rt = rho_tuple(M)
        assert eval_form_residual(c1, rt.rho) < 1e-7
        assert eval_form_residual(c2, rt.rho) < 1e-7


def test_samples_nonzero_entries(samples):
    for M in samples:
        assert np.linalg.norm(M.coeff, axis=2).min() > 1e-10


def test_no_common_zero_position(samples):
    for M in samples[:20]:
        zeros = [np.abs(M.at_point(k)) < 1e-10 * np.abs(M.at_point(k)).max() for k in (1, 2, 3, 4)]
        for a, b in itertools.combinations(range(4), 2):
            assert not np.any(zeros[a] & zeros[b])


def test_det_not_identically_zero(ref, samples):
    x0 = default_x0(ref)
    for M in samples[:10]:
        A = M.matrix(x0)
        assert abs(np.linalg.det(A)) > 1e-6 * np.abs(A).max() ** 2


def test_matrix_matches_table(ref, samples):
    M = samples[0]
    assert np.allclose(M.matrix(ref.x[2]), M.at_point(3), rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("constraint", CONSTRAINTS)
def test_constrained_zero_line(ref, constraint):
    rng = np.random.default_rng(5)
    M = sample_point(ref, rng, constraint)
    kind, r, k = parse_constraint(constraint)
    A = M.at_point(k)
    line = A[r - 1] if kind == "row" else A[:, r - 1]
    assert np.abs(line).max() < 1e-12 * np.abs(A).max()
    assert max(M.det_residual(l) for l in (1, 2, 3, 4)) < 1e-7


def test_constrained_exact_at_x1(ref):
    M = sample_point(ref, np.random.default_rng(1), "rho_1=0")
    assert np.all(M.at_point(1)[:, 1] == 0)
    rt = rho_tuple(M)
    assert rt.rho[0].is_zero() and rt.PiPrime[1, 2].is_zero()


def test_parse_constraint():
    assert parse_constraint("rho_3=inf") == ("col", 1, 3)
    assert parse_constraint("rhoPrime_2=0") == ("row", 2, 2)
    assert parse_constraint("rho_3=inf", "columnclass") == ("row", 1, 3)
    with pytest.raises(ValueError):
        parse_constraint("rho_5=0")


def test_sampling_failure(ref):
    class Zero:
        def normal(self, size=None):
            return np.zeros(size) if size else 0.0
    with pytest.raises(SamplingError):
        sample_point(ref, Zero(), max_retries=3)


def test_rho_rank1_examples():
    r, rp = rho_rank1([[1, 2], [2, 4]])
    assert r.equals(Proj1Point(1, 2)) and rp.equals(Proj1Point(1, 2))
    r, rp = rho_rank1([[0, 0], [3, 5]])
    assert r.equals(Proj1Point(3, 5)) and rp.equals(Proj1Point(0, 3))
    C, L = np.array([1, 2]), np.array([3, 5])
    r, rp = rho_rank1(np.outer(C, L))
    assert r.equals(Proj1Point(3, 5)) and rp.equals(Proj1Point(1, 2))
    r2, rp2 = rho_rank1(np.outer(C, L), "columnclass")
    assert r2.equals(rp) and rp2.equals(r)


def test_rho_rank1_errors():
    with pytest.raises(ValueError):
        rho_rank1(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        rho_rank1(np.eye(2))


def test_equivariance(samples, rng):
    for M in samples[:10]:
        g = rng.normal(size=2) + 1j * rng.normal(size=2)
        d = rng.normal(size=2) + 1j * rng.normal(size=2)
        a = rho_tuple(M).rho.affine()
        b = rho_tuple(M.gauge(g, d)).rho.affine()
        ratio = b / a
        assert np.abs(ratio - ratio[0]).max() < 1e-9 * abs(ratio[0])
        assert abs(ratio[0] - d[0] / d[1]) < 1e-9 * abs(ratio[0])


def test_pi_mixed_examples():
    M1 = np.outer([1, 2], [1, 1])
    assert pi_mixed(M1, M1)[0].equals(Proj1Point(1, 1))
    M2 = np.outer([3, 4], [2, 7])
    pi, _ = pi_mixed(M1, M2)
    assert pi.equals(Proj1Point(4, 6))
    pi2, _ = pi_mixed(np.outer([5, 10], [1, 1]), M2)
    assert pi2.equals(pi)


def test_pi_mixed_gauge(samples, rng):
    A, B = samples[0].at_point(1), samples[0].at_point(2)
    G = np.diag(rng.normal(size=2) + 1j)
    D = np.diag(rng.normal(size=2) - 1j)
    p1, p2 = pi_mixed(A, B)
    g1, g2 = pi_mixed(G @ A @ D, G @ B @ D)
    assert p1.equals(g1) and p2.equals(g2)


def test_pi_mixed_undefined():
    pi, pip = pi_mixed(np.outer([1, 0], [1, 2]), np.outer([1, 0], [3, 1]))
    assert pi is None and pip is not None
    with pytest.raises(ValueError):
        pi_mixed(np.outer([1, 0], [1, 0]), np.outer([1, 0], [1, 0]))


def test_det_locus_zero_component(ref):
    t = -1 / (ref.sigma[1] * ref.x[0])
    assert det_locus(ref, t)[0].is_zero()


def test_det_locus_on_quadric_same_omega(ref, rng):
    for w in (ref.omega, 0.8, 1.3):
        pw = ref.at_omega(w)
        c = quadric_coeffs(pw, 1)
        for _ in range(10):
            t = np.exp(rng.normal(scale=0.5) + 1j * rng.uniform(0, 6.3))
            assert eval_form_residual(c, det_locus(pw, t)) < 1e-7


def test_det_locus_q_shift(ref):
    t = 0.8 + 0.3j
    a, b = det_locus(ref, t).affine(), det_locus(ref, ref.q * t).affine()
    ratio = b / a
    assert np.abs(ratio - ratio[0]).max() < 1e-10 * abs(ratio[0])


def test_eq_constant(ref):
    assert abs(eq_constant(ref, 1)) > 0 and abs(eq_constant(ref, 2, "theta")) > 0
    from dataclasses import replace
    eqr = replace(ref, rho=(ref.rho[0], ref.rho[0]))
    assert abs(eq_constant(eqr, 1) - 1) < 1e-14


@pytest.mark.parametrize("constraint,which", [("rho_3=inf", 1), ("rho_3=0", 2)])
def test_eq_relation_constant(ref, constraint, which):
    rng = np.random.default_rng(3)
    e = eq_constant(ref, which)
    for _ in range(20):
        v = rho_tuple(sample_point(ref, rng, constraint)).Pi[2, 1].affine()
        assert abs(v - e) < 1e-7 * abs(e)


def test_select_convention(ref):
    ch = select_convention(ref, np.random.default_rng(0))
    assert (ch.reading, ch.kind, ch.convention) == ("corrected", "T", "rowclass")
    assert ch.residuals["printed", "theta", "rowclass"] > 1e-3


def test_tensor_pair(samples):
    for M in samples[:20]:
        tp = tensor_pair(M)
        assert max(tp.segre_residuals) < 1e-14
        assert tp.line_residuals.max() < 1e-7
        assert tp.transversality > 1e-6


def test_tensor_pair_rejects_congruent_x0(ref, samples):
    with pytest.raises(ValueError):
        tensor_pair(samples[0], ref.x[1] * ref.q)


def test_rep_shape_check(ref):
    with pytest.raises(ValueError):
        MonodromyRep(ref, np.zeros((2, 2)))


def test_injectivity_spot_check(samples):
    pts = [rho_tuple(M).rho.affine() for M in samples[:20]]
    for a, b in itertools.combinations(pts, 2):
        assert np.abs(a / a[0] - b / b[0]).max() > 1e-8
