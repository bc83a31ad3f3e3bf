"""Closed-form bracket properties, the exact h-limit, and the Jacobi check."""

from fractions import Fraction

import pytest

from qvir.qcoeff import (
    GaussianRational,
    S_I,
    S_ZERO,
    Scalar,
    SurdRational,
    q_minus_qinv,
    qint,
    taylor_q1,
)
from qvir.distcalc import Dist2, ModeWindow, weight_abs
from qvir.dirac import reduce, scenario, split_reduced
from qvir.qvirasoro import (
    ClassicalVirasoro,
    InsufficientOrderError,
    QVirasoroBracket,
    antisymmetry_check,
    classical_jacobi_check,
    classical_limit_check,
)
from qvir.report import FAIL

W = ModeWindow(8)


def all_pass(records):
    bad = [r for r in records if r.status == FAIL]
    assert not bad, "\n".join(
        f"{r.id} mode={r.mode}: {r.engine_value} != {r.expected_value}" for r in bad)


@pytest.fixture(scope="module")
def reductions():
    q = scenario("q-sl2")
    c = scenario("classical-sl2")
    return (reduce(q.current, q.table, q.constraints, W),
            reduce(c.current, c.table, c.constraints, W))


# ---------------------------------------------------------------------------
# bracket kernels
# ---------------------------------------------------------------------------

def test_kernel_values():
    B = QVirasoroBracket(False)
    f = B.quad_kernel(W)
    g = B.central_kernel(W)
    assert f.coeff(0) == S_ZERO
    for n in range(1, W.N + 1):
        assert f.coeff(n) == qint(n) * qint(n) / qint(2 * n)
        assert f.coeff(-n) == -f.coeff(n)
        assert g.coeff(n) == qint(2 * n)
    dq = q_minus_qinv()
    assert B.kappa_quad == S_I * qint(2) * dq * dq * Scalar.from_rat(Fraction(1, 2))
    assert B.kappa_cent == -S_I * dq * dq


def test_antisymmetry_records():
    all_pass(antisymmetry_check(QVirasoroBracket(False), W))
    all_pass(antisymmetry_check(QVirasoroBracket(True), W))


def test_weighted_unweighted_differ_by_weight():
    plain = QVirasoroBracket(False)
    residual = QVirasoroBracket(True)
    assert residual.quad_kernel(W) == weight_abs(plain.quad_kernel(W), -2)
    assert residual.central_kernel(W) == weight_abs(plain.central_kernel(W), -2)


# ---------------------------------------------------------------------------
# classical limit
# ---------------------------------------------------------------------------

def test_limit_suite(reductions):
    rq, rc = reductions
    all_pass(classical_limit_check(rq, rc, 6, W))


def test_limit_insufficient_order(reductions):
    rq, rc = reductions
    with pytest.raises(InsufficientOrderError):
        classical_limit_check(rq, rc, 3, W)


def test_limit_h4_values_by_hand(reductions):
    # independent expansion: the central content is i (q-1/q)^4 q^(-2|n|) [n]^4/[2n],
    # whose h^4 coefficient is 16 * n^3/2 * i; the linear content is
    # -i[2](q-1/q)^4 q^(-2|n|) [n]^2/[2n] with h^4 coefficient -16 i n.
    rq, _ = reductions
    from qvir.dirac import AffineMap
    amap = AffineMap.standard()
    parts = split_reduced(rq, "E-", W.N)
    for n in (1, 2, 3):
        lin = taylor_q1(amap.ab * parts.quad.coeff(n), 4)
        assert lin.coeff(4) == SurdRational(GaussianRational(0, -16 * n))
        cn = taylor_q1(Scalar.from_rat(2) * amap.b2 * parts.quad.coeff(n)
                       - Scalar.from_rat(2) * amap.ab * parts.lin_z.coeff(n)
                       + amap.a2 * parts.cnum.coeff(n), 4)
        assert cn.coeff(4) == SurdRational(GaussianRational(0, Fraction(16 * n ** 3, 2)))


def test_limit_detects_wrong_central(reductions):
    rq, rc = reductions
    broken = rc.scale(Scalar.from_rat(3))
    recs = classical_limit_check(rq, broken, 6, W)
    assert any(r.status == FAIL for r in recs)


# ---------------------------------------------------------------------------
# the undeformed endpoint
# ---------------------------------------------------------------------------

def test_jacobi_passes(reductions):
    _, rc = reductions
    V = ClassicalVirasoro.from_reduced(rc, "E-", W.N)
    all_pass(classical_jacobi_check(V, 6))


def test_jacobi_specific_triples(reductions):
    _, rc = reductions
    V = ClassicalVirasoro.from_reduced(rc, "E-", W.N)
    # (1,-1,0): antisymmetry and grading force cancellation
    for triple in ((1, -1, 0), (2, -1, -1), (3, -2, 1)):
        a, b, c = triple
        lcoef = S_ZERO
        central = S_ZERO
        for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
            inner_coef, _ = V.bracket(y, z)
            outer_coef, outer_cent = V.bracket(x, y + z)
            lcoef = lcoef + inner_coef * outer_coef
            central = central + inner_coef * outer_cent
        assert lcoef.is_zero() and central.is_zero(), triple


def test_jacobi_detects_wrong_central():
    # replacing the n^3 cocycle by n^2 (an even function) breaks the identity
    lin = Dist2.from_func(W.N, lambda n: -S_I * Scalar.from_rat(n))
    bad_cnum = Dist2.from_func(W.N, lambda n: S_I * Scalar.from_rat(n * n))
    V = ClassicalVirasoro(lin, bad_cnum)
    recs = classical_jacobi_check(V, 4)
    assert any(r.status == FAIL for r in recs)


def test_mode_bracket_extraction(reductions):
    _, rc = reductions
    V = ClassicalVirasoro.from_reduced(rc, "E-", W.N)
    # {L_a, L_b} = -i(a-b) L_{a+b} + (i/2) a^3 delta
    coef, cent = V.bracket(2, 1)
    assert coef == -S_I * Scalar.from_rat(1)
    assert cent == S_ZERO
    coef, cent = V.bracket(3, -3)
    assert coef == -S_I * Scalar.from_rat(6)
    assert cent == S_I * Scalar.from_rat(Fraction(27, 2))
