"""Field-tower arithmetic: q-integers, canonical forms, degeneration maps."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qvir.qcoeff import (
    GaussianRational,
    PoleAtQ1Error,
    S_I,
    S_ONE,
    S_R,
    S_T,
    S_ZERO,
    Scalar,
    SurdRational,
    eval_q1,
    q_minus_qinv,
    qint,
    taylor_q1,
)


def spow(k):
    return Scalar.s_power(k)


# ---------------------------------------------------------------------------
# q-integers
# ---------------------------------------------------------------------------

def test_qint_small_values():
    # [1] has no deformation, [0] vanishes
    assert qint(1) == S_ONE
    assert qint(0) == S_ZERO
    # [2] = (q^2-q^-2)/(q-q^-1) = q + q^-1, expanded by hand
    assert qint(2) == spow(2) + spow(-2)
    # [3] = q^2 + 1 + q^-2
    assert qint(3) == spow(4) + S_ONE + spow(-4)


def test_qint_is_ratio_of_q_powers():
    # definition check: [n]*(q - q^-1) == q^n - q^-n
    dq = q_minus_qinv()
    for n in range(-8, 9):
        assert qint(n) * dq == spow(2 * n) - spow(-2 * n)


@pytest.mark.parametrize("n", range(1, 25))
def test_qint_identities_window(n):
    # [2n] = [n]*(q^n + q^-n) and [-n] = -[n]
    assert qint(2 * n) == qint(n) * (spow(2 * n) + spow(-2 * n))
    assert qint(-n) == -qint(n)


# ---------------------------------------------------------------------------
# tower relations and field axioms
# ---------------------------------------------------------------------------

def test_surd_relations():
    assert S_T * S_T == Scalar.from_rat(2)
    assert S_R * S_R == spow(2) + spow(-2)
    assert (S_T * S_R) * (S_T * S_R) == 2 * (spow(2) + spow(-2))


def test_i_squares_to_minus_one():
    assert S_I * S_I == -S_ONE


gaussians = st.builds(
    GaussianRational,
    st.fractions(min_value=-3, max_value=3, max_denominator=4),
    st.fractions(min_value=-3, max_value=3, max_denominator=4),
)


@st.composite
def scalars(draw):
    # sparse Laurent content on each tower component
    def comp():
        n_terms = draw(st.integers(0, 2))
        out = S_ZERO
        for _ in range(n_terms):
            k = draw(st.integers(-4, 4))
            g = draw(gaussians)
            out = out + Scalar.s_power(k, g)
        return out

    x = comp() + comp() * S_T + comp() * S_R + comp() * S_T * S_R
    return x


@settings(max_examples=25, deadline=None)
@given(scalars(), scalars(), scalars())
def test_mul_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


@settings(max_examples=25, deadline=None)
@given(scalars(), scalars())
def test_mul_commutative_and_distributive(a, b):
    assert a * b == b * a
    assert (a + b) * a == a * a + b * a


@settings(max_examples=25, deadline=None)
@given(scalars())
def test_normalization_canonicity(x):
    assert (x - x).is_zero()
    if not x.is_zero():
        assert x / x == S_ONE
        assert x * x.inverse() == S_ONE


def test_division_with_surds():
    x = (S_T + S_R) * spow(3) + S_I
    y = S_R * S_T - spow(-2)
    assert (x / y) * y == x


# ---------------------------------------------------------------------------
# eval_q1
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n", list(range(-24, 25)))
def test_eval_q1_of_qint_is_n(n):
    assert eval_q1(qint(n)) == SurdRational(n)


def test_eval_q1_constants_fixed():
    assert eval_q1(S_ONE) == SurdRational(1)
    assert eval_q1(Scalar.from_rat(Fraction(3, 7))) == SurdRational(Fraction(3, 7))


def test_eval_q1_surds():
    assert eval_q1(S_T) == SurdRational(0, 1)
    # r degenerates to t
    assert eval_q1(S_R) == SurdRational(0, 1)
    assert eval_q1(S_T * S_R) == SurdRational(2)


def test_eval_q1_pole_raises():
    x = S_ONE / q_minus_qinv()
    with pytest.raises(PoleAtQ1Error):
        eval_q1(x)


def test_taylor_order0_agrees_with_eval():
    xs = [qint(5), (qint(3) + S_T) / (qint(2) + S_ONE), S_R * qint(2)]
    for x in xs:
        h = taylor_q1(x, 0)
        assert h.coeff(0) == eval_q1(x)


# ---------------------------------------------------------------------------
# taylor_q1
# ---------------------------------------------------------------------------

def test_taylor_qint2():
    # [2] = 2 cos h = 2 - h^2 + h^4/12 - ...
    h = taylor_q1(qint(2), 2)
    assert h.coeff(0) == SurdRational(2)
    assert h.coeff(1) == SurdRational(0)
    assert h.coeff(2) == SurdRational(-1)


def test_taylor_q_minus_qinv():
    # q - 1/q = 2i sin h = 2i h - i h^3 / 3 + ...
    h = taylor_q1(q_minus_qinv(), 3)
    assert h.coeff(0) == SurdRational(0)
    assert h.coeff(1) == SurdRational(GaussianRational(0, 2))
    assert h.coeff(2) == SurdRational(0)
    assert h.coeff(3) == SurdRational(GaussianRational(0, Fraction(-1, 3)))


def test_taylor_constant():
    for k in (0, 2, 5):
        h = taylor_q1(S_ONE, k)
        assert h.coeff(0) == SurdRational(1)
        assert all(h.coeff(m) == SurdRational(0) for m in range(1, k + 1))


def test_taylor_pole_in_h():
    # 1/(q - 1/q) = 1/(2i h) + O(h): principal part is representable
    h = taylor_q1(S_ONE / q_minus_qinv(), 1)
    assert h.valuation() == -1
    assert h.coeff(-1) == SurdRational(GaussianRational(0, Fraction(-1, 2)))


def test_taylor_of_r_uses_sqrt_cos():
    # r = t*sqrt(cos h) = t*(1 - h^2/4 - h^4/96 + ...)
    h = taylor_q1(S_R, 4)
    assert h.coeff(0) == SurdRational(0, 1)
    assert h.coeff(2) == SurdRational(0, Fraction(-1, 4))
    assert h.coeff(4) == SurdRational(0, Fraction(-1, 96))
    # and r^2 expands like [2] = 2 cos h
    assert taylor_q1(S_R * S_R, 4) == taylor_q1(qint(2), 4)


def test_qint_taylor_limit():
    # [n] -> n with the first correction -n(n^2-1)/6 * h^2
    for n in (2, 3, 5):
        h = taylor_q1(qint(n), 2)
        assert h.coeff(0) == SurdRational(n)
        assert h.coeff(2) == SurdRational(Fraction(-n * (n * n - 1), 6))


def test_hseries_arithmetic_roundtrip():
    a = taylor_q1(qint(3), 6)
    b = taylor_q1(qint(2) + S_T, 6)
    assert (a * b) / b == a.truncate((a * b / b).prec)


def test_scalar_str_deterministic():
    x = -S_I * S_T * Scalar.q_power(1)
    assert str(x) == str(-S_I * S_T * Scalar.q_power(1))
    assert "t" in str(x)
