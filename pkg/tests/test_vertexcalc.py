"""Contractions, exchange relations, fusion, and the opposite-charge OPE."""

from fractions import Fraction

import pytest

from qvir.qcoeff import S_ONE, S_T, S_ZERO, Scalar, q_minus_qinv, qint
from qvir.distcalc import Dist2, ModeWindow, RatKernel, expand_inner, region_difference
from qvir.vertexcalc import (
    ReconstructionError,
    contract,
    contraction_kernel,
    exchange_kernel,
    exp_series,
    fuse,
    h_e_commutator_dist,
    h_e_contraction,
    h_h_contraction,
    oscillator_norm,
    reconstruct_kernel,
    standard_fields,
    verify_ee_ope,
    verify_exchange,
)
from qvir.report import FAIL

W = ModeWindow(10)
F = standard_fields()
Q = Scalar.q_power
SP = Scalar.s_power


def spow(k):
    return Scalar.s_power(k)


def all_pass(records):
    bad = [r for r in records if r.status == FAIL]
    assert not bad, "\n".join(f"{r.id} mode={r.mode}: {r.engine_value} != {r.expected_value}" for r in bad)


# ---------------------------------------------------------------------------
# exchange kernels as exact rational data
# ---------------------------------------------------------------------------

def kernel_step_pair():
    # (1 - q^3 x)(1 - q^-3 x) / ((1 - q x)(1 - q^-1 x))
    return RatKernel.from_linear_factors(S_ONE, 0, [Q(3), Q(-3)], [Q(1), Q(-1)])


def kernel_step_vertex(sign):
    # q^(2 sign) (1 - q^(-5 sign/2) x) / (1 - q^(3 sign/2) x)
    return RatKernel.from_linear_factors(Q(2 * sign), 0, [SP(-5 * sign)], [SP(3 * sign)])


def kernel_self_exchange(sign):
    # q^(2 sign) (1 - q^(-2 sign) x) / (1 - q^(2 sign) x)
    return RatKernel.from_linear_factors(Q(2 * sign), 0, [Q(-2 * sign)], [Q(2 * sign)])


# ---------------------------------------------------------------------------
# exp / reconstruct machinery
# ---------------------------------------------------------------------------

def test_exp_series_geometric():
    # exp(sum x^n/n) = 1/(1-x)
    log = Dist2(W.N, {n: Scalar.from_rat(Fraction(1, n)) for n in range(1, W.N + 1)})
    E = exp_series(log)
    for n in range(0, W.N + 1):
        assert E.coeff(n) == S_ONE


def test_reconstruct_two_pole_kernel():
    K = RatKernel.from_linear_factors(S_ONE, 0, [], [Q(1), Q(-1)])
    series = expand_inner(K, W)
    R = reconstruct_kernel(series)
    assert R == K


def test_reconstruct_failure():
    # [n]^2 coefficients are not a rational function of small degree
    series = Dist2(W.N, {n: qint(n) * qint(n) * qint(n) for n in range(0, W.N + 1)})
    with pytest.raises(ReconstructionError):
        reconstruct_kernel(series, max_deg=2)


# ---------------------------------------------------------------------------
# contractions
# ---------------------------------------------------------------------------

def test_oscillator_norm_is_ope_entry():
    for n in range(1, W.N + 1):
        assert oscillator_norm(n) == qint(2 * n) * qint(n) / Scalar.from_rat(2 * n)


def test_h_h_contraction():
    D = h_h_contraction(W)
    for n in W.modes():
        want = oscillator_norm(n) if n >= 1 else S_ZERO
        assert D.coeff(n) == want


def test_contract_psi_psi_trivial():
    L = contract(F["Psi"], F["Psi"], W)
    assert L.series.is_zero()
    assert L.prefactor == S_ONE
    assert L.zdeg == 0


def test_contract_psi_eplus_prefactor():
    L = contract(F["Psi"], F["E+"], W)
    assert L.prefactor == Q(2)
    assert L.zdeg == 0


def test_contract_regular_orders():
    # all of these orderings have no oscillator contraction at all
    for a, b, const in (
        ("Phi", "Psi", S_ONE),    # creation-only then annihilation-only
        ("E+", "Psi", S_ONE),
        ("E-", "Psi", S_ONE),
        ("Phi", "E+", Q(-2)),     # zero-mode factor only
        ("Phi", "E-", Q(2)),
    ):
        L = contract(F[a], F[b], W)
        assert L.series.is_zero(), (a, b)
        assert L.prefactor == const, (a, b)
        assert L.zdeg == 0


def test_contract_ee_opposite_kernel():
    # E^+(z)E^-(w) contracts to z^-2 / ((1-qx)(1-x/q))
    data = contraction_kernel(F["E+"], F["E-"], W)
    assert data.const == S_ONE
    assert data.zdeg == -2
    assert data.kernel == RatKernel.from_linear_factors(S_ONE, 0, [], [Q(1), Q(-1)])


def test_contract_ee_same_kernel_is_polynomial():
    # E^+(z)E^+(w) contracts to (z-w)(z-w/q^2) = z^2 (1-x)(1-x/q^2)
    data = contraction_kernel(F["E+"], F["E+"], W)
    assert data.zdeg == 2
    assert data.kernel == RatKernel.from_linear_factors(S_ONE, 0, [Q(0), Q(-2)], [])


# ---------------------------------------------------------------------------
# exchange relations
# ---------------------------------------------------------------------------

def test_exchange_psi_phi():
    all_pass(verify_exchange(F["Psi"], F["Phi"], kernel_step_pair(), W, "ope1", "x"))


@pytest.mark.parametrize("sign", (+1, -1))
def test_exchange_psi_e(sign):
    E = F["E+"] if sign > 0 else F["E-"]
    all_pass(verify_exchange(F["Psi"], E, kernel_step_vertex(sign), W, "ope2", "x"))


@pytest.mark.parametrize("sign", (+1, -1))
def test_exchange_e_phi(sign):
    E = F["E+"] if sign > 0 else F["E-"]
    all_pass(verify_exchange(E, F["Phi"], kernel_step_vertex(sign), W, "ope3", "x"))


@pytest.mark.parametrize("sign", (+1, -1))
def test_exchange_e_e_same(sign):
    E = F["E+"] if sign > 0 else F["E-"]
    all_pass(verify_exchange(E, E, kernel_self_exchange(sign), W, "ncom", "x"))


def test_exchange_psi_psi_trivial_kernel():
    all_pass(verify_exchange(F["Psi"], F["Psi"], RatKernel.const(S_ONE), W, "trivial", "x"))
    all_pass(verify_exchange(F["Phi"], F["Phi"], RatKernel.const(S_ONE), W, "trivial", "x"))


def test_exchange_wrong_kernel_fails():
    bad = RatKernel.from_linear_factors(S_ONE, 0, [Q(2)], [Q(1)])
    records = verify_exchange(F["Psi"], F["Phi"], bad, W, "ope1", "x")
    assert any(r.status == FAIL for r in records)


def test_exchange_kernel_engine_value():
    K = exchange_kernel(F["Psi"], F["Phi"], W)
    assert K == kernel_step_pair()


# ---------------------------------------------------------------------------
# fusion
# ---------------------------------------------------------------------------

def test_fuse_to_raising_field():
    got = fuse(F["E+"], F["E-"], +2, W)     # z = w*q
    assert got.matches(F["Psi"].shifted(+1), W)


def test_fuse_to_lowering_field():
    got = fuse(F["E+"], F["E-"], -2, W)     # z = w/q
    assert got.matches(F["Phi"].shifted(-1), W)


def test_fuse_with_inverse_exponent_is_identity():
    A = F["E+"]
    Ainv = type(A)("E+inv", -A.beta, A.form)
    got = fuse(A, Ainv, 0, W)
    assert got.is_identity(W)


def test_fuse_mismatch_detected():
    got = fuse(F["E+"], F["E-"], +2, W)
    assert not got.matches(F["Phi"].shifted(-1), W)


# ---------------------------------------------------------------------------
# the opposite-charge operator product
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("sign", (+1, -1))
def test_ee_ope_suite(sign):
    all_pass(verify_ee_ope(W, sign))


def test_ee_region_difference_is_shifted_delta_pair():
    # independent: [n+1] = (q*q^n - q^-1 q^-n)/(q - 1/q), the weighted delta pair
    data = contraction_kernel(F["E+"], F["E-"], W)
    D = region_difference(data.kernel, W)
    dq = q_minus_qinv()
    for n in W.modes():
        want = (Q(1) * Q(n) - Q(-1) * Q(-n)) / dq
        assert D.coeff(n) == want


# ---------------------------------------------------------------------------
# diagonal-current entries by contraction linearity
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("sign", (+1, -1))
def test_h_e_contraction_entry(sign):
    D = h_e_contraction(sign, W)
    rt2 = Scalar.from_rat(sign) * S_T
    for n in W.modes():
        if n < 0:
            want = S_ZERO
        elif n == 0:
            want = rt2
        else:
            want = rt2 * SP(-sign * n) * qint(2 * n) / Scalar.from_rat(2 * n)
        assert D.coeff(n) == want


@pytest.mark.parametrize("sign", (+1, -1))
def test_h_e_commutator_even_pattern(sign):
    D = h_e_commutator_dist(sign, W)
    rt2 = Scalar.from_rat(sign) * S_T
    assert D.coeff(0) == rt2
    for n in range(1, W.N + 1):
        want = rt2 * SP(-sign * n) * qint(2 * n) / Scalar.from_rat(2 * n)
        assert D.coeff(n) == want
        assert D.coeff(-n) == want
