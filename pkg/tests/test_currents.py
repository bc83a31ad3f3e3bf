"""Derived commutators vs their printed forms, bracket tables, mode algebra."""

from fractions import Fraction

import pytest

from qvir.qcoeff import S_I, S_ONE, S_T, S_ZERO, Scalar, q_minus_qinv, qint
from qvir.distcalc import Dist2, ModeWindow
from qvir.currents import (
    FieldFactor,
    KacMoodyLevel,
    MissingPairError,
    TermSum,
    classical_bracket,
    classical_bracket_table,
    field_commutator,
    modes_from_ope,
    opposite_charge_bracket,
    printed_pair_exchange_bracket,
    q_bracket_table,
    verify_commutator_antisymmetry,
    verify_commutators,
    verify_serre_mode_equivalence,
)
from qvir.report import FAIL
from qvir.vertexcalc import standard_fields

W = ModeWindow(8)
Q = Scalar.q_power
SP = Scalar.s_power
HALF = Scalar.from_rat(Fraction(1, 2))


def all_pass(records):
    bad = [r for r in records if r.status == FAIL]
    assert not bad, "\n".join(
        f"{r.id} mode={r.mode}: {r.engine_value} != {r.expected_value}" for r in bad)


# ---------------------------------------------------------------------------
# TermSum mechanics
# ---------------------------------------------------------------------------

def test_termsum_merges_like_monomials():
    d1 = Dist2.from_func(W.N, lambda n: qint(n))
    d2 = Dist2.from_func(W.N, lambda n: -qint(n))
    mono = (FieldFactor("E-", "z"), FieldFactor("E-", "w"))
    T = TermSum([(mono, 0, d1), (tuple(reversed(mono)), 0, d2)])
    assert T.is_zero()


def test_termsum_reflect_is_involution():
    mono = (FieldFactor("Psi", "z"), FieldFactor("Phi", "w"))
    T = TermSum.single(mono, Dist2.from_func(W.N, lambda n: Q(n)))
    assert T.reflect().reflect() == T


def test_termsum_substitute():
    T = TermSum.single((FieldFactor("Psi", "z"), FieldFactor("E-", "w")),
                       Dist2.delta(W.N))
    S = T.substitute({"Psi": 1, "Phi": 1, "E+": 1})
    assert list(S.terms) == [((FieldFactor("E-", "w"),), 0)]
    assert T.substitute({"E-": 0}).is_zero()


# ---------------------------------------------------------------------------
# derived vs printed commutators
# ---------------------------------------------------------------------------

def test_commutator_suite_passes():
    all_pass(verify_commutators(W))


def test_commutator_antisymmetry():
    all_pass(verify_commutator_antisymmetry(W))


def test_constraint_pair_bracket_values():
    # the positive-mode half carries ([2]/2)[n] on the (Psi@z, Phi@w) monomial
    T = printed_pair_exchange_bracket(W)
    key = ((FieldFactor("Phi", "w"), FieldFactor("Psi", "z")), 0)
    assert key in T.terms
    d = T.terms[key]
    for n in range(1, W.N + 1):
        assert d.coeff(n) == qint(2) * HALF * qint(n)
        assert d.coeff(-n) == S_ZERO


def test_derived_ee_same_collapses_to_polynomial():
    # [E^+(z), E^+(w)] resummed equals (1 - q^-2)(z^2 - w^2) :E E:
    F = standard_fields()
    T = field_commutator(F["E+"], F["E+"], ModeWindow(W.N + 4)).truncate(W.N)
    assert len(T.terms) == 1
    (key, dist), = T.terms.items()
    assert key[1] == 2
    c = S_ONE - Q(-2)
    want = Dist2(W.N, {0: c, 2: -c})
    assert dist == want


# ---------------------------------------------------------------------------
# bracket tables
# ---------------------------------------------------------------------------

def test_sigma_map():
    table = q_bracket_table()
    assert table.sigma("E+", "E+") == S_I
    assert table.sigma("E-", "E-") == S_I
    assert table.sigma("E+", "E-") == -S_I
    assert table.sigma("chi1", "chi1") == -S_I
    assert table.sigma("chi1", "E+") == -S_I


def test_missing_pair_raises():
    with pytest.raises(MissingPairError):
        classical_bracket("chi1", "H", q_bracket_table(), W)


def test_classical_bracket_antisymmetry():
    table = q_bracket_table()
    for a, b in table.pairs():
        ab = classical_bracket(a, b, table, W)
        ba = classical_bracket(b, a, table, W)
        assert ab == -(ba.reflect()), (a, b)


def test_step_same_bracket_merged():
    # {E-, E-}: one commutative monomial, odd q^(-2|n|)-weighted distribution
    T = classical_bracket("E-", "E-", q_bracket_table(), W)
    assert len(T.terms) == 1
    (key, d), = T.terms.items()
    assert key == (((FieldFactor("E-", "w"), FieldFactor("E-", "z"))), 0) or \
           key == (((FieldFactor("E-", "z"), FieldFactor("E-", "w"))), 0)
    pref = -S_I * qint(2) * HALF * q_minus_qinv()
    assert d.coeff(0) == S_ZERO
    for n in range(1, W.N + 1):
        assert d.coeff(n) == pref * Q(-2 * n)
        assert d.coeff(-n) == -(pref * Q(-2 * n))


def test_classical_table_hh():
    # undeformed: {H(z), H(w)} = -i k sum n x^n
    for k in (1, 2):
        T = classical_bracket("H", "H", classical_bracket_table(k), W)
        d = T.field_free_dist()
        for n in W.modes():
            assert d.coeff(n) == -S_I * Scalar.from_rat(k * n)


def test_classical_table_he_field_at_second_slot():
    T = classical_bracket("H", "E+", classical_bracket_table(1), W)
    (key, d), = T.terms.items()
    assert key == ((FieldFactor("E+", "w"),), 0)
    for n in W.modes():
        assert d.coeff(n) == -S_I * S_T


def test_weighted_table():
    table = q_bracket_table().with_weight(2)
    T = classical_bracket("E-", "E-", table, W)
    (key, d), = T.terms.items()
    base = classical_bracket("E-", "E-", q_bracket_table(), W)
    (_, d0), = base.terms.items()
    for n in W.modes():
        assert d.coeff(n) == Q(2 * abs(n)) * d0.coeff(n)


def test_opposite_charge_bracket_on_surface():
    # with the step operators erased the delta pair collapses to -+[n]
    T = opposite_charge_bracket(+1, W).substitute({"Psi": 1, "Phi": 1})
    d = T.field_free_dist()
    for n in W.modes():
        assert d.coeff(n) == qint(n)


# ---------------------------------------------------------------------------
# mode algebra
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("k", (1, 2, 3))
def test_modes_from_ope(k):
    all_pass(modes_from_ope(KacMoodyLevel(k), W))


def test_hh_mode_value_k2():
    level = KacMoodyLevel(2)
    n = 3
    assert level.hh(n) == qint(2 * n) * qint(2 * n) / Scalar.from_rat(2 * n)


def test_serre_mode_equivalence():
    all_pass(verify_serre_mode_equivalence(W))
