"""Constraint reduction: Dirac matrix, per-mode inversion, reduced bracket.

Two second-class constraints freeze the step-raising direction of the
current algebra; the bracket of the surviving lowering current is then
corrected by the chain {A, chi_i} (Delta^-1)_ij {chi_j, B}.  Translation
covariance makes every contour pairing diagonal in modes, so the whole
reduction is an exact per-mode computation: a 2x2 inversion followed by
coefficient products.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .qcoeff import S_I, S_ONE, S_R, S_T, S_ZERO, Scalar, q_minus_qinv, qint
from .distcalc import Dist2, ModeWindow, pair
from .currents import (
    BracketTable,
    FieldFactor,
    TermSum,
    classical_bracket,
    classical_bracket_table,
    q_bracket_table,
)
from .report import CheckRecord, DOCUMENTED, compare_dists, record


class SingularModeError(ArithmeticError):
    """The constraint matrix is singular at some retained mode."""

    def __init__(self, mode):
        super().__init__(f"constraint matrix is singular at mode {mode}")
        self.mode = mode


class SubstitutionError(ValueError):
    """On-surface substitution left non-constant field content."""


class UnknownScenarioError(ValueError):
    """No such scenario key is registered."""


# ---------------------------------------------------------------------------
# Constraints and scenarios
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstraintSet:
    """The two constraints, their symbols, and the on-surface substitution."""

    chi1_symbol: str
    chi2_symbol: str
    chi1: TermSum
    chi2: TermSum
    on_surface: dict

    def symbols(self):
        return (self.chi1_symbol, self.chi2_symbol)

    def idempotent(self) -> bool:
        once = {k: v for k, v in self.on_surface.items()}
        for T in (self.chi1, self.chi2):
            if T.substitute(once).substitute(once) != T.substitute(once):
                return False
        return True

    def vanish_on_surface(self) -> bool:
        return (self.chi1.substitute(self.on_surface).is_zero()
                and self.chi2.substitute(self.on_surface).is_zero())


def _unit_term(symbol, coef, N):
    return ((FieldFactor(symbol, "z"),), 0, Dist2.unit0(N, coef))


def q_constraints(N: int = 1) -> ConstraintSet:
    norm = S_ONE / (S_T * q_minus_qinv())
    chi1 = TermSum([_unit_term("Psi", norm, N), _unit_term("Phi", -norm, N)])
    chi2 = TermSum([_unit_term("E+", S_ONE, N), ((), 0, Dist2.unit0(N, -S_ONE))])
    return ConstraintSet("chi1", "E+", chi1, chi2,
                         {"Psi": 1, "Phi": 1, "E+": 1})


def classical_constraints(N: int = 1) -> ConstraintSet:
    chi1 = TermSum([_unit_term("H", S_ONE, N)])
    chi2 = TermSum([_unit_term("E+", S_ONE, N), ((), 0, Dist2.unit0(N, -S_ONE))])
    return ConstraintSet("H", "E+", chi1, chi2, {"H": 0, "E+": 1})


@dataclass(frozen=True)
class AffineMap:
    """Affine redefinition Et- = a*E- + b of the surviving current.

    The reduced-bracket comparisons only ever need the rational-sector
    products a^2, a*b, b^2; the full surd-valued a and b are kept so the
    stored products can be validated against the field tower.
    """

    a: Scalar
    b: Scalar
    a2: Scalar
    ab: Scalar
    b2: Scalar

    @classmethod
    def standard(cls) -> "AffineMap":
        dq = q_minus_qinv()
        two = Scalar.from_rat(2)
        half = Scalar.from_rat(Fraction(1, 2))
        a = dq * dq * S_R * S_T * half                 # (q-1/q)^2 sqrt([2]/2)
        b = two * S_T * S_R / qint(2)                  # 4/sqrt(2[2])
        a2 = dq ** 4 * qint(2) * half
        ab = two * dq * dq
        b2 = Scalar.from_rat(8) / qint(2)
        return cls(a, b, a2, ab, b2)

    def consistent(self) -> bool:
        return (self.a * self.a == self.a2
                and self.a * self.b == self.ab
                and self.b * self.b == self.b2)


@dataclass(frozen=True)
class Scenario:
    key: str
    table: BracketTable
    constraints: ConstraintSet
    current: str
    affine: AffineMap | None


SCENARIO_KEYS = ("classical-sl2", "q-sl2")


def scenario(key: str, weighted: bool = False, weight_exponent: int = 2) -> Scenario:
    """Registry of the two reduction scenarios."""
    if key == "q-sl2":
        table = q_bracket_table()
        if weighted:
            table = table.with_weight(weight_exponent)
        return Scenario(key, table, q_constraints(), "E-", AffineMap.standard())
    if key == "classical-sl2":
        if weighted:
            raise UnknownScenarioError("the undeformed scenario takes no mode weight")
        return Scenario(key, classical_bracket_table(1), classical_constraints(),
                        "E-", None)
    raise UnknownScenarioError(f"unknown scenario {key!r}; known: {SCENARIO_KEYS}")


# ---------------------------------------------------------------------------
# The Dirac matrix
# ---------------------------------------------------------------------------

class DiracMatrix:
    """2x2 matrix of c-number distributions on the constraint surface."""

    __slots__ = ("N", "e")

    def __init__(self, d11: Dist2, d12: Dist2, d21: Dist2, d22: Dist2):
        N = d11.N
        if not (d12.N == d21.N == d22.N == N):
            raise ValueError("entries live on different windows")
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "e", ((d11, d12), (d21, d22)))

    def __setattr__(self, name, value):
        raise AttributeError("DiracMatrix is immutable")

    def entry(self, i: int, j: int) -> Dist2:
        return self.e[i][j]

    def mode_matrix(self, n: int):
        return ((self.e[0][0].coeff(n), self.e[0][1].coeff(n)),
                (self.e[1][0].coeff(n), self.e[1][1].coeff(n)))

    def det(self, n: int) -> Scalar:
        (a, b), (c, d) = self.mode_matrix(n)
        return a * d - b * c

    def __eq__(self, other):
        if not isinstance(other, DiracMatrix):
            return NotImplemented
        return all(self.e[i][j] == other.e[i][j] for i in (0, 1) for j in (0, 1))


def _onsurface_cnumber(a: str, b: str, table, constraints, W) -> Dist2:
    T = classical_bracket(a, b, table, W).substitute(constraints.on_surface)
    if T.is_zero():
        return Dist2.zero(W.N)
    try:
        return T.field_free_dist()
    except ValueError as err:
        raise SubstitutionError(
            f"bracket ({a}, {b}) is not a c-number on the surface: {err}") from err


def build_dirac_matrix(table: BracketTable, constraints: ConstraintSet,
                       W: ModeWindow) -> DiracMatrix:
    """Mutual constraint brackets with the on-surface substitution applied."""
    c1, c2 = constraints.symbols()
    d11 = _onsurface_cnumber(c1, c1, table, constraints, W)
    d12 = _onsurface_cnumber(c1, c2, table, constraints, W)
    d22 = _onsurface_cnumber(c2, c2, table, constraints, W)
    d21 = -(d12.reflect())
    return DiracMatrix(d11, d12, d21, d22)


def invert(dm: DiracMatrix, W: ModeWindow) -> DiracMatrix:
    """Per-mode 2x2 inversion; raises SingularModeError naming the first
    singular mode."""
    inv = [[{}, {}], [{}, {}]]
    for n in W.modes():
        (a, b), (c, d) = dm.mode_matrix(n)
        det = a * d - b * c
        if det.is_zero():
            raise SingularModeError(n)
        idet = det.inverse()
        for (i, j), v in (((0, 0), d), ((0, 1), -b), ((1, 0), -c), ((1, 1), a)):
            v = v * idet
            if not v.is_zero():
                inv[i][j][n] = v
    return DiracMatrix(Dist2(W.N, inv[0][0]), Dist2(W.N, inv[0][1]),
                       Dist2(W.N, inv[1][0]), Dist2(W.N, inv[1][1]))


def matrix_pair(A: DiracMatrix, B: DiracMatrix) -> list[list[Dist2]]:
    """Contour pairing of two matrix distributions (mode-diagonal chain)."""
    out = []
    for i in (0, 1):
        row = []
        for k in (0, 1):
            acc = pair(A.entry(i, 0), B.entry(0, k)) + pair(A.entry(i, 1), B.entry(1, k))
            row.append(acc)
        out.append(row)
    return out


# ---------------------------------------------------------------------------
# The reduced bracket
# ---------------------------------------------------------------------------

def reduce(current: str, table: BracketTable, constraints: ConstraintSet,
           W: ModeWindow) -> TermSum:
    """Dirac bracket of the surviving current with itself: the direct
    bracket minus the constraint-chain correction, all on-surface."""
    dm = build_dirac_matrix(table, constraints, W)
    dinv = invert(dm, W)
    direct = classical_bracket(current, current, table, W).substitute(
        constraints.on_surface)
    syms = constraints.symbols()
    correction = TermSum.zero()
    for i, ci in enumerate(syms):
        Ti = classical_bracket(current, ci, table, W).substitute(constraints.on_surface)
        for j, cj in enumerate(syms):
            Tj = classical_bracket(cj, current, table, W).substitute(constraints.on_surface)
            for (mono_i, zi), di in Ti.terms.items():
                for (mono_j, zj), dj in Tj.terms.items():
                    if zi or zj:
                        raise SubstitutionError("constraint-chain terms must be degree-free")
                    dist = pair(pair(di, dinv.entry(i, j)), dj)
                    correction = correction + TermSum.single(mono_i + mono_j, dist)
    return direct - correction


@dataclass(frozen=True)
class ReducedContents:
    """The three contents of the reduced bracket in the current's variables."""

    quad: Dist2     # E(z)E(w) coefficient
    lin_z: Dist2    # E(z) coefficient
    lin_w: Dist2    # E(w) coefficient
    cnum: Dist2     # field-free part


def split_reduced(T: TermSum, current: str, N: int) -> ReducedContents:
    quad = lin_z = lin_w = cnum = Dist2.zero(N)
    fz = FieldFactor(current, "z")
    fw = FieldFactor(current, "w")
    for (mono, zdeg), dist in T.terms.items():
        if zdeg != 0:
            raise ValueError("reduced bracket should carry no z-degree")
        key = tuple(sorted(mono))
        if key == tuple(sorted((fz, fw))):
            quad = quad + dist
        elif key == (fz,):
            lin_z = lin_z + dist
        elif key == (fw,):
            lin_w = lin_w + dist
        elif key == ():
            cnum = cnum + dist
        else:
            raise ValueError(f"unexpected monomial in reduced bracket: {key}")
    return ReducedContents(quad, lin_z, lin_w, cnum)


# ---------------------------------------------------------------------------
# Expected closed forms
# ---------------------------------------------------------------------------

def reduced_quad_pattern(W: ModeWindow, weighted: bool) -> Dist2:
    """Quadratic kernel of the reduced bracket in x-orientation:
    -(i[2]/2)(q-1/q)^2 q^(-2|n|) [n]^2/[2n], weight dropped when absorbed."""
    pref = -(S_I * qint(2) * Scalar.from_rat(Fraction(1, 2))) * q_minus_qinv() ** 2

    def f(n):
        if n == 0:
            return S_ZERO
        v = pref * qint(n) * qint(n) / qint(2 * n)
        if not weighted:
            v = v * Scalar.q_power(-2 * abs(n))
        return v

    return Dist2.from_func(W.N, f)


def reduced_central_pattern(W: ModeWindow, weighted: bool) -> Dist2:
    """Central kernel in x-orientation: +i (q-1/q)^2 q^(-2|n|) [2n]."""
    pref = S_I * q_minus_qinv() ** 2

    def g(n):
        if n == 0:
            return S_ZERO
        v = pref * qint(2 * n)
        if not weighted:
            v = v * Scalar.q_power(-2 * abs(n))
        return v

    return Dist2.from_func(W.N, g)


def classical_linear_pattern(W: ModeWindow) -> Dist2:
    return Dist2.from_func(W.N, lambda n: -S_I * Scalar.from_rat(n))


def classical_central_pattern(W: ModeWindow) -> Dist2:
    return Dist2.from_func(
        W.N, lambda n: S_I * Scalar.from_rat(Fraction(n ** 3, 2)))


# ---------------------------------------------------------------------------
# Check suites
# ---------------------------------------------------------------------------

def _drop0(D: Dist2) -> Dist2:
    return Dist2(D.N, {n: v for n, v in D.c.items() if n != 0})


def affine_check(reduced: TermSum, amap: AffineMap, W: ModeWindow,
                 weighted: bool, current: str = "E-") -> list[CheckRecord]:
    """Compare the reduced bracket, rewritten through Et- = a E- + b, with
    the closed-form quadratic algebra; modes n != 0, with the zero mode
    reported separately."""
    tag = "qvir" if weighted else "qdirb"
    parts = split_reduced(reduced, current, W.N)
    out = []

    out.append(record("affine-map-consistency", "qdirb", amap.consistent(),
                      engine=f"a^2={amap.a2}, ab={amap.ab}, b^2={amap.b2}"))

    fpat = reduced_quad_pattern(W, weighted)
    gpat = reduced_central_pattern(W, weighted)

    out.append(compare_dists(f"reduce-quadratic[{tag}]", tag, _drop0(parts.quad), fpat))

    # linear content is absorbed exactly: a^2 * lin == a*b * quad
    lin_ok = (_drop0(parts.lin_z) == _drop0(parts.lin_w))
    scaled_lin = _drop0(parts.lin_z).scale(amap.a2)
    absorbed = _drop0(parts.quad).scale(amap.ab)
    r = compare_dists(f"reduce-linear-cancellation[{tag}]", tag, scaled_lin, absorbed)
    if not lin_ok:
        r = record(f"reduce-linear-cancellation[{tag}]", tag, False,
                   engine="lin_z != lin_w")
    out.append(r)

    # central content: a^2 * cnum == b^2 * quad_pattern + central_pattern
    lhs = _drop0(parts.cnum).scale(amap.a2)
    rhs = fpat.scale(amap.b2) + gpat
    out.append(compare_dists(f"reduce-central[{tag}]", tag, lhs, rhs))

    # the zero mode, documented with both exact values (once, on the
    # unweighted pass; the weighted bracket differs by an exact weight only)
    if not weighted:
        eng0 = (f"quad(0)={parts.quad.coeff(0)}, lin(0)={parts.lin_z.coeff(0)}, "
                f"cnum(0)={parts.cnum.coeff(0)}")
        zero_ok = (parts.quad.coeff(0).is_zero() and parts.lin_z.coeff(0).is_zero()
                   and parts.lin_w.coeff(0).is_zero() and parts.cnum.coeff(0).is_zero())
        out.append(CheckRecord(
            f"reduce-mode0[{tag}]", tag, DOCUMENTED, 0, eng0,
            "closed form is 0/0 at n=0 ([n]^2/[2n]); odd-limit reading gives 0"
            + ("; engine agrees" if zero_ok else "; engine value differs"),
        ))

    # surd-freeness of every final coefficient
    surd_free = all(
        v.is_rational_sector()
        for D in (parts.quad, parts.lin_z, parts.lin_w, parts.cnum)
        for v in D.c.values())
    out.append(record(f"reduce-rational-sector[{tag}]", tag, surd_free,
                      engine="all coefficients free of t and r" if surd_free
                      else "surd leakage detected"))
    return out


def printed_inverse_patterns(W: ModeWindow):
    """The printed entries of the inverse constraint matrix (modes n != 0)."""
    dq = q_minus_qinv()
    two_i = Scalar.from_rat(2) * S_I
    br2 = qint(2)

    def sign(n):
        return Scalar.from_rat(1 if n > 0 else -1)

    def inv11(n):
        if n == 0:
            return S_ZERO
        return -(two_i * dq / br2) * sign(n) * qint(n) / qint(2 * n)

    def inv12(n):
        if n == 0:
            return S_ZERO
        return -(two_i * S_T / br2) * Scalar.s_power(-abs(n)) * qint(n) / qint(2 * n)

    def inv22(n):
        if n == 0:
            return S_ZERO
        return (two_i / br2) * Scalar.q_power(-2 * abs(n)) * qint(n) ** 2 / qint(2 * n)

    return {
        (0, 0): Dist2.from_func(W.N, inv11),
        (0, 1): Dist2.from_func(W.N, inv12),
        (1, 0): Dist2.from_func(W.N, lambda n: -inv12(n)),
        (1, 1): Dist2.from_func(W.N, inv22),
    }


def dirac_suite(sc: Scenario, W: ModeWindow) -> list[CheckRecord]:
    """Build, compare, invert and pair the constraint matrix."""
    out = []
    table, constraints = sc.table, sc.constraints
    out.append(record("constraints-idempotent", "ain1/ain2",
                      constraints.idempotent() and constraints.vanish_on_surface()))
    dm = build_dirac_matrix(table, constraints, W)

    if sc.key == "q-sl2" and table.weight_exponent == 0:
        half2 = qint(2) * Scalar.from_rat(Fraction(1, 2))
        dq = q_minus_qinv()
        elem11 = Dist2.from_func(W.N, lambda n: -S_I * half2 * qint(n))
        elem12 = Dist2.from_func(
            W.N, lambda n: (-S_I * qint(2) * S_T * Scalar.from_rat(Fraction(1, 2))
                            * Scalar.s_power(3 * abs(n))) if n
            else -S_I * S_T * Scalar.q_power(1))
        elem22 = Dist2.from_func(
            W.N, lambda n: S_I * half2 * dq * Scalar.from_rat(1 if n > 0 else -1)
            * Scalar.q_power(2 * abs(n)) if n else S_ZERO)
        out.append(compare_dists("dirac-matrix-11", "elem1", dm.entry(0, 0), elem11))
        out.append(compare_dists("dirac-matrix-12", "elem2", dm.entry(0, 1), elem12))
        out.append(compare_dists("dirac-matrix-21", "elem2", dm.entry(1, 0), -(elem12.reflect())))
        out.append(compare_dists("dirac-matrix-22", "elem3", dm.entry(1, 1), elem22))
    elif sc.key == "classical-sl2":
        elem11 = Dist2.from_func(W.N, lambda n: -S_I * Scalar.from_rat(n))
        elem12 = Dist2.from_func(W.N, lambda n: -S_I * S_T)
        out.append(compare_dists("dirac-matrix-11", "cor1", dm.entry(0, 0), elem11))
        out.append(compare_dists("dirac-matrix-12", "cor2", dm.entry(0, 1), elem12))
        out.append(compare_dists("dirac-matrix-22", "cor-trivial", dm.entry(1, 1),
                                 Dist2.zero(W.N)))

    try:
        dinv = invert(dm, W)
        out.append(record("dirac-invertible", "inver", True,
                          engine=f"det(0) = {dm.det(0)}"))
    except SingularModeError as err:
        out.append(record("dirac-invertible", "inver", False, mode=err.mode,
                          engine=str(err)))
        return out

    prod = matrix_pair(dm, dinv)
    ident_ok = (prod[0][0] == Dist2.delta(W.N) and prod[1][1] == Dist2.delta(W.N)
                and prod[0][1].is_zero() and prod[1][0].is_zero())
    out.append(record("dirac-pairing-identity", "inver", ident_ok,
                      engine="Delta * Delta^-1 = delta identity on all modes"
                      if ident_ok else str(prod)))
    out.append(record("dirac-invert-involution", "inver",
                      invert(dinv, W) == dm))

    if sc.key == "q-sl2" and sc.table.weight_exponent == 0:
        printed = printed_inverse_patterns(W)
        names = {(0, 0): "11", (0, 1): "12", (1, 0): "21", (1, 1): "22"}
        for ij, pat in printed.items():
            got = _drop0(dinv.entry(*ij))
            out.append(compare_dists(f"dirac-inverse-{names[ij]}", "inver/printed",
                                     got, _drop0(pat)))
        # the zero mode of the printed inverse: documented discrepancy
        (m00, m01), (m10, m11) = dinv.mode_matrix(0)
        eng0 = f"(({m00}, {m01}), ({m10}, {m11}))"
        printed0 = "((0, 0), (0, 0)) as printed (strict n>0 sums)"
        limit0 = ("((0, -2i*sqrt2/[2]), (2i*sqrt2/[2], 0)) under an n>=0 "
                  "limit reading; neither satisfies the pairing identity at n=0")
        out.append(CheckRecord("dirac-inverse-mode0", "inver", DOCUMENTED, 0,
                               eng0, printed0 + "; " + limit0))
    return out


def reduce_suite(sc: Scenario, W: ModeWindow) -> list[CheckRecord]:
    """Run the reduction and compare with the closed forms."""
    out = []
    reduced = reduce(sc.current, sc.table, sc.constraints, W)

    ok = reduced.reflect() == -reduced
    out.append(record("reduce-antisymmetry", "dirb", ok))

    if sc.key == "classical-sl2":
        parts = split_reduced(reduced, sc.current, W.N)
        out.append(compare_dists("reduce-linear-z", "virasoro", parts.lin_z,
                                 classical_linear_pattern(W)))
        out.append(compare_dists("reduce-linear-w", "virasoro", parts.lin_w,
                                 classical_linear_pattern(W)))
        out.append(compare_dists("reduce-central", "virasoro", parts.cnum,
                                 classical_central_pattern(W)))
        out.append(record("reduce-no-quadratic", "virasoro", parts.quad.is_zero(),
                          engine=str(parts.quad)))
    else:
        weighted = sc.table.weight_exponent != 0
        out.extend(affine_check(reduced, sc.affine, W, weighted, sc.current))
    return out
