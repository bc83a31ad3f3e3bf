"""Exact arithmetic in the coefficient field tower Q(i)(s)[t, r].

``s`` is a formal square root of the deformation parameter ``q``, so every
half-integer power of q is a monomial in s.  ``t`` and ``r`` are formal
surds with t^2 = 2 and r^2 = q + 1/q; they stay symbolic until one of the
two degeneration maps is applied:

* :func:`eval_q1` substitutes s = 1 (keeping t formal, with r -> t),
* :func:`taylor_q1` expands in h after substituting s = exp(i h / 2).

All values are immutable; equality is exact and decidable through a
canonical form (gcd-reduced rational functions with a normalized
denominator).
"""

from __future__ import annotations

from fractions import Fraction


class PoleAtQ1Error(ArithmeticError):
    """The value has a genuine pole at q = 1 (use taylor_q1 instead)."""


# ---------------------------------------------------------------------------
# Gaussian rationals
# ---------------------------------------------------------------------------

class GaussianRational:
    """A number a + b*i with exact rational a, b."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", re if type(re) is Fraction else Fraction(re))
        object.__setattr__(self, "im", im if type(im) is Fraction else Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    def is_zero(self):
        return self.re == 0 and self.im == 0

    def __add__(self, other):
        other = _as_gaussian(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_gaussian(other)
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _as_gaussian(other) - self

    def __mul__(self, other):
        other = _as_gaussian(other)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def inverse(self):
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("inverse of zero Gaussian rational")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        return self * _as_gaussian(other).inverse()

    def __rtruediv__(self, other):
        return _as_gaussian(other) * self.inverse()

    def __eq__(self, other):
        try:
            other = _as_gaussian(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        im = "i" if abs(self.im) == 1 else f"{abs(self.im)}*i"
        if self.re == 0:
            return im if self.im > 0 else "-" + im
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{im}"

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"


def _as_gaussian(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to GaussianRational")


G_ZERO = GaussianRational(0)
G_ONE = GaussianRational(1)
G_I = GaussianRational(0, 1)


# ---------------------------------------------------------------------------
# Laurent polynomials in s
# ---------------------------------------------------------------------------

class LaurentPoly:
    """Laurent polynomial in s with GaussianRational coefficients."""

    __slots__ = ("c",)

    def __init__(self, coeffs=None):
        c = {}
        if coeffs:
            for k, v in coeffs.items():
                v = _as_gaussian(v)
                if not v.is_zero():
                    c[k] = v
        object.__setattr__(self, "c", c)

    def __setattr__(self, name, value):
        raise AttributeError("LaurentPoly is immutable")

    @classmethod
    def const(cls, v):
        return cls({0: _as_gaussian(v)})

    @classmethod
    def monomial(cls, exp, coef=G_ONE):
        return cls({exp: _as_gaussian(coef)})

    def is_zero(self):
        return not self.c

    def valuation(self):
        if not self.c:
            raise ValueError("valuation of zero polynomial")
        return min(self.c)

    def degree(self):
        if not self.c:
            raise ValueError("degree of zero polynomial")
        return max(self.c)

    def __add__(self, other):
        out = dict(self.c)
        for k, v in other.c.items():
            w = out.get(k, G_ZERO) + v
            if w.is_zero():
                out.pop(k, None)
            else:
                out[k] = w
        return LaurentPoly(out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return LaurentPoly({k: -v for k, v in self.c.items()})

    def __mul__(self, other):
        out = {}
        for k1, v1 in self.c.items():
            for k2, v2 in other.c.items():
                k = k1 + k2
                w = out.get(k, G_ZERO) + v1 * v2
                if w.is_zero():
                    out.pop(k, None)
                else:
                    out[k] = w
        return LaurentPoly(out)

    def scale(self, g):
        g = _as_gaussian(g)
        return LaurentPoly({k: v * g for k, v in self.c.items()})

    def shift(self, d):
        return LaurentPoly({k + d: v for k, v in self.c.items()})

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.c == other.c

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    def eval_one(self):
        """Value at s = 1."""
        total = G_ZERO
        for v in self.c.values():
            total = total + v
        return total

    def subst_qinv(self):
        """Apply s -> 1/s (i.e. q -> 1/q)."""
        return LaurentPoly({-k: v for k, v in self.c.items()})

    def __str__(self):
        if not self.c:
            return "0"
        parts = []
        for k in sorted(self.c, reverse=True):
            v = self.c[k]
            vs = str(v)
            if ("+" in vs[1:]) or ("-" in vs[1:]):
                vs = f"({vs})"
            if k == 0:
                parts.append(vs)
            else:
                mono = "s" if k == 1 else f"s^{k}"
                parts.append(mono if vs == "1" else f"-{mono}" if vs == "-1" else f"{vs}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"LaurentPoly({self.c!r})"


LP_ZERO = LaurentPoly()
LP_ONE = LaurentPoly.const(1)


def _dense(p: LaurentPoly):
    """Shift to nonnegative exponents; return (valuation, coefficient list)."""
    v = p.valuation()
    d = p.degree()
    out = [G_ZERO] * (d - v + 1)
    for k, g in p.c.items():
        out[k - v] = g
    return v, out


def _trim(a):
    while a and a[-1].is_zero():
        a.pop()
    return a


def _poly_divmod(a, b):
    """Divide dense coefficient lists over the Gaussian rationals."""
    a = list(a)
    q = [G_ZERO] * max(0, len(a) - len(b) + 1)
    inv_lead = b[-1].inverse()
    for i in range(len(a) - len(b), -1, -1):
        f = a[i + len(b) - 1] * inv_lead
        if f.is_zero():
            continue
        q[i] = f
        for j, bj in enumerate(b):
            a[i + j] = a[i + j] - f * bj
    return _trim(q), _trim(a)


def _poly_gcd(a, b):
    """Monic gcd of dense coefficient lists.

    Every remainder is rescaled to be monic, which keeps the rational
    coefficients from exploding during the Euclidean descent.
    """
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        _, r = _poly_divmod(a, b)
        if r:
            inv_lead = r[-1].inverse()
            r = [x * inv_lead for x in r]
        a, b = b, r
    if not a:
        return [G_ONE]
    inv_lead = a[-1].inverse()
    return [x * inv_lead for x in a]


def _from_dense(v, coeffs):
    return LaurentPoly({v + i: g for i, g in enumerate(coeffs) if not g.is_zero()})


# ---------------------------------------------------------------------------
# Rational functions in s
# ---------------------------------------------------------------------------

class RatFunc:
    """Ratio of Laurent polynomials in s, kept in canonical form.

    The denominator is gcd-coprime to the numerator, has lowest exponent
    zero and leading (top) coefficient one; this makes equality a plain
    component comparison.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentPoly, den: LaurentPoly = LP_ONE, _canonical=False, _coprime=False):
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if not _canonical:
            num, den = _normalize(num, den, skip_gcd=_coprime)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RatFunc is immutable")

    @classmethod
    def const(cls, v):
        return cls(LaurentPoly.const(v), LP_ONE, _canonical=True)

    @classmethod
    def monomial(cls, exp, coef=G_ONE):
        return cls(LaurentPoly.monomial(exp, coef), LP_ONE, _canonical=True)

    def is_zero(self):
        return self.num.is_zero()

    def __add__(self, other):
        if self.num.is_zero():
            return other
        if other.num.is_zero():
            return self
        if self.den == other.den:
            if self.den == LP_ONE:
                return RatFunc(self.num + other.num, LP_ONE, _canonical=True)
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other):
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return -other
        if self.den == other.den:
            if self.den == LP_ONE:
                return RatFunc(self.num - other.num, LP_ONE, _canonical=True)
            return RatFunc(self.num - other.num, self.den)
        return RatFunc(self.num * other.den - other.num * self.den, self.den * other.den)

    def __neg__(self):
        return RatFunc(-self.num, self.den, _canonical=True)

    def __mul__(self, other):
        if self.num.is_zero() or other.num.is_zero():
            return RF_ZERO
        if self.den == LP_ONE and other.den == LP_ONE:
            return RatFunc(self.num * other.num, LP_ONE, _canonical=True)
        # cross-reduce before multiplying so degrees stay minimal
        n1, d2 = _cross_reduce(self.num, other.den)
        n2, d1 = _cross_reduce(other.num, self.den)
        return RatFunc(n1 * n2, d1 * d2, _coprime=True)

    def __truediv__(self, other):
        if other.num.is_zero():
            raise ZeroDivisionError("division by zero RatFunc")
        return self * RatFunc(other.den, other.num, _coprime=True)

    def __eq__(self, other):
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def eval_one(self):
        d = self.den.eval_one()
        if d.is_zero():
            raise PoleAtQ1Error("denominator vanishes at q = 1")
        return self.num.eval_one() / d

    def subst_qinv(self):
        return RatFunc(self.num.subst_qinv(), self.den.subst_qinv())

    def __str__(self):
        if self.den == LP_ONE:
            return str(self.num)
        ns, ds = str(self.num), str(self.den)
        if " " in ns:
            ns = f"({ns})"
        if " " in ds:
            ds = f"({ds})"
        return f"{ns}/{ds}"

    def __repr__(self):
        return f"RatFunc({self.num!r}, {self.den!r})"


def _normalize(num: LaurentPoly, den: LaurentPoly, skip_gcd=False):
    if num.is_zero():
        return LP_ZERO, LP_ONE
    vn, dn = _dense(num)
    vd, dd = _dense(den)
    if not skip_gcd and len(dd) > 1 and len(dn) > 1:
        g = _poly_gcd(dn, dd)
        if len(g) > 1:
            dn, _ = _poly_divmod(dn, g)
            dd, _ = _poly_divmod(dd, g)
    # fold the denominator's monomial into the numerator, scale top coeff to 1
    inv_lead = dd[-1].inverse()
    dd = [x * inv_lead for x in dd]
    dn = [x * inv_lead for x in dn]
    return _from_dense(vn - vd, dn), _from_dense(0, dd)


def _cross_reduce(p: LaurentPoly, q: LaurentPoly):
    """Divide out gcd(p, q); monomial parts are left untouched."""
    if q == LP_ONE or p.is_zero():
        return p, q
    vp, dp = _dense(p)
    vq, dq_ = _dense(q)
    if len(dp) == 1 or len(dq_) == 1:
        return p, q
    g = _poly_gcd(dp, dq_)
    if len(g) == 1:
        return p, q
    dp, _ = _poly_divmod(dp, g)
    dq_, _ = _poly_divmod(dq_, g)
    return _from_dense(vp, dp), _from_dense(vq, dq_)


RF_ZERO = RatFunc.const(0)
RF_ONE = RatFunc.const(1)
RF_TWO = RatFunc.const(2)
# r^2 = q + 1/q = s^2 + s^-2
RF_QBRACKET2 = RatFunc(LaurentPoly({2: G_ONE, -2: G_ONE}), LP_ONE, _canonical=True)


# ---------------------------------------------------------------------------
# The field tower element
# ---------------------------------------------------------------------------

class Scalar:
    """Element of Q(i)(s)[t, r] with t^2 = 2 and r^2 = s^2 + s^-2.

    Stored as four RatFunc components on the basis (1, t, r, t*r).
    """

    __slots__ = ("c",)

    def __init__(self, c0=RF_ZERO, c1=RF_ZERO, c2=RF_ZERO, c3=RF_ZERO):
        object.__setattr__(self, "c", (c0, c1, c2, c3))

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_rat(cls, v):
        return cls(RatFunc.const(v))

    @classmethod
    def from_gaussian(cls, g):
        return cls(RatFunc.const(_as_gaussian(g)))

    @classmethod
    def i(cls):
        return cls(RatFunc.const(G_I))

    @classmethod
    def t(cls):
        return cls(RF_ZERO, RF_ONE)

    @classmethod
    def r(cls):
        return cls(RF_ZERO, RF_ZERO, RF_ONE)

    @classmethod
    def s_power(cls, k, coef=G_ONE):
        """The monomial coef * s^k."""
        return cls(RatFunc.monomial(k, coef))

    @classmethod
    def q_power(cls, k, coef=G_ONE):
        """The monomial coef * q^k (k integer)."""
        return cls.s_power(2 * k, coef)

    # -- predicates ----------------------------------------------------------

    def is_zero(self):
        return all(f.is_zero() for f in self.c)

    def is_rational_sector(self):
        """True when the t-, r- and t*r-components all vanish."""
        return all(f.is_zero() for f in self.c[1:])

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        other = _as_scalar(other)
        return Scalar(*(a + b for a, b in zip(self.c, other.c)))

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_scalar(other)
        return Scalar(*(a - b for a, b in zip(self.c, other.c)))

    def __rsub__(self, other):
        return _as_scalar(other) - self

    def __neg__(self):
        return Scalar(*(-a for a in self.c))

    def __mul__(self, other):
        other = _as_scalar(other)
        a0, a1, a2, a3 = self.c
        b0, b1, b2, b3 = other.c
        # fast path: both in the rational sector (the overwhelming case)
        if a1.is_zero() and a2.is_zero() and a3.is_zero():
            if b1.is_zero() and b2.is_zero() and b3.is_zero():
                return Scalar(a0 * b0)
            return Scalar(a0 * b0, a0 * b1, a0 * b2, a0 * b3)
        if b1.is_zero() and b2.is_zero() and b3.is_zero():
            return Scalar(a0 * b0, a1 * b0, a2 * b0, a3 * b0)
        B = RF_QBRACKET2
        return Scalar(
            a0 * b0 + RF_TWO * (a1 * b1) + B * (a2 * b2) + RF_TWO * B * (a3 * b3),
            a0 * b1 + a1 * b0 + B * (a2 * b3 + a3 * b2),
            a0 * b2 + a2 * b0 + RF_TWO * (a1 * b3 + a3 * b1),
            a0 * b3 + a3 * b0 + a1 * b2 + a2 * b1,
        )

    __rmul__ = __mul__

    def conj_r(self):
        return Scalar(self.c[0], self.c[1], -self.c[2], -self.c[3])

    def conj_t(self):
        return Scalar(self.c[0], -self.c[1], self.c[2], -self.c[3])

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero Scalar")
        c0, c1, c2, c3 = self.c
        nz = [not f.is_zero() for f in self.c]
        # single-component fast paths (1/x for x = c * basis element)
        if nz == [True, False, False, False]:
            return Scalar(RF_ONE / c0)
        if nz == [False, True, False, False]:
            return Scalar(RF_ZERO, RF_ONE / (RF_TWO * c1))
        if nz == [False, False, True, False]:
            return Scalar(RF_ZERO, RF_ZERO, RF_ONE / (RF_QBRACKET2 * c2))
        if nz == [False, False, False, True]:
            return Scalar(RF_ZERO, RF_ZERO, RF_ZERO,
                          RF_ONE / (RF_TWO * RF_QBRACKET2 * c3))
        # kill r, then t, by norm-form conjugations
        xr = self.conj_r()
        y = self * xr                      # lives in Q(i)(s)[t]
        yt = y.conj_t()
        z = y * yt                         # lives in Q(i)(s)
        z0 = z.c[0]
        inv_z = RF_ONE / z0
        w = xr * yt
        return Scalar(*(f * inv_z for f in w.c))

    def __truediv__(self, other):
        return self * _as_scalar(other).inverse()

    def __rtruediv__(self, other):
        return _as_scalar(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = S_ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        try:
            other = _as_scalar(other)
        except TypeError:
            return NotImplemented
        return self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def subst_qinv(self):
        """Apply q -> 1/q (r and t are fixed: their defining relations are symmetric)."""
        return Scalar(*(f.subst_qinv() for f in self.c))

    def as_int(self):
        """Return the value as a plain int when it is one, else None."""
        if not self.is_rational_sector():
            return None
        f = self.c[0]
        if f.den != LP_ONE:
            return None
        if f.num.is_zero():
            return 0
        if set(f.num.c) != {0}:
            return None
        g = f.num.c[0]
        if g.im != 0 or g.re.denominator != 1:
            return None
        return int(g.re)

    def __str__(self):
        if self.is_zero():
            return "0"
        names = ("", "t", "r", "t*r")
        parts = []
        for f, name in zip(self.c, names):
            if f.is_zero():
                continue
            fs = str(f)
            if not name:
                parts.append(fs)
            elif fs == "1":
                parts.append(name)
            elif fs == "-1":
                parts.append(f"-{name}")
            else:
                if " " in fs or "/" in fs:
                    fs = f"({fs})"
                parts.append(f"{fs}*{name}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"Scalar<{self}>"


def _as_scalar(x):
    if isinstance(x, Scalar):
        return x
    if isinstance(x, (int, Fraction)):
        return Scalar.from_rat(x)
    if isinstance(x, GaussianRational):
        return Scalar.from_gaussian(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to Scalar")


S_ZERO = Scalar()
S_ONE = Scalar.from_rat(1)
S_I = Scalar.i()
S_T = Scalar.t()
S_R = Scalar.r()


from functools import lru_cache


@lru_cache(maxsize=None)
def qint(n: int) -> Scalar:
    """The q-integer [n] = (q^n - q^-n)/(q - q^-1) as a Laurent polynomial in s."""
    if n == 0:
        return S_ZERO
    if n < 0:
        return -qint(-n)
    coeffs = {2 * (n - 1 - 2 * j): G_ONE for j in range(n)}
    return Scalar(RatFunc(LaurentPoly(coeffs), LP_ONE, _canonical=True))


def q_minus_qinv() -> Scalar:
    """q - 1/q = s^2 - s^-2."""
    return Scalar(RatFunc(LaurentPoly({2: G_ONE, -2: -G_ONE}), LP_ONE, _canonical=True))


# ---------------------------------------------------------------------------
# Degeneration map 1: evaluation at q = 1
# ---------------------------------------------------------------------------

class SurdRational:
    """A value a + b*sqrt(2) with Gaussian-rational a, b (image of eval_q1)."""

    __slots__ = ("rat", "t_coef")

    def __init__(self, rat=G_ZERO, t_coef=G_ZERO):
        object.__setattr__(self, "rat", _as_gaussian(rat))
        object.__setattr__(self, "t_coef", _as_gaussian(t_coef))

    def __setattr__(self, name, value):
        raise AttributeError("SurdRational is immutable")

    def is_zero(self):
        return self.rat.is_zero() and self.t_coef.is_zero()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            other = SurdRational(other)
        if not isinstance(other, SurdRational):
            return NotImplemented
        return self.rat == other.rat and self.t_coef == other.t_coef

    def __hash__(self):
        return hash((self.rat, self.t_coef))

    def __str__(self):
        if self.t_coef.is_zero():
            return str(self.rat)
        ts = str(self.t_coef)
        if ("+" in ts[1:]) or ("-" in ts[1:]) or "/" in ts:
            ts = f"({ts})"
        tpart = "t" if ts == "1" else f"-t" if ts == "-1" else f"{ts}*t"
        if self.rat.is_zero():
            return tpart
        return f"{self.rat} + {tpart}".replace("+ -", "- ")

    def __repr__(self):
        return f"SurdRational<{self}>"


def eval_q1(x: Scalar) -> SurdRational:
    """Substitute s = 1; r degenerates to t since r^2 -> 2.

    Raises PoleAtQ1Error when any normalized denominator vanishes at s = 1.
    """
    f0, f1, f2, f3 = (f.eval_one() for f in x.c)
    return SurdRational(f0 + 2 * f3, f1 + f2)


# ---------------------------------------------------------------------------
# Degeneration map 2: exact Laurent expansion in h, q = exp(i h)
# ---------------------------------------------------------------------------

class HSeries:
    """Truncated Laurent series in h with coefficients in Q(i)[t].

    Coefficients are exact for every exponent below ``prec``; the tail is
    O(h^prec).  A finite principal part (pole in h) is allowed.
    """

    __slots__ = ("c", "prec")

    def __init__(self, coeffs, prec):
        c = {}
        for k, v in (coeffs or {}).items():
            if k < prec and not (v[0].is_zero() and v[1].is_zero()):
                c[k] = v
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "prec", prec)

    def __setattr__(self, name, value):
        raise AttributeError("HSeries is immutable")

    @classmethod
    def const(cls, v, prec):
        return cls({0: (_as_gaussian(v), G_ZERO)}, prec)

    def coeff(self, k):
        """Coefficient of h^k as a SurdRational (must be below precision)."""
        if k >= self.prec:
            raise ValueError(f"coefficient h^{k} is beyond precision O(h^{self.prec})")
        a, b = self.c.get(k, (G_ZERO, G_ZERO))
        return SurdRational(a, b)

    def is_zero(self):
        return not self.c

    def valuation(self):
        if not self.c:
            return None
        return min(self.c)

    def truncate(self, prec):
        return HSeries(self.c, min(self.prec, prec))

    def __add__(self, other):
        prec = min(self.prec, other.prec)
        out = dict(self.c)
        for k, v in other.c.items():
            a, b = out.get(k, (G_ZERO, G_ZERO))
            out[k] = (a + v[0], b + v[1])
        return HSeries(out, prec)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return HSeries({k: (-a, -b) for k, (a, b) in self.c.items()}, self.prec)

    def __mul__(self, other):
        if not self.c or not other.c:
            # zero factor: precision of the product is limited by the known tails
            prec = min(self.prec + _val_or0(other), other.prec + _val_or0(self))
            return HSeries({}, prec)
        prec = min(self.prec + other.valuation(), other.prec + self.valuation())
        out = {}
        for k1, (a1, b1) in self.c.items():
            for k2, (a2, b2) in other.c.items():
                k = k1 + k2
                if k >= prec:
                    continue
                a, b = out.get(k, (G_ZERO, G_ZERO))
                out[k] = (a + a1 * a2 + 2 * b1 * b2, b + a1 * b2 + b1 * a2)
        return HSeries(out, prec)

    def inverse(self):
        if not self.c:
            raise ZeroDivisionError("inverse of (truncated) zero series")
        v = self.valuation()
        lead = self.c[v]
        n = lead[0] * lead[0] - 2 * (lead[1] * lead[1])
        inv_lead = ((lead[0] / n), (-lead[1] / n))
        terms = self.prec - v
        # w = shifted/lead - 1, then 1/(1+w) = sum (-w)^k
        shifted = HSeries({k - v: c for k, c in self.c.items()}, terms)
        one = HSeries.const(1, terms)
        lead_s = HSeries({0: inv_lead}, terms)
        w = shifted * lead_s - one
        acc = one
        pw = one
        for _ in range(terms):
            pw = pw * (-w)
            if pw.is_zero():
                break
            acc = acc + pw
        inv = acc * lead_s
        return HSeries({k - v: c for k, c in inv.c.items()}, terms - v)

    def __truediv__(self, other):
        return self * other.inverse()

    def __eq__(self, other):
        if not isinstance(other, HSeries):
            return NotImplemented
        prec = min(self.prec, other.prec)
        keys = {k for k in self.c if k < prec} | {k for k in other.c if k < prec}
        return all(self.c.get(k, (G_ZERO, G_ZERO)) == other.c.get(k, (G_ZERO, G_ZERO)) for k in keys)

    def __str__(self):
        parts = []
        for k in sorted(self.c):
            cs = str(SurdRational(*self.c[k]))
            if " " in cs:
                cs = f"({cs})"
            if k == 0:
                parts.append(cs)
            else:
                mono = "h" if k == 1 else f"h^{k}"
                parts.append(mono if cs == "1" else f"-{mono}" if cs == "-1" else f"{cs}*{mono}")
        parts.append(f"O(h^{self.prec})")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"HSeries<{self}>"


def _val_or0(h):
    v = h.valuation()
    return 0 if v is None else v


def _lp_to_hseries(p: LaurentPoly, prec: int) -> HSeries:
    """Substitute s = exp(i h / 2) exactly, order by order."""
    out = {}
    for k, g in p.c.items():
        base = GaussianRational(0, Fraction(k, 2))  # i*k/2
        cur = g
        a, b = out.get(0, (G_ZERO, G_ZERO))
        out[0] = (a + cur, b)
        for m in range(1, prec):
            cur = cur * base / m
            a, b = out.get(m, (G_ZERO, G_ZERO))
            out[m] = (a + cur, b)
    return HSeries(out, prec)


def _sqrt_cos_series(prec: int) -> HSeries:
    """sqrt(cos h) as an exact rational series (r = t * sqrt(cos h))."""
    cos = [Fraction(0)] * prec
    sign = 1
    fact = 1
    for m in range(0, prec, 2):
        if m:
            fact *= (m - 1) * m
        cos[m] = Fraction(sign, fact)
        sign = -sign
    c = [Fraction(0)] * prec
    c[0] = Fraction(1)
    for m in range(1, prec):
        acc = cos[m]
        for j in range(1, m):
            acc -= c[j] * c[m - j]
        c[m] = acc / 2
    return HSeries({m: (GaussianRational(c[m]), G_ZERO) for m in range(prec)}, prec)


def taylor_q1(x: Scalar, order: int) -> HSeries:
    """Exact Laurent expansion in h of x under q = exp(i h), through h^order."""
    if order < 0:
        raise ValueError("order must be >= 0")
    target = order + 1
    guard = 4
    while guard <= 4096:
        prec = target + guard
        series = []
        ok = True
        for f in x.c:
            if f.num.is_zero():
                series.append(HSeries({}, prec))
                continue
            den_h = _lp_to_hseries(f.den, prec)
            if den_h.is_zero() or den_h.valuation() > guard // 2:
                ok = False
                break
            series.append(_lp_to_hseries(f.num, prec) / den_h)
        if ok and all(s.prec >= target for s in series):
            s0, s1, s2, s3 = series
            root = _sqrt_cos_series(prec)
            rat = s0 + s3 * root + s3 * root       # 1-component: f0 + 2*f3*sqrt(cos h)
            tco = s1 + s2 * root                   # t-component: f1 + f2*sqrt(cos h)
            prec_out = min(rat.prec, tco.prec)
            if prec_out >= target:
                out = {}
                for k, (a, _) in rat.c.items():
                    out[k] = (a, G_ZERO)
                for k, (a, _) in tco.c.items():
                    prev = out.get(k, (G_ZERO, G_ZERO))
                    out[k] = (prev[0], a)
                return HSeries(out, prec_out).truncate(target)
        guard *= 4
    raise ArithmeticError("taylor_q1 failed to reach the requested order")
