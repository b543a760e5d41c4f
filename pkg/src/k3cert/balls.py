"""Midpoint-radius ball arithmetic on top of MPFR (via gmpy2).

A Ball represents the closed interval [mid - rad, mid + rad].  Every
operation returns a ball containing the exact image of its input sets:
the midpoint is computed at the working precision rounding toward zero
and the rounding error is absorbed into the radius, which is tracked at
53 bits rounding up.  Exactness is detected by evaluating each midpoint
operation under both toward-zero and away-from-zero rounding; when the
two agree the operation was exact and no rounding term is added.

Balls are immutable values and all operations are pure.  The working
precision lives in an explicit BallContext; there is no global mutable
state.
"""

from fractions import Fraction

import gmpy2
from gmpy2 import mpfr, mpq, mpz

from .errors import DomainError, RangeError, SingularError

RADIUS_PREC = 53
EMIN = -(2**30)
EMAX = 2**30

_RANGE_ERRORS = (gmpy2.OverflowResultError, gmpy2.UnderflowResultError, OverflowError)


def _mk_context(prec, rounding, trap_underflow=True):
    return gmpy2.context(
        precision=prec,
        round=rounding,
        emin=EMIN,
        emax=EMAX,
        trap_overflow=True,
        trap_underflow=trap_underflow,
        trap_inexact=False,
        trap_invalid=True,
        trap_divzero=True,
    )


class BallContext:
    """Working-precision context: midpoints at `prec` bits, radii at 53.

    Default precision is 512 bits; anything >= 34 is accepted (below
    that the closed-form error model of the pipeline has no validity).
    """

    def __init__(self, prec: int = 512):
        if prec < 2:
            raise ValueError("precision must be at least 2 bits")
        self.prec = prec
        self._dn = _mk_context(prec, gmpy2.RoundToZero)
        self._up = _mk_context(prec, gmpy2.RoundAwayZero)
        # Radius domain: nonnegative, round toward +inf.  Underflow is not
        # trapped: a positive result that underflows rounds up to the
        # smallest positive number, which stays an upper bound.
        self._rup = _mk_context(RADIUS_PREC, gmpy2.RoundUp, trap_underflow=False)
        # Lower bounds (e.g. of |denominator| - rad) round toward -inf.
        self._rdn = _mk_context(RADIUS_PREC, gmpy2.RoundDown, trap_underflow=False)
        self._zero = mpfr(0, RADIUS_PREC)

    # Bare mpfr arithmetic would silently round through the thread's
    # default 53-bit context; negation and magnitude must go through a
    # full-precision context (where they are exact).
    def _neg(self, x: mpfr) -> mpfr:
        return self._dn.minus(x)

    def _abs(self, x: mpfr) -> mpfr:
        return x if x >= 0 else self._dn.minus(x)

    def __repr__(self):
        return f"BallContext(prec={self.prec})"

    # -- construction -------------------------------------------------

    def ball(self, value, rad=0) -> "Ball":
        """Ball enclosing `value` (int, str, Fraction, mpq, mpfr, Ball).

        Decimal strings and Fractions are treated as exact rationals;
        when the value is not representable at the working precision the
        conversion error goes into the radius.
        """
        if isinstance(value, Ball):
            if value.ctx is self:
                b = value
            else:
                b = self._reball(value)
            if rad:
                return Ball(b.mid, self._rup.add(b.rad, self._as_rad(rad)), self)
            return b
        mid, err = self._convert(value)
        if rad:
            err = self._rup.add(err, self._as_rad(rad))
        return Ball(mid, err, self)

    def from_endpoints(self, lo, hi) -> "Ball":
        """Ball containing the interval [lo, hi] (exact inputs)."""
        def to_q(v):
            if isinstance(v, Fraction):
                return mpq(v.numerator, v.denominator)
            return mpq(v)

        qlo, qhi = to_q(lo), to_q(hi)
        if qhi < qlo:
            raise ValueError("empty interval")
        mid, err = self._convert((qlo + qhi) / 2)
        half = self._q_up((qhi - qlo) / 2)
        return Ball(mid, self._rup.add(err, half), self)

    def _q_up(self, q: mpq) -> mpfr:
        """53-bit upper bound of a nonnegative exact rational."""
        if q < 0:
            raise ValueError("negative radius")
        num, den = q.numerator, q.denominator
        nf = mpfr(num, max(2, num.bit_length() + 1))
        df = mpfr(den, max(2, den.bit_length() + 1))
        return self._rup.div(nf, df)

    def _convert(self, value):
        try:
            if isinstance(value, (int, mpz)):
                lo = self._dn.add(mpfr(0), mpz(value))
                hi = self._up.add(mpfr(0), mpz(value))
            elif isinstance(value, mpfr):
                lo = self._dn.add(mpfr(0), value)
                hi = self._up.add(mpfr(0), value)
            else:
                if isinstance(value, str):
                    value = mpq(value)
                elif isinstance(value, Fraction):
                    value = mpq(value.numerator, value.denominator)
                elif isinstance(value, float):
                    # floats are exact binary values
                    value = mpq(value)
                if not isinstance(value, mpq):
                    raise TypeError(f"cannot make a Ball from {type(value)!r}")
                num, den = value.numerator, value.denominator
                np_ = max(self.prec, num.bit_length() + 2)
                dp_ = max(self.prec, den.bit_length() + 2)
                nf, df = mpfr(num, np_), mpfr(den, dp_)
                lo = self._dn.div(nf, df)
                hi = self._up.div(nf, df)
        except _RANGE_ERRORS as e:
            raise RangeError(str(e)) from e
        if lo == hi:
            return lo, self._zero
        return lo, self._rup.sub(self._up.abs(hi), self._dn.abs(lo))

    def _as_rad(self, rad):
        if isinstance(rad, mpfr):
            return self._abs(rad)
        if isinstance(rad, Fraction):
            q = mpq(rad.numerator, rad.denominator)
        else:
            q = mpq(rad)
        return self._q_up(abs(q))

    def _reball(self, other: "Ball") -> "Ball":
        mid, err = self._convert(other.mid)
        return Ball(mid, self._rup.add(err, other.rad), self)

    # -- midpoint ops with exactness detection ------------------------

    def _op1(self, name, x):
        try:
            lo = getattr(self._dn, name)(x)
            hi = getattr(self._up, name)(x)
        except _RANGE_ERRORS as e:
            raise RangeError(str(e)) from e
        if lo == hi:
            return lo, self._zero
        # |hi| >= |lo| since hi rounds away from zero; difference of
        # magnitudes rounded up bounds |exact - lo|
        return lo, self._rup.sub(self._abs(hi), self._abs(lo))

    def _op2(self, name, x, y):
        try:
            lo = getattr(self._dn, name)(x, y)
            hi = getattr(self._up, name)(x, y)
        except _RANGE_ERRORS as e:
            raise RangeError(str(e)) from e
        if lo == hi:
            return lo, self._zero
        return lo, self._rup.sub(self._abs(hi), self._abs(lo))

    # -- arithmetic ----------------------------------------------------

    def add(self, a: "Ball", b: "Ball") -> "Ball":
        a, b = self._pair(a, b)
        mid, err = self._op2("add", a.mid, b.mid)
        rad = self._rup.add(self._rup.add(a.rad, b.rad), err)
        return Ball(mid, rad, self)

    def sub(self, a, b) -> "Ball":
        a, b = self._pair(a, b)
        mid, err = self._op2("sub", a.mid, b.mid)
        rad = self._rup.add(self._rup.add(a.rad, b.rad), err)
        return Ball(mid, rad, self)

    def neg(self, a: "Ball") -> "Ball":
        return Ball(self._neg(a.mid), a.rad, self)

    def mul(self, a, b) -> "Ball":
        a, b = self._pair(a, b)
        mid, err = self._op2("mul", a.mid, b.mid)
        rad = err
        if a.rad or b.rad:
            up = self._rup
            cross = up.add(up.mul(self._abs(a.mid), b.rad), up.mul(self._abs(b.mid), a.rad))
            rad = up.add(rad, up.add(cross, up.mul(a.rad, b.rad)))
        return Ball(mid, rad, self)

    def div(self, a, b) -> "Ball":
        a, b = self._pair(a, b)
        den_lo = self._rdn.sub(self._abs(b.mid), b.rad)
        if not den_lo > 0:
            raise DomainError("division by a ball whose interval reaches zero")
        mid, err = self._op2("div", a.mid, b.mid)
        rad = err
        if a.rad or b.rad:
            up, dn = self._rup, self._rdn
            # |x'/y' - x/y| <= r1/den_lo + |x| r2 / (|y| den_lo)
            t1 = up.div(a.rad, den_lo)
            t2 = up.div(up.mul(self._abs(a.mid), b.rad), dn.mul(self._abs(b.mid), den_lo))
            rad = up.add(rad, up.add(t1, t2))
        return Ball(mid, rad, self)

    def sqrt(self, a: "Ball") -> "Ball":
        lo_pt = self._rdn.sub(a.mid, a.rad)
        if not lo_pt > 0:
            raise DomainError("sqrt of a ball whose interval reaches <= 0")
        mid, err = self._op1("sqrt", a.mid)
        rad = err
        if a.rad:
            up, dn = self._rup, self._rdn
            # |sqrt(x') - sqrt(x)| <= r / (2 sqrt(x - r))
            rad = up.add(rad, up.div(a.rad, dn.mul(2, dn.sqrt(lo_pt))))
        return Ball(mid, rad, self)

    def _pair(self, a, b):
        if not isinstance(a, Ball):
            a = self.ball(a)
        if not isinstance(b, Ball):
            b = self.ball(b)
        if a.ctx is not self or b.ctx is not self:
            raise ValueError("balls belong to a different BallContext")
        return a, b

    # -- endpoint queries (53-bit directed bounds, exact comparisons) --

    def lower(self, a: "Ball") -> mpfr:
        return self._rdn.sub(a.mid, a.rad)

    def upper(self, a: "Ball") -> mpfr:
        return self._rup.add(a.mid, a.rad)


class Ball:
    """Closed interval [mid - rad, mid + rad]; immutable."""

    __slots__ = ("mid", "rad", "ctx")

    def __init__(self, mid: mpfr, rad: mpfr, ctx: BallContext):
        object.__setattr__(self, "mid", mid)
        object.__setattr__(self, "rad", rad)
        object.__setattr__(self, "ctx", ctx)

    def __setattr__(self, *_):
        raise AttributeError("Ball is immutable")

    # arithmetic sugar
    def __add__(self, other):
        return self.ctx.add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return self.ctx.sub(self, other)

    def __rsub__(self, other):
        return self.ctx.sub(self.ctx.ball(other), self)

    def __mul__(self, other):
        return self.ctx.mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self.ctx.div(self, other)

    def __rtruediv__(self, other):
        return self.ctx.div(self.ctx.ball(other), self)

    def __neg__(self):
        return self.ctx.neg(self)

    def __abs__(self):
        return Ball(self.ctx._abs(self.mid), self.rad, self.ctx)

    def sqrt(self):
        return self.ctx.sqrt(self)

    # queries
    @property
    def is_exact(self):
        return self.rad == 0

    def lower(self):
        return self.ctx.lower(self)

    def upper(self):
        return self.ctx.upper(self)

    def width(self):
        """Upper bound on the diameter 2*rad as a float."""
        return float(self.ctx._rup.mul(2, self.rad))

    def mid_fraction(self) -> Fraction:
        q = mpq(self.mid)
        return Fraction(int(q.numerator), int(q.denominator))

    def rad_fraction(self) -> Fraction:
        q = mpq(self.rad)
        return Fraction(int(q.numerator), int(q.denominator))

    def interval_fractions(self):
        m, r = self.mid_fraction(), self.rad_fraction()
        return m - r, m + r

    def contains(self, value) -> bool:
        """Exact containment test for a rational value."""
        if isinstance(value, Ball):
            lo, hi = value.interval_fractions()
            slo, shi = self.interval_fractions()
            return slo <= lo and hi <= shi
        if isinstance(value, (mpfr, float)):
            value = mpq(value)
        if isinstance(value, Fraction):
            value = mpq(value.numerator, value.denominator)
        v = Fraction(int(mpq(value).numerator), int(mpq(value).denominator))
        lo, hi = self.interval_fractions()
        return lo <= v <= hi

    def strictly_positive(self) -> bool:
        return self.lower() > 0

    def strictly_negative(self) -> bool:
        return self.upper() < 0

    def __repr__(self):
        return f"Ball({self.mid!s} +/- {self.rad!s})"

    def __float__(self):
        return float(self.mid)


# -- serialization -----------------------------------------------------


def _mpfr_hex(x: mpfr) -> dict:
    if x == 0:
        return {"m": "0x0", "e": 0}
    m, e = x.as_mantissa_exp()
    return {"m": hex(int(m)), "e": int(e)}


def _mpfr_dec(x: mpfr, digits: int) -> str:
    if x == 0:
        return "0"
    ds, exp, _ = x.digits(10, digits)
    sign = "-" if ds.startswith("-") else ""
    ds = ds.lstrip("-")
    return f"{sign}0.{ds}e{exp}"


def ball_to_json(b: Ball) -> dict:
    """Serialize a ball as decimal strings plus exact bit-level forms."""
    dec_mid = _mpfr_dec(b.mid, 40)
    dec_rad = _mpfr_dec(b.rad, 6)
    return {
        "dec": f"{dec_mid} ± {dec_rad}",
        "mid": _mpfr_hex(b.mid),
        "rad": _mpfr_hex(b.rad),
        "prec": b.ctx.prec,
    }


def ball_from_json(d: dict, ctx: BallContext) -> Ball:
    def dec(h):
        m = int(h["m"], 16)
        if m == 0:
            return mpfr(0)
        return gmpy2.mul_2exp(mpfr(m, max(m.bit_length(), 2)), h["e"]) if h["e"] >= 0 else mpfr(
            mpq(m, mpz(1) << (-h["e"])), max(m.bit_length(), 2)
        )

    mid = dec(d["mid"])
    rad = dec(d["rad"])
    return ctx.ball(mid, rad)


# -- vectors and matrices ----------------------------------------------


class BallVec:
    """Fixed-length tuple of balls."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        object.__setattr__(self, "entries", tuple(entries))

    def __setattr__(self, *_):
        raise AttributeError("BallVec is immutable")

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)

    def __add__(self, other):
        return BallVec(a + b for a, b in zip(self.entries, other.entries))

    def __sub__(self, other):
        return BallVec(a - b for a, b in zip(self.entries, other.entries))

    def norm2(self) -> Ball:
        """Ball containing the exact Euclidean norm."""
        s = None
        for e in self.entries:
            sq = e * e
            s = sq if s is None else s + sq
        if s.lower() > 0:
            return s.sqrt()
        # interval touches zero: [0, sqrt(upper)] done by endpoint arithmetic
        ctx = s.ctx
        lo, hi = s.interval_fractions()
        hi_root = _fraction_sqrt_upper(max(hi, Fraction(0)))
        return ctx.from_endpoints(Fraction(0), hi_root)


def _fraction_sqrt_upper(q: Fraction) -> Fraction:
    """A rational upper bound for sqrt(q), q >= 0."""
    if q == 0:
        return Fraction(0)
    x = mpfr(mpq(q.numerator, q.denominator), 80)
    up = _mk_context(80, gmpy2.RoundUp).sqrt(x)
    r = mpq(up)
    fr = Fraction(int(r.numerator), int(r.denominator))
    while fr * fr < q:
        fr *= Fraction(1048577, 1048576)
    return fr


class BallMat:
    """Dense matrix of balls (list of rows)."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        object.__setattr__(self, "rows", tuple(tuple(r) for r in rows))

    def __setattr__(self, *_):
        raise AttributeError("BallMat is immutable")

    @property
    def shape(self):
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def row(self, i):
        return self.rows[i]

    @staticmethod
    def identity(n, ctx):
        one, zero = ctx.ball(1), ctx.ball(0)
        return BallMat([[one if i == j else zero for j in range(n)] for i in range(n)])

    def __sub__(self, other):
        return BallMat(
            [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)]
        )

    def matmul(self, other: "BallMat") -> "BallMat":
        n, k = self.shape
        k2, m = other.shape
        assert k == k2
        out = []
        for i in range(n):
            row = []
            for j in range(m):
                s = None
                for t in range(k):
                    p = self.rows[i][t] * other.rows[t][j]
                    s = p if s is None else s + p
                row.append(s)
            out.append(row)
        return BallMat(out)

    def matvec(self, v: BallVec) -> BallVec:
        n, k = self.shape
        out = []
        for i in range(n):
            s = None
            for t in range(k):
                p = self.rows[i][t] * v[t]
                s = p if s is None else s + p
            out.append(s)
        return BallVec(out)

    def frobenius(self) -> Ball:
        return BallVec([e for r in self.rows for e in r]).norm2()

    def max_rad(self):
        """Largest entry radius (mpfr, exact)."""
        best = None
        for r in self.rows:
            for e in r:
                if best is None or e.rad > best:
                    best = e.rad
        return best

    def det(self) -> Ball:
        """Determinant enclosure by fraction-free expansion for small n,
        Gaussian elimination otherwise."""
        n, m = self.shape
        assert n == m
        if n <= 3:
            return _small_det(self)
        rows = [list(r) for r in self.rows]
        ctx = rows[0][0].ctx
        sign = 1
        acc = ctx.ball(1)
        for col in range(n):
            piv = _pick_pivot(rows, col, n)
            if piv is None:
                raise SingularError("no pivot excluding zero in determinant")
            if piv != col:
                rows[piv], rows[col] = rows[col], rows[piv]
                sign = -sign
            p = rows[col][col]
            acc = acc * p
            for r in range(col + 1, n):
                f = rows[r][col] / p
                for c in range(col, n):
                    rows[r][c] = rows[r][c] - f * rows[col][c]
        return acc if sign == 1 else -acc

    def inverse(self) -> "BallMat":
        """Verified inverse by interval Gaussian elimination.

        Raises SingularError when a pivot ball contains zero or when the
        residual ||I - A X|| cannot be certified < 1.
        """
        n, m = self.shape
        assert n == m
        ctx = self.rows[0][0].ctx
        rows = [list(r) + [ctx.ball(1) if i == j else ctx.ball(0) for j in range(n)] for i, r in enumerate(self.rows)]
        for col in range(n):
            piv = _pick_pivot(rows, col, n)
            if piv is None:
                raise SingularError(f"pivot ball contains zero in column {col}")
            if piv != col:
                rows[piv], rows[col] = rows[col], rows[piv]
            p = rows[col][col]
            inv_row = [rows[col][c] / p for c in range(2 * n)]
            rows[col] = inv_row
            for r in range(n):
                if r == col:
                    continue
                f = rows[r][col]
                if f.mid == 0 and f.rad == 0:
                    continue
                rows[r] = [rows[r][c] - f * inv_row[c] for c in range(2 * n)]
        inv = BallMat([r[n:] for r in rows])
        resid = BallMat.identity(n, ctx) - self.matmul(inv)
        if not (resid.frobenius().upper() < 1):
            raise SingularError("inverse residual could not be certified < 1")
        return inv


def _small_det(m: BallMat) -> Ball:
    n, _ = m.shape
    if n == 1:
        return m[0, 0]
    if n == 2:
        return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    a, b, c = m.rows[0]
    d, e, f = m.rows[1]
    g, h, i = m.rows[2]
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def _pick_pivot(rows, col, n):
    """Largest-midpoint pivot among rows >= col whose ball excludes zero."""
    best, best_mag = None, None
    for r in range(col, n):
        e = rows[r][col]
        if e.ctx.lower(abs(e)) > 0:
            mag = abs(e.mid)
            if best is None or mag > best_mag:
                best, best_mag = r, mag
    return best


def ball_norm2(v: BallVec) -> Ball:
    return v.norm2()


def ball_frobenius(m: BallMat) -> Ball:
    return m.frobenius()


def ball_mat_inverse(m: BallMat) -> BallMat:
    return m.inverse()
