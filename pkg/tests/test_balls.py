import random
from fractions import Fraction

import gmpy2
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from k3cert.balls import Ball, BallContext, BallMat, BallVec, ball_from_json, ball_to_json
from k3cert.errors import DomainError, RangeError, SingularError

CTX = BallContext(512)


def test_exact_integer_ops_have_zero_radius():
    s = CTX.ball(1) + CTX.ball(2)
    assert s.is_exact and s.contains(3)
    r = CTX.ball(4).sqrt()
    assert r.is_exact and r.contains(2)
    p = CTX.ball(3) * CTX.ball(-7)
    assert p.is_exact and p.contains(-21)


def test_division_encloses_reference_at_higher_precision():
    # reference computed at 4N bits must land inside the N-bit ball
    small = BallContext(128)
    big = BallContext(512)
    d_small = small.ball(1) / small.ball(3)
    d_big = big.ball(1) / big.ball(3)
    assert d_small.contains(Fraction(1, 3))
    lo, hi = d_small.interval_fractions()
    blo, bhi = d_big.interval_fractions()
    assert lo <= blo and bhi <= hi


def test_division_by_zero_interval_raises():
    z = CTX.ball(0, rad=Fraction(1, 10))
    with pytest.raises(DomainError):
        CTX.ball(1) / z


def test_sqrt_domain():
    with pytest.raises(DomainError):
        CTX.ball(0).sqrt()
    with pytest.raises(DomainError):
        CTX.ball(Fraction(1, 10**40), rad=Fraction(1, 10**39)).sqrt()


def test_range_error_on_overflow():
    with pytest.raises(RangeError):
        b = CTX.ball(2)
        for _ in range(35):
            b = b * b  # 2^(2^35) exceeds the exponent cap


def test_decimal_string_parse_contains_exact_value():
    s = "1.041643093944314148360673792017"
    b = CTX.ball(s)
    assert b.contains(Fraction(s))
    assert float(b.rad) < 1e-150


def _rand_ball(rng, ctx):
    num = rng.randint(-10**6, 10**6)
    den = rng.randint(1, 10**6)
    rad = Fraction(rng.randint(0, 100), 10**9)
    return ctx.ball(Fraction(num, den), rad=rad)


def test_containment_against_high_precision_oracle():
    # composite expression at N bits encloses the value computed at 4N
    rng = random.Random(7)
    lo_ctx = BallContext(64)
    hi_ctx = BallContext(256)
    for _ in range(400):
        a = rng.randint(-999, 999)
        bq = Fraction(rng.randint(1, 999), rng.randint(1, 999))
        c = Fraction(rng.randint(-999, 999), rng.randint(1, 999))

        def expr(ctx):
            x, y, z = ctx.ball(a), ctx.ball(bq), ctx.ball(c)
            w = (x * y + z) * (y - z)
            d = y * y + ctx.ball(1)
            return (w / d + x) * y

        low, high = expr(lo_ctx), expr(hi_ctx)
        llo, lhi = low.interval_fractions()
        hlo, hhi = high.interval_fractions()
        assert llo <= hlo and hhi <= lhi


@settings(max_examples=200, deadline=None)
@given(
    m1=st.integers(-1000, 1000), r1=st.integers(0, 50),
    m2=st.integers(-1000, 1000), r2=st.integers(0, 50),
    wide=st.integers(1, 20),
    op=st.sampled_from(["add", "sub", "mul"]),
)
def test_inclusion_monotonicity(m1, r1, m2, r2, wide, op):
    # enlarging either operand can only enlarge the result
    a = CTX.ball(Fraction(m1, 17), rad=Fraction(r1, 1000))
    b = CTX.ball(Fraction(m2, 13), rad=Fraction(r2, 1000))
    a_wide = CTX.ball(Fraction(m1, 17), rad=Fraction(r1 * wide + 1, 1000))
    b_wide = CTX.ball(Fraction(m2, 13), rad=Fraction(r2 * wide + 1, 1000))
    f = getattr(CTX, op)
    narrow = f(a, b)
    broad = f(a_wide, b_wide)
    nlo, nhi = narrow.interval_fractions()
    blo, bhi = broad.interval_fractions()
    assert blo <= nlo and nhi <= bhi


def test_norms_and_inverse():
    v = BallVec([CTX.ball(3), CTX.ball(4)])
    assert v.norm2().contains(5)
    eye = BallMat.identity(2, CTX)
    frob = eye.frobenius()
    lo, hi = frob.interval_fractions()
    assert lo * lo <= 2 <= hi * hi
    m = BallMat([[CTX.ball(2), CTX.ball(0)], [CTX.ball(0), CTX.ball(2)]])
    inv = m.inverse()
    assert inv[0, 0].contains(Fraction(1, 2)) and inv[1, 0].contains(0)


def test_singular_inverse_raises():
    m = BallMat([[CTX.ball(1), CTX.ball(1)], [CTX.ball(1), CTX.ball(1)]])
    with pytest.raises(SingularError):
        m.inverse()


def test_matrix_inverse_verified_against_fractions():
    rng = random.Random(3)
    for _ in range(10):
        rows = [[rng.randint(-5, 5) for _ in range(4)] for _ in range(4)]
        from k3cert.homology import mat_inverse

        try:
            exact = mat_inverse(rows)
        except SingularError:
            continue
        m = BallMat([[CTX.ball(e) for e in r] for r in rows])
        try:
            inv = m.inverse()
        except SingularError:
            continue
        for i in range(4):
            for j in range(4):
                assert inv[i, j].contains(exact[i][j])


def test_serialization_roundtrip_bit_exact():
    b = CTX.ball(1) / CTX.ball(7)
    js = ball_to_json(b)
    back = ball_from_json(js, CTX)
    assert back.mid == b.mid
    assert back.contains(b)
    assert "±" in js["dec"]


def test_thread_context_independence():
    # results must not depend on gmpy2's ambient thread context
    saved = gmpy2.get_context().precision
    try:
        gmpy2.get_context().precision = 11
        x = CTX.ball("0.1") * CTX.ball("0.7") - CTX.ball(Fraction(7, 100))
        assert x.contains(0)
        assert float(x.rad) < 1e-140
    finally:
        gmpy2.get_context().precision = saved
