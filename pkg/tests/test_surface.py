import random
from fractions import Fraction

import pytest

from k3cert import jets as J
from k3cert import surface as S
from k3cert.balls import BallContext, BallMat, BallVec
from k3cert.errors import DomainError

CTX = BallContext(512)
CHARTS = S.bundled_orbit_charts()


def _pt(x, y, z, ctx=CTX):
    return S.SurfacePoint(ctx.ball(x), ctx.ball(y), ctx.ball(z))


def test_q_at_origin_and_on_axis():
    # (1)(1)(1) + 0 - 2: the origin sits strictly inside {q < 0}
    q0 = S.eval_q(_pt(0, 0, 0), 10)
    assert q0.contains(-1) and q0.is_exact
    assert S.eval_q(_pt(1, 0, 0), 10).contains(0)


def test_chart_point_lies_on_surface_tightly():
    zero = CTX.ball(0)
    p = S.chart_forward(CHARTS[0], (zero, zero), CTX)
    q = S.eval_q(p, 10)
    assert q.contains(0)
    assert q.width() < 1e-20


def test_sigma_formulas():
    p = S.sigma(1, _pt(Fraction(3, 2), 0, Fraction(7, 5)), 10)
    assert p.x.contains(Fraction(-3, 2)) and p.y.contains(0)
    p = S.sigma(3, _pt(1, 1, 0), 10)
    assert p.z.contains(Fraction(-5, 2))  # -10/(2*2)
    assert p.x.contains(1) and p.y.contains(1)


def _random_point(rng, on_surface=False):
    while True:
        x = Fraction(rng.randint(-2200, 2200), 1000)
        y = Fraction(rng.randint(-2200, 2200), 1000)
        if not on_surface:
            z = Fraction(rng.randint(-2200, 2200), 1000)
            return _pt(x, y, z)
        xb, yb = CTX.ball(x), CTX.ball(y)
        try:
            if S.discriminant(xb, yb).strictly_positive():
                z = S.p_pm(rng.choice((1, -1)), xb, yb)
                return S.SurfacePoint(xb, yb, z)
        except DomainError:
            continue


def test_involutions_are_involutions_everywhere():
    rng = random.Random(11)
    for _ in range(25):
        p = _random_point(rng)
        for k in (1, 2, 3):
            pp = S.sigma(k, S.sigma(k, p, 10), 10)
            d = BallVec([pp.x - p.x, pp.y - p.y, pp.z - p.z])
            for e in d:
                assert e.contains(0)


def test_on_surface_preservation():
    rng = random.Random(5)
    for _ in range(10):
        p = _random_point(rng, on_surface=True)
        assert S.eval_q(p, 10).contains(0)
        for k in (1, 2, 3):
            assert S.eval_q(S.sigma(k, p, 10), 10).contains(0)


def test_discriminant_values():
    assert S.discriminant(CTX.ball(0), CTX.ball(0)).contains(4)
    a, b = CHARTS[0].base_balls(CTX)
    d = S.discriminant(a, b)
    assert abs(float(d.mid) - 114.24) < 0.01


def test_p_pm_at_origin():
    plus = S.p_pm(1, CTX.ball(0), CTX.ball(0))
    minus = S.p_pm(-1, CTX.ball(0), CTX.ball(0))
    assert plus.contains(1) and minus.contains(-1)
    assert S.eval_q(_pt(0, 0, 1), 10).contains(0)


def test_p_pm_rejects_negative_discriminant():
    with pytest.raises(DomainError):
        S.p_pm(1, CTX.ball(0), CTX.ball(Fraction(5, 2)))


def test_vieta_identities():
    rng = random.Random(2)
    one = CTX.ball(1)
    for _ in range(10):
        x = CTX.ball(Fraction(rng.randint(-900, 900), 1000))
        y = CTX.ball(Fraction(rng.randint(-900, 900), 1000))
        P, Q = one + x * x, one + y * y
        pp = S.p_pm(1, x, y)
        pm = S.p_pm(-1, x, y)
        s = pp + pm + 10 * x * y / (P * Q)
        assert s.contains(0)
        prod = pp * pm - (P * Q - 2) / (P * Q)
        assert prod.contains(0)


def test_chart_roundtrip_and_branch_sign():
    w = (CTX.ball(Fraction(1, 100)), CTX.ball(Fraction(-3, 1000)))
    for c in CHARTS[:4]:
        p = S.chart_forward(c, w, CTX)
        back = S.chart_inverse(c, p, CTX)
        assert back[0].contains(w[0]) and back[1].contains(w[1])
        assert S.eval_q(p, 10).contains(0)


def test_branch_sum_is_vieta():
    # the two branches of chart 3 at the same spot sum to -10uv/((1+u^2)(1+v^2))
    u = CTX.ball(Fraction(1, 5))
    v = CTX.ball(Fraction(-2, 5))
    one = CTX.ball(1)
    zp = S.p_pm(1, u, v)
    zm = S.p_pm(-1, u, v)
    target = -10 * u * v / ((one + u * u) * (one + v * v))
    assert (zp + zm - target).contains(0)


def test_transition_residuals_below_1e29():
    worst = 0.0
    for i in range(10):
        r = S.residual(CHARTS, i, CTX)
        worst = max(worst, float(r.upper()))
    assert worst < 1e-29


def test_transition_index_wraps():
    zero = CTX.ball(0)
    out = S.transition(CHARTS, 9, (zero, zero), CTX)
    a, b = CHARTS[0].base_balls(CTX)
    # lands at chart 0's origin
    assert float(out.norm2().upper()) < 1e-29


def test_perturbed_base_point_blows_up_residual():
    charts = list(CHARTS)
    c = charts[0]
    charts[0] = S.ChartSpec(c.axis, c.branch, c.a + Fraction(1, 1000), c.b)
    r = S.residual(charts, 0, CTX)
    assert float(r.lower()) > 1e-5


def test_conjugation_identity_on_random_points():
    rng = random.Random(23)
    for _ in range(20):
        p = _random_point(rng, on_surface=True)
        d = S.conjugation_check(p, 10)
        assert d.contains(0)
        assert d.width() < 1e-30


def test_orbit_reflection_symmetry():
    # base points satisfy x_i ~ rho(x_{10-i}) to the residual scale
    zero = CTX.ball(0)
    pts = [S.chart_forward(c, (zero, zero), CTX) for c in CHARTS]
    for i in range(10):
        q = S.reflection(pts[(10 - i) % 10])
        d = BallVec([pts[i].x - q.x, pts[i].y - q.y, pts[i].z - q.z]).norm2()
        assert float(d.upper()) < 1e-25


def test_curve_fixed_locus():
    # an exact point of the fixed curve {x = -z}: with x = -z = 1/2 the
    # surface equation becomes 25 y^2 - 40 y - 7 = 0
    t = CTX.ball(Fraction(1, 2))
    y = (40 + CTX.ball(2300).sqrt()) / 50
    p = S.SurfacePoint(t, y, -t)
    assert S.eval_q(p, 10).contains(0)
    r = S.reflection(p)
    for d in (p.x - r.x, p.y - r.y, p.z - r.z):
        assert d.contains(0)
    # the bundled base point approximates the curve to its digit scale
    zero = CTX.ball(0)
    p0 = S.chart_forward(CHARTS[0], (zero, zero), CTX)
    assert float(abs(p0.x + p0.z).upper()) < 1e-29


# -- jets ------------------------------------------------------------------


def test_jet_composition_rule():
    pt = (CTX.ball(Fraction(1, 3)), CTX.ball(Fraction(-1, 7)), CTX.ball(Fraction(2, 5)))
    j1 = J.jet_sigma(1, pt, 10)
    j2 = J.jet_sigma(2, j1.point, 10)
    combined = j1.compose(j2)
    # against direct partials of sigma2 o sigma1 via finite differences
    h = Fraction(1, 10**12)
    big = BallContext(2048)

    def comp(x, y, z):
        p = S.sigma(2, S.sigma(1, S.SurfacePoint(big.ball(x), big.ball(y), big.ball(z)), 10), 10)
        return p.coords()

    base = (Fraction(1, 3), Fraction(-1, 7), Fraction(2, 5))
    for arg in range(3):
        plus = list(base)
        minus = list(base)
        plus[arg] += h
        minus[arg] -= h
        fp = comp(*plus)
        fm = comp(*minus)
        for out in range(3):
            fd = (fp[out] - fm[out]) / big.ball(2 * h)
            jac_entry = combined.matrix[arg, out]
            # second derivatives are bounded, so fd is within O(h^2)
            assert abs(float(fd.mid) - float(jac_entry.mid)) < 1e-8


def test_jet_identity_blocks():
    pt = (CTX.ball(1), CTX.ball(2))
    j = J.jet_identity(pt, CTX)
    for i in range(5):
        for k in range(5):
            assert j.matrix[i, k].contains(1 if i == k else 0)


def test_transition_jet_first_derivatives_match_finite_differences():
    big = BallContext(2048)
    h = Fraction(1, 10**8)
    i = 0
    L = J.jacobian_at_zero(CHARTS, i, CTX)
    for col in range(2):
        w_plus = [big.ball(0), big.ball(0)]
        w_minus = [big.ball(0), big.ball(0)]
        w_plus[col] = big.ball(h)
        w_minus[col] = big.ball(-h)
        fp = S.transition(CHARTS, i, w_plus, big)
        fm = S.transition(CHARTS, i, w_minus, big)
        for row in range(2):
            fd = (fp[row] - fm[row]) / big.ball(2 * h)
            # second-derivative bound 1.4e14 controls the fd truncation error
            tol = 1.4e14 * float(h)
            assert abs(float(fd.mid) - float(L[row, col].mid)) <= tol


def test_newton_refinement_improves_perturbed_orbit():
    charts = list(CHARTS)
    c = charts[2]
    charts[2] = S.ChartSpec(c.axis, c.branch, c.a + Fraction(1, 10**7), c.b)
    before = max(float(S.residual(charts, i, CTX).upper()) for i in range(10))
    refined = S.refine_orbit(charts, CTX, iterations=2)
    after = max(float(S.residual(refined, i, CTX).upper()) for i in range(10))
    assert after < before * 1e-3
