"""Certification of the period-10 point: checkable hypotheses of the
quantitative shadowing lemma, the derivative-bound chain, the
hyperbolicity constant, the closed-form floating-point error model, and
interval branch-and-bound for the coordinate range.

Every bound here is one-sided: a "K" field is an upper enclosure of the
quantity it names, and re-running at higher precision can only shrink
enclosures, never weaken a passed certificate.
"""

import json
from fractions import Fraction

from .balls import Ball, BallContext, BallMat, ball_to_json
from .errors import (
    BudgetError,
    CertificationFailure,
    PositivityError,
    PreconditionError,
    SingularError,
)
from .jets import discriminant_parts, jacobian_at_zero
from .surface import DEFAULT_A, bundled_orbit_charts, discriminant, load_orbit_json, residual

EPS_DEFAULT = Fraction(1, 10**5)
EPS_PRIME_DEFAULT = Fraction(1, 10**18)
DELTA_TARGET = Fraction(1, 10**29)


class PseudoOrbit:
    """Chart sequence x_i = chart_i(0); indices cycle mod n."""

    def __init__(self, charts):
        self.charts = list(charts)
        self.n = len(charts)
        self._residuals = {}
        self._jacobians = {}

    @classmethod
    def bundled(cls):
        return cls(bundled_orbit_charts())

    @classmethod
    def from_json(cls, text):
        return cls(load_orbit_json(text))

    def validate(self, ctx: BallContext, A=DEFAULT_A):
        for i, c in enumerate(self.charts):
            a, b = c.base_balls(ctx)
            if not discriminant(a, b, A).strictly_positive():
                raise PositivityError(f"discriminant at base point {i} not certified positive")

    def residuals(self, ctx: BallContext, A=DEFAULT_A):
        key = (ctx.prec, A if not isinstance(A, Ball) else float(A.mid))
        if key not in self._residuals:
            self._residuals[key] = [residual(self.charts, i, ctx, A) for i in range(self.n)]
        return self._residuals[key]

    def jacobians(self, ctx: BallContext, A=DEFAULT_A):
        key = (ctx.prec, A if not isinstance(A, Ball) else float(A.mid))
        if key not in self._jacobians:
            self._jacobians[key] = [jacobian_at_zero(self.charts, i, ctx, A) for i in range(self.n)]
        return self._jacobians[key]


# -- ambient derivative bounds -------------------------------------------


def ambient_derivative_bounds(A, ctx: BallContext):
    """Entrywise sup bounds for Df and D^2f on the real surface.

    Df: each involution changes one coordinate whose partials are
    bounded by max(A,1) entrywise, and a composition of three gives
    3^2 max(A,1)^3.  D^2f: squaring the jet bound per stage gives
    9^2 (2 max(A,1)^2)^3.
    """
    a = Fraction(A) if not isinstance(A, Fraction) else A
    if a == 0:
        raise PreconditionError("A must be nonzero")
    m = max(abs(a), Fraction(1))
    df = 9 * m**3
    d2f = 81 * (2 * m**2) ** 3
    return ctx.ball(df), ctx.ball(d2f)


# -- the discriminant bound ledger ---------------------------------------


class BoundLedger:
    """Certified bounds feeding the second-derivative chain."""

    def __init__(self, **kw):
        self.__dict__.update(kw)

    def summary(self):
        def up(b):
            return float(b.upper()) if isinstance(b, Ball) else float(b)

        return {
            "K": up(self.K),
            "R": up(self.R),
            "M": up(self.M_dd),
            "min_D": float(self.min_D.lower()),
            "third_partial_bound": up(self.third_bound),
            "third_bound_exceeds_2000": bool(self.third_discrepancy),
            "dp_bound": up(self.dp_bound),
            "d2p_bound": up(self.d2p_bound),
            "second_derivative_bound": up(self.second_deriv),
        }


def _max_abs_ball(balls, ctx):
    """Ball enclosing max_i |b_i| over a finite list."""
    los, his = [], []
    for b in balls:
        l, h = b.interval_fractions()
        his.append(max(abs(l), abs(h)))
        los.append(Fraction(0) if l <= 0 <= h else min(abs(l), abs(h)))
    return ctx.from_endpoints(max(los), max(his))


def discriminant_ledger(orbit: PseudoOrbit, ctx: BallContext, A=DEFAULT_A,
                        eps: Fraction = EPS_DEFAULT, third_bound=None) -> BoundLedger:
    """Certified K, R, M over the base points, the inflated sups on the
    eps-balls, positivity of D on the 1e-3 balls, and the chart and
    transition derivative bounds."""
    dvals, firsts, seconds = [], [], []
    for c in orbit.charts:
        a, b = c.base_balls(ctx)
        val, (dx, dy), ((dxx, dxy), (_, dyy)) = discriminant_parts(a, b, A)
        dvals.append(val)
        firsts.extend([dx, dy])
        seconds.extend([dxx, dxy, dyy])
    K = _max_abs_ball(dvals, ctx)
    R = _max_abs_ball(firsts, ctx)
    M_dd = _max_abs_ball(seconds, ctx)
    min_D = min(dvals, key=lambda b: b.interval_fractions()[0])
    if not min_D.strictly_positive():
        raise PositivityError("a base-point discriminant is not certified positive")

    if third_bound is None:
        third_bound = third_partial_bound()
    third_bound = ctx.ball(third_bound)

    sqrt2 = ctx.ball(2).sqrt()
    eb = ctx.ball(eps)

    def chain(e):
        sup2 = sqrt2 * third_bound * e + M_dd
        sup1 = sqrt2 * sup2 * e + R
        sup0 = sqrt2 * sup1 * e + K
        return sup2, sup1, sup0

    sup2, sup1, sup0 = chain(eb)

    # D stays positive on the 1e-3 balls: mean value with the first
    # partial sup at radius 1e-3
    mil = ctx.ball(Fraction(1, 1000))
    _, sup1_mil, _ = chain(mil)
    margin = min_D - sqrt2 * sup1_mil * mil
    if not margin.strictly_positive():
        raise PositivityError("D > 0 on the 1e-3 chart balls could not be certified")

    # D >= 1 on the eps-balls (precondition of the chart bound lemma)
    lower_eps = min_D - sqrt2 * sup1 * eb
    if not (lower_eps.lower() >= 1):
        raise PreconditionError("D >= 1 on the eps-balls could not be certified")

    # integer ceilings used downstream: sup|D| < C1, sup|D'|,|D''| < C2
    c1 = _int_ceiling(sup0)
    c2 = max(_int_ceiling(sup1), _int_ceiling(sup2))
    ledger = BoundLedger(
        K=K, R=R, M_dd=M_dd, min_D=min_D, eps=eps,
        sup_second=sup2, sup_first=sup1, sup_value=sup0,
        C1=c1, C2=c2,
        third_bound=third_bound,
        # proven only when the certified lower bound clears the constant
        third_discrepancy=bool(third_bound.lower() > 2000),
        margin_1e3=margin,
    )
    dp, d2p = chart_derivative_bounds(ledger, ctx)
    ledger.dp_bound = dp
    ledger.d2p_bound = d2p
    ledger.second_deriv = second_derivative_bound(ledger, ctx, A)
    return ledger


def _int_ceiling(b: Ball) -> int:
    _, hi = b.interval_fractions()
    n = int(hi)
    while Fraction(n) < hi:
        n += 1
    return n + (1 if Fraction(n) == hi else 0)


def chart_derivative_bounds(ledger: BoundLedger, ctx: BallContext):
    """Entrywise sups of Dp and D^2p on the eps-balls.

    With 1 <= D <= C1 and first/second partials of D bounded by C2:
      |Dp|   <= 5 + sqrt(C1)/2 + C2/4
      |D^2p| <= 10 + sqrt(C1) + (3/4) C2 + C2^2/8
    """
    c1 = ctx.ball(ledger.C1)
    c2 = ctx.ball(ledger.C2)
    root = c1.sqrt()
    dp = 5 + root / 2 + c2 / 4
    d2p = 10 + root + 3 * c2 / 4 + c2 * c2 / 8
    return dp, d2p


def second_derivative_bound(ledger: BoundLedger, ctx: BallContext, A=DEFAULT_A) -> Ball:
    """Upper bound for max_i ||Df_i^c||_{C^1} on the eps-balls.

    Chain: ||J2(f_i^c)|| <= ||J2(chart)|| ||J2(f)|| ||J2(projection)||,
    the projection jet has operator norm 1, the ambient jet is bounded
    entrywise by max(2 ||Df||^2, ||D^2f||) with a dimension factor 3,
    and the chart jet by max(2 dp^2, d2p) with a factor sqrt(5).
    """
    df, d2f = ambient_derivative_bounds(A, ctx)
    amb_entry = _ball_max(2 * df * df, d2f)
    ambient_op = 3 * amb_entry
    chart_entry = _ball_max(2 * ledger.dp_bound * ledger.dp_bound, ledger.d2p_bound)
    chart_op = ctx.ball(5).sqrt() * chart_entry
    ledger.ambient_jet_factor = ambient_op
    ledger.chart_jet_factor = chart_op
    return ambient_op * chart_op


def _ball_max(a: Ball, b: Ball) -> Ball:
    alo, ahi = a.interval_fractions()
    blo, bhi = b.interval_fractions()
    return a.ctx.from_endpoints(max(alo, blo), max(ahi, bhi))


# -- hyperbolicity ---------------------------------------------------------


class HyperbolicityData:
    """The cyclic block matrix L, its midpoint Frobenius data, and the
    certified bound on ||(L - I)^{-1}||."""

    def __init__(self, blocks, frobenius_inv, c_bound, gershgorin_sigma_lo):
        self.blocks = blocks
        self.frobenius_inv = frobenius_inv
        self.c_bound = c_bound
        self.gershgorin_sigma_lo = gershgorin_sigma_lo


def build_cyclic_matrix(blocks, ctx) -> BallMat:
    """2n x 2n matrix with block (i, i+1) = L_i and block (n-1, 0) =
    L_{n-1}; all other blocks vanish."""
    n = len(blocks)
    zero = ctx.ball(0)
    size = 2 * n
    rows = [[zero] * size for _ in range(size)]
    for i, blk in enumerate(blocks):
        jcol = 2 * ((i + 1) % n) if i < n - 1 else 0
        for r in range(2):
            for c in range(2):
                rows[2 * i + r][jcol + c] = blk[r, c]
    return BallMat(rows)


def gershgorin_sigma_lower(m: BallMat, ctx) -> Fraction:
    """Crude lower bound for the smallest singular value via Gershgorin
    discs of M^T M; clamped at zero (then vacuous but still valid)."""
    n, _ = m.shape
    mt = BallMat([[m[j, i] for j in range(n)] for i in range(n)])
    g = mt.matmul(m)
    best = None
    for i in range(n):
        lo, _ = g[i, i].interval_fractions()
        radius = Fraction(0)
        for j in range(n):
            if j != i:
                l, h = g[i, j].interval_fractions()
                radius += max(abs(l), abs(h))
        bound = lo - radius
        best = bound if best is None else min(best, bound)
    if best is None or best < 0:
        return Fraction(0)
    return _fraction_sqrt_lower(best)


def _fraction_sqrt_lower(q: Fraction) -> Fraction:
    if q <= 0:
        return Fraction(0)
    import gmpy2

    dn = gmpy2.context(precision=80, round=gmpy2.RoundDown)
    x = dn.sqrt(dn.div(gmpy2.mpfr(q.numerator, 128), gmpy2.mpfr(q.denominator, 128)))
    r = Fraction(int(gmpy2.mpq(x).numerator), int(gmpy2.mpq(x).denominator))
    while r * r > q:
        r *= Fraction(1048575, 1048576)
    return r


def hyperbolicity(orbit: PseudoOrbit, ctx: BallContext, A=DEFAULT_A) -> HyperbolicityData:
    """Certified bound on C = ||(L - I)^{-1}||_{op,0}.

    The midpoint matrix is inverted with verified Gaussian elimination;
    its Frobenius norm must come out below 20, which pins the smallest
    singular value of the midpoint matrix above 1/20; an entrywise
    perturbation bound with the ball radii then controls the true L.
    """
    blocks = orbit.jacobians(ctx, A)
    return c_bound_from_blocks(blocks, ctx)


def c_bound_from_blocks(blocks, ctx) -> HyperbolicityData:
    import gmpy2

    big = build_cyclic_matrix(blocks, ctx)
    n2, _ = big.shape
    mid = BallMat([[ctx.ball(e.mid) for e in row] for row in big.rows])
    lmi = mid - BallMat.identity(n2, ctx)
    inv = lmi.inverse()
    frob = inv.frobenius()
    r = ctx._rup.add(big.max_rad(), ctx._zero)
    rq = Fraction(int(gmpy2.mpq(r).numerator), int(gmpy2.mpq(r).denominator))
    flo, fhi = frob.interval_fractions()
    # sigma_min(mid - I) >= 1/fhi; entrywise radius r moves it by at
    # most r*sqrt(2) in the block sup norm
    sigma_lo = 1 / fhi
    shift = _fraction_sqrt_upper_q(2) * rq
    if sigma_lo <= shift:
        raise SingularError("perturbation swamps the smallest singular value")
    c_up = 1 / (sigma_lo - shift)
    c_bound = ctx.from_endpoints(Fraction(0), c_up)
    gersh = gershgorin_sigma_lower(lmi, ctx)
    return HyperbolicityData(blocks, frob, c_bound, gersh)


def _fraction_sqrt_upper_q(q) -> Fraction:
    from .balls import _fraction_sqrt_upper

    return _fraction_sqrt_upper(Fraction(q))


# -- the closed-form floating point error model ---------------------------


def error_model(N: int) -> dict:
    """The closed-form error chain for one chart transition computed in
    N-bit floating point with truncation rounding.

    All values are exact Fractions in terms of r = 2^(1-N).
    """
    if N < 34:
        raise PreconditionError("the error model needs N >= 34 (r <= 1e-10)")
    r = Fraction(1, 2 ** (N - 1))
    d_alpha = 2000 * r
    d_beta = 2000 * r
    d_disc = 10**6 * r
    d_p = Fraction(16, 10) * 10**6 * r
    d_sigma = 10 * d_alpha + 14 * r
    d_f = d_sigma * (1 + 10 + 10**2)
    d_fc = 4 * 10**6 * r
    return {
        "N": N,
        "r": r,
        "delta_alpha": d_alpha,
        "delta_beta": d_beta,
        "delta_D": d_disc,
        "delta_p": d_p,
        "delta_sigma": d_sigma,
        "delta_f": d_f,
        "delta_fc": d_fc,
    }


# -- the certificate -------------------------------------------------------


class ShadowingCertificate:
    """Machine-checkable record of the three hypotheses and the result."""

    def __init__(self, **kw):
        self.__dict__.update(kw)

    @property
    def passed(self):
        return self.h1 and self.h2 and self.h3

    def failed_hypothesis(self):
        # report the most primitive failure first: a residual blow-up
        # surfaces as (3) even though it also sinks the domain argument
        for name, ok in (("(3)", self.h3), ("(2)", self.h2), ("(1)", self.h1)):
            if not ok:
                return name
        return None

    def to_json(self) -> dict:
        return {
            "period": self.period,
            "precision": self.precision,
            "A": str(self.A),
            "epsilon": str(self.eps),
            "epsilon_prime": str(self.eps_prime),
            "residuals": [ball_to_json(b) for b in self.residual_balls],
            "residual_bound": str(self.delta),
            "C_bound": ball_to_json(self.c_bound),
            "C_used": self.c_used,
            "second_derivative_bound": ball_to_json(self.second_deriv),
            "frobenius_inv": ball_to_json(self.frobenius_inv),
            "delta_threshold": str(self.threshold),
            "localization_radius": str(self.localization),
            "hypotheses": {"h1": self.h1, "h2": self.h2, "h3": self.h3},
            "passed": self.passed,
            "ledger": self.ledger.summary(),
        }

    def write(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1, sort_keys=True)
            fh.write("\n")


def recheck(cert_json: dict) -> bool:
    """Replay only the certificate inequalities (no recomputation)."""
    dec = Fraction
    delta = dec(cert_json["residual_bound"])
    threshold = dec(cert_json["delta_threshold"])
    ok = delta < threshold
    ok &= all(cert_json["hypotheses"].values())
    ok &= dec(cert_json["localization_radius"]) == 6 * cert_json["C_used"] * delta
    return bool(ok)


def certify(orbit: PseudoOrbit, ctx: BallContext, A=DEFAULT_A,
            eps: Fraction = EPS_DEFAULT, eps_prime: Fraction = EPS_PRIME_DEFAULT,
            delta_target: Fraction = DELTA_TARGET, check: bool = True) -> ShadowingCertificate:
    """Run the full certification of the pseudo-orbit.

    Hypothesis (1) is discharged through the domain lemma: the image of
    the eps'-ball stays within half a thousandth of the origin, which
    keeps it inside the next chart.  Hypothesis (2) is the quantitative
    threshold; hypothesis (3) is the residual bound itself.
    """
    orbit.validate(ctx, A)
    ledger = discriminant_ledger(orbit, ctx, A, eps)
    hyp = hyperbolicity(orbit, ctx, A)
    res = orbit.residuals(ctx, A)

    # the lemma needs one delta satisfying all three hypotheses; it is
    # fixed up front rather than adapted to the residuals, so that a
    # blown-up orbit fails (3) instead of passing vacuously
    worst = max(b.interval_fractions()[1] for b in res)
    delta = delta_target

    # C: require the certified bound strictly below the integer we use
    c_ball = hyp.c_bound
    c_used = 21
    _, c_hi = c_ball.interval_fractions()
    c_ok = c_hi < c_used

    u2lo, u2hi = ledger.second_deriv.interval_fractions()

    # (1): B_{12 C delta}(0) inside U_i via the eps'-ball argument
    half_mil = Fraction(1, 2000)
    img_ok = eps_prime * _fraction_sqrt_upper_q(2) * u2hi < half_mil
    res_ok_mil = worst < half_mil
    h1 = bool(c_ok and img_ok and res_ok_mil and 12 * c_used * delta <= eps_prime)

    # (2): 12 C delta < 1/(16 C ||D^2 f^c||)
    threshold2 = Fraction(1, 12 * c_used * 16 * c_used) / u2hi
    h2 = bool(c_ok and delta < threshold2)

    # (3): residuals strictly below delta
    h3 = bool(worst < delta)

    threshold = min(eps_prime / (12 * c_used), threshold2)
    localization = 6 * c_used * delta

    cert = ShadowingCertificate(
        period=orbit.n,
        precision=ctx.prec,
        A=A,
        eps=eps,
        eps_prime=eps_prime,
        residual_balls=res,
        delta=delta,
        c_bound=c_ball,
        c_used=c_used,
        second_deriv=ledger.second_deriv,
        frobenius_inv=hyp.frobenius_inv,
        threshold=threshold,
        localization=localization,
        h1=h1,
        h2=h2,
        h3=h3,
        ledger=ledger,
        hyperbolicity=hyp,
    )
    if check and not cert.passed:
        raise CertificationFailure(cert.failed_hypothesis(), f"delta={float(delta):.3e}")
    return cert


def residual_radius_check(orbit: PseudoOrbit, precisions=(64, 128, 256, 512), A=DEFAULT_A):
    """Ball radii of the residuals must stay below the closed-form model."""
    out = {}
    for N in precisions:
        ctx = BallContext(N)
        model = error_model(N)["delta_fc"]
        worst = Fraction(0)
        for b in orbit.residuals(ctx, A):
            rq = b.rad_fraction()
            worst = max(worst, rq)
        out[N] = (worst, model, worst <= model)
    return out


# -- interval branch and bound over the feasible square --------------------


def _disc_box(ctx, x0, x1, y0, y1, A=DEFAULT_A):
    x = ctx.from_endpoints(x0, x1)
    y = ctx.from_endpoints(y0, y1)
    return discriminant(x, y, A)


def _outside_refuted(ctx, A=DEFAULT_A, depth=8):
    """The feasible set lies inside [-3,3]^2: refute D >= 0 on the
    compactified outer regions.

    With x = 1/u: G1(u,y) = u^4 D(1/u, y) must be negative on
    [-1/3,1/3] x [-3,3]; with both inverted: G2(u,v) = u^4 v^4 D(1/u,1/v)
    negative on [-1/3,1/3]^2.  Symmetry in x <-> y covers the rest.
    """
    one = ctx.ball(1)
    Ab = ctx.ball(A)

    def g1(u, y):
        uu = u * u
        Q = one + y * y
        return Ab * Ab * y * y * uu + 8 * uu * (uu + one) * Q - 4 * (uu + one) * (uu + one) * Q * Q

    def g2(u, v):
        uu, vv = u * u, v * v
        return (Ab * Ab * uu * vv + 8 * uu * vv * (uu + one) * (vv + one)
                - 4 * (uu + one) * (uu + one) * (vv + one) * (vv + one))

    third = Fraction(1, 3)

    def refute(fn, box, depth_left):
        (x0, x1, y0, y1) = box
        val = fn(ctx.from_endpoints(x0, x1), ctx.from_endpoints(y0, y1))
        if val.strictly_negative():
            return True
        if depth_left == 0:
            return False
        xm, ym = (x0 + x1) / 2, (y0 + y1) / 2
        return all(
            refute(fn, b, depth_left - 1)
            for b in ((x0, xm, y0, ym), (xm, x1, y0, ym), (x0, xm, ym, y1), (xm, x1, ym, y1))
        )

    if not refute(g1, (-third, third, Fraction(-3), Fraction(3)), depth):
        return False
    if not refute(g2, (-third, third, -third, third), depth):
        return False
    return True


def coordinate_range_bound(tol: Fraction = Fraction(1, 20), ctx: BallContext = None,
                           A=DEFAULT_A, budget: int = 200000) -> Ball:
    """Certified enclosure of max |x| over the set {D(x, y) >= 0}
    (equivalently over the real surface) by branch and bound."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    ctx = ctx or BallContext(64)
    if not _outside_refuted(ctx, A):
        raise BudgetError("failed to confine the feasible set to [-3,3]^2")
    import heapq

    three = Fraction(3)
    boxes = [(-Fraction(3), three, -three, three)]
    heap = []
    counter = 0
    for b in boxes:
        xm = max(abs(b[0]), abs(b[1]))
        heapq.heappush(heap, (-xm, counter, b))
        counter += 1
    lb = Fraction(0)
    spent = 0
    while heap:
        spent += 1
        if spent > budget:
            raise BudgetError("branch-and-bound budget exhausted")
        neg_xm, _, (x0, x1, y0, y1) = heapq.heappop(heap)
        xm = -neg_xm
        if xm <= lb + tol:
            # neither this box nor anything below it can improve enough
            heapq.heappush(heap, (neg_xm, -1, (x0, x1, y0, y1)))
            break
        d = _disc_box(ctx, x0, x1, y0, y1, A)
        if d.strictly_negative():
            continue
        cx, cy = (x0 + x1) / 2, (y0 + y1) / 2
        centre = discriminant(ctx.ball(cx), ctx.ball(cy), A)
        if centre.strictly_positive():
            lb = max(lb, abs(cx))
        if x1 - x0 >= y1 - y0:
            children = ((x0, cx, y0, y1), (cx, x1, y0, y1))
        else:
            children = ((x0, x1, y0, cy), (x0, x1, cy, y1))
        for child in children:
            cxm = max(abs(child[0]), abs(child[1]))
            if cxm > lb:
                heapq.heappush(heap, (-cxm, counter, child))
                counter += 1
    ub = lb
    while heap:
        neg_xm, _, _ = heapq.heappop(heap)
        ub = max(ub, -neg_xm)
    return ctx.from_endpoints(lb, ub)


_THIRD_BOUND_CACHE = {}


def third_partial_bound(ctx: BallContext = None, A=DEFAULT_A, tol: Fraction = Fraction(300),
                        budget: int = 120000) -> Ball:
    """Certified upper bound of the largest third partial of D over the
    feasible set {D >= 0}, with a feasible-point lower bound."""
    key = (A, tol)
    if ctx is None and key in _THIRD_BOUND_CACHE:
        return _THIRD_BOUND_CACHE[key]
    cached = ctx is None
    ctx = ctx or BallContext(64)
    if not _outside_refuted(ctx, A):
        raise BudgetError("failed to confine the feasible set to [-3,3]^2")
    one = ctx.ball(1)
    Ab = ctx.ball(A)
    A2 = Ab * Ab

    def third_sup(x, y):
        # |D_xxx| = |96 x Q^2|, |D_xxy| = |(4A^2+32)y - 64 y Q (1+3x^2)|
        # and the two symmetric partners
        P = one + x * x
        Q = one + y * y
        cands = [
            abs(96 * x * Q * Q),
            abs(96 * y * P * P),
            abs((4 * A2 + 32) * y - 64 * y * Q * (one + 3 * x * x)),
            abs((4 * A2 + 32) * x - 64 * x * P * (one + 3 * y * y)),
        ]
        acc = cands[0]
        for c in cands[1:]:
            acc = _ball_max(acc, c)
        return acc

    import heapq

    three = Fraction(3)
    heap = []
    counter = 0

    def push(box):
        nonlocal counter
        x = ctx.from_endpoints(box[0], box[1])
        y = ctx.from_endpoints(box[2], box[3])
        val = third_sup(x, y)
        _, hi = val.interval_fractions()
        heapq.heappush(heap, (-hi, counter, box))
        counter += 1

    push((-three, three, -three, three))
    lb = Fraction(0)
    spent = 0
    ub = None
    while heap:
        spent += 1
        if spent > budget:
            raise BudgetError("third-partial branch-and-bound budget exhausted")
        neg_hi, _, (x0, x1, y0, y1) = heapq.heappop(heap)
        hi = -neg_hi
        if hi <= lb + tol:
            ub = hi
            break
        d = _disc_box(ctx, x0, x1, y0, y1, A)
        if d.strictly_negative():
            continue
        cx, cy = (x0 + x1) / 2, (y0 + y1) / 2
        centre = discriminant(ctx.ball(cx), ctx.ball(cy), A)
        if centre.strictly_positive():
            v = third_sup(ctx.ball(cx), ctx.ball(cy))
            lo, _ = v.interval_fractions()
            lb = max(lb, lo)
        if x1 - x0 >= y1 - y0:
            children = ((x0, cx, y0, y1), (cx, x1, y0, y1))
        else:
            children = ((x0, x1, y0, cy), (x0, x1, cy, y1))
        for child in children:
            push(child)
    if ub is None:
        ub = lb
    out = ctx.from_endpoints(lb, max(ub, lb))
    if cached:
        _THIRD_BOUND_CACHE[key] = out
    return out
