"""2-jets of the surface maps, with matrix composition.

A 2-jet of a map F: R^n -> R^m acts on derivative data of scalar
functions by precomposition.  We store it as a d(n) x d(m) matrix of
balls, d(2) = 5 and d(3) = 9, rows indexed by the source data
(x_1, .., x_n, x_1^2, .., x_n^2, cross terms), columns by the target
data.  Composition is matrix multiplication:
J(f o g) at x = J(g) at x  *  J(f) at g(x).
"""

from .balls import Ball, BallContext, BallMat
from .errors import DomainError
from .surface import DEFAULT_A, ChartSpec, discriminant


def _index_pairs(n):
    pairs = [(i, i) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            pairs.append((i, j))
    return pairs


def jet_dim(n):
    return n + n * (n + 1) // 2


class Jet2:
    """2-jet of a map between affine spaces, with its image point."""

    __slots__ = ("src_dim", "dst_dim", "point", "matrix")

    def __init__(self, src_dim, dst_dim, point, matrix: BallMat):
        self.src_dim = src_dim
        self.dst_dim = dst_dim
        self.point = tuple(point)
        self.matrix = matrix

    def compose(self, after: "Jet2") -> "Jet2":
        """Jet of (after o self); `after` must be based at self.point."""
        if self.dst_dim != after.src_dim:
            raise ValueError("jet dimensions do not chain")
        return Jet2(self.src_dim, after.dst_dim, after.point, self.matrix.matmul(after.matrix))

    def first_derivative(self) -> BallMat:
        """Jacobian (dst_dim x src_dim) of the underlying map."""
        return BallMat(
            [[self.matrix[i, a] for i in range(self.src_dim)] for a in range(self.dst_dim)]
        )

    def entry_sup(self):
        """Upper bound (float) of the largest entry magnitude."""
        best = 0.0
        for row in self.matrix.rows:
            for e in row:
                up = float(abs(e).upper())
                if up > best:
                    best = up
        return best


def jet_from_partials(point, first, second) -> Jet2:
    """Build a Jet2 from first partials (m x n) and symmetric second
    partials (for each component, n x n)."""
    m = len(first)
    n = len(first[0])
    ctx = first[0][0].ctx
    zero = ctx.ball(0)
    src_pairs = _index_pairs(n)
    dst_pairs = _index_pairs(m)
    rows = []
    for i in range(n):
        row = [first[a][i] for a in range(m)]
        row += [zero] * len(dst_pairs)
        rows.append(row)
    for (i, j) in src_pairs:
        row = [second[a][i][j] for a in range(m)]
        for (a, b) in dst_pairs:
            if a == b:
                row.append(first[a][i] * first[a][j])
            else:
                row.append(first[a][i] * first[b][j] + first[b][i] * first[a][j])
        rows.append(row)
    return Jet2(n, m, point, BallMat(rows))


def jet_identity(point, ctx) -> Jet2:
    n = len(point)
    one, zero = ctx.ball(1), ctx.ball(0)
    first = [[one if i == a else zero for i in range(n)] for a in range(n)]
    second = [[[zero] * n for _ in range(n)] for _ in range(n)]
    return jet_from_partials(point, first, second)


# -- scalar building blocks ----------------------------------------------


def _g_parts(u: Ball):
    """g(u) = u/(1+u^2) with first and second derivatives."""
    ctx = u.ctx
    one = ctx.ball(1)
    den = one + u * u
    g = u / den
    gp = (one - u * u) / (den * den)
    gpp = (2 * u * (u * u - 3)) / (den * den * den)
    return g, gp, gpp


def _h_parts(u: Ball):
    """h(u) = 1/(1+u^2) with first and second derivatives."""
    ctx = u.ctx
    one = ctx.ball(1)
    den = one + u * u
    h = one / den
    hp = (-2 * u) / (den * den)
    hpp = (6 * u * u - 2) / (den * den * den)
    return h, hp, hpp


def alpha_parts(u: Ball, v: Ball):
    """alpha(u,v) = uv/((1+u^2)(1+v^2)) = g(u) g(v), with partials to
    order two, returned as (value, (du, dv), ((duu, duv), (duv, dvv)))."""
    gu, gpu, gppu = _g_parts(u)
    gv, gpv, gppv = _g_parts(v)
    val = gu * gv
    first = (gpu * gv, gu * gpv)
    second = ((gppu * gv, gpu * gpv), (gpu * gpv, gu * gppv))
    return val, first, second


def beta_parts(u: Ball, v: Ball):
    """beta(u,v) = 1/((1+u^2)(1+v^2)) = h(u) h(v), same layout."""
    hu, hpu, hppu = _h_parts(u)
    hv, hpv, hppv = _h_parts(v)
    val = hu * hv
    first = (hpu * hv, hu * hpv)
    second = ((hppu * hv, hpu * hpv), (hpu * hpv, hu * hppv))
    return val, first, second


def discriminant_parts(x: Ball, y: Ball, A=DEFAULT_A):
    """Discriminant D(x,y) with first and second partials."""
    ctx = x.ctx
    one = ctx.ball(1)
    Ab = ctx.ball(A) if not isinstance(A, Ball) else A
    A2 = Ab * Ab
    P = one + x * x
    Q = one + y * y
    val = A2 * x * x * y * y + 8 * P * Q - 4 * P * P * Q * Q
    dx = 2 * A2 * x * y * y + 16 * x * Q - 16 * x * P * Q * Q
    dy = 2 * A2 * x * x * y + 16 * y * P - 16 * y * P * P * Q
    dxx = 2 * A2 * y * y + 16 * Q - 16 * Q * Q * (one + 3 * x * x)
    dyy = 2 * A2 * x * x + 16 * P - 16 * P * P * (one + 3 * y * y)
    dxy = 4 * A2 * x * y + 32 * x * y - 64 * x * y * P * Q
    return val, (dx, dy), ((dxx, dxy), (dxy, dyy))


def p_branch_parts(branch: int, x: Ball, y: Ball, A=DEFAULT_A):
    """Solution branch p(x,y) with first and second partials.

    p = -(A/2) alpha + (branch/2) sqrt(D) beta; requires D > 0 certified.
    """
    ctx = x.ctx
    Ab = ctx.ball(A) if not isinstance(A, Ball) else A
    half = ctx.ball(1) / 2
    sgn = ctx.ball(branch)
    D, (Dx, Dy), ((Dxx, Dxy), (_, Dyy)) = discriminant_parts(x, y, Ab)
    if not D.strictly_positive():
        raise DomainError("discriminant enclosure reaches <= 0")
    s = D.sqrt()
    sx = Dx / (2 * s)
    sy = Dy / (2 * s)
    s3 = 4 * s * s * s
    sxx = Dxx / (2 * s) - (Dx * Dx) / s3
    syy = Dyy / (2 * s) - (Dy * Dy) / s3
    sxy = Dxy / (2 * s) - (Dx * Dy) / s3
    al, (alx, aly), ((alxx, alxy), (_, alyy)) = alpha_parts(x, y)
    be, (bex, bey), ((bexx, bexy), (_, beyy)) = beta_parts(x, y)
    ah = Ab * half
    sh = sgn * half
    val = -ah * al + sh * s * be
    px = -ah * alx + sh * (sx * be + s * bex)
    py = -ah * aly + sh * (sy * be + s * bey)
    pxx = -ah * alxx + sh * (sxx * be + 2 * sx * bex + s * bexx)
    pyy = -ah * alyy + sh * (syy * be + 2 * sy * bey + s * beyy)
    pxy = -ah * alxy + sh * (sxy * be + sx * bey + sy * bex + s * bexy)
    return val, (px, py), ((pxx, pxy), (pxy, pyy))


# -- jets of the surface maps ---------------------------------------------


def jet_sigma(k: int, point, A=DEFAULT_A) -> Jet2:
    """Jet of the k-th involution at an ambient point (x, y, z)."""
    x, y, z = point
    ctx = x.ctx
    one, zero = ctx.ball(1), ctx.ball(0)
    Ab = ctx.ball(A) if not isinstance(A, Ball) else A
    others = {1: (y, z), 2: (x, z), 3: (x, y)}[k]
    val, (du, dv), ((duu, duv), (_, dvv)) = alpha_parts(*others)
    idx = k - 1
    free = [i for i in range(3) if i != idx]
    image = list(point)
    image[idx] = -point[idx] - Ab * val
    first = [[one if i == a else zero for i in range(3)] for a in range(3)]
    first[idx][idx] = -one
    first[idx][free[0]] = -Ab * du
    first[idx][free[1]] = -Ab * dv
    second = [[[zero] * 3 for _ in range(3)] for _ in range(3)]
    u0, v0 = free
    second[idx][u0][u0] = -Ab * duu
    second[idx][v0][v0] = -Ab * dvv
    second[idx][u0][v0] = -Ab * duv
    second[idx][v0][u0] = -Ab * duv
    return jet_from_partials(tuple(image), first, second)


def jet_f(point, A=DEFAULT_A) -> Jet2:
    """Jet of f = sigma_3 o sigma_2 o sigma_1 at an ambient point."""
    j1 = jet_sigma(1, point, A)
    j2 = jet_sigma(2, j1.point, A)
    j3 = jet_sigma(3, j2.point, A)
    return j1.compose(j2).compose(j3)


def jet_chart(chart: ChartSpec, w, ctx: BallContext, A=DEFAULT_A) -> Jet2:
    """Jet of the chart map R^2 -> R^3 at chart coordinates w."""
    a, b = chart.base_balls(ctx)
    u = a + w[0]
    v = b + w[1]
    one, zero = ctx.ball(1), ctx.ball(0)
    val, (pu, pv), ((puu, puv), (_, pvv)) = p_branch_parts(chart.branch, u, v, A)
    fa, fb = (k - 1 for k in chart.free_axes())
    idx = chart.axis - 1
    image = [None, None, None]
    image[fa], image[fb], image[idx] = u, v, val
    first = [[zero, zero] for _ in range(3)]
    first[fa][0] = one
    first[fb][1] = one
    first[idx][0] = pu
    first[idx][1] = pv
    second = [[[zero] * 2 for _ in range(2)] for _ in range(3)]
    second[idx] = [[puu, puv], [puv, pvv]]
    return jet_from_partials(tuple(image), first, second)


def jet_projection(chart: ChartSpec, point, ctx: BallContext) -> Jet2:
    """Jet of the chart inverse: drop the filled axis, recenter."""
    a, b = chart.base_balls(ctx)
    one, zero = ctx.ball(1), ctx.ball(0)
    fa, fb = (k - 1 for k in chart.free_axes())
    image = (point[fa] - a, point[fb] - b)
    first = [[zero] * 3, [zero] * 3]
    first[0][fa] = one
    first[1][fb] = one
    second = [[[zero] * 3 for _ in range(3)] for _ in range(2)]
    return jet_from_partials(image, first, second)


def jet_transition(charts, i: int, w, ctx: BallContext, A=DEFAULT_A) -> Jet2:
    """Jet of f_i^c = (chart i+1)^{-1} o f o (chart i) at w."""
    n = len(charts)
    src = charts[i % n]
    dst = charts[(i + 1) % n]
    jc = jet_chart(src, w, ctx, A)
    jf = jet_f(jc.point, A)
    a, b = dst.base_balls(ctx)
    fa, fb = (k - 1 for k in dst.free_axes())
    img = (jf.point[fa], jf.point[fb])
    if not discriminant(img[0], img[1], A).strictly_positive():
        raise DomainError(f"transition {i} image leaves the target chart domain")
    jp = jet_projection(dst, jf.point, ctx)
    return jc.compose(jf).compose(jp)


def jacobian_at_zero(charts, i: int, ctx: BallContext, A=DEFAULT_A) -> BallMat:
    """L_i = derivative of the i-th transition at the chart origin."""
    zero = ctx.ball(0)
    jt = jet_transition(charts, i, (zero, zero), ctx, A)
    return jt.first_derivative()
