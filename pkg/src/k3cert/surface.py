"""The (2,2,2) surface, its three involutions, and the discriminant charts.

Everything is evaluated in ball arithmetic.  The affine surface is the
zero set of q(x,y,z) = (1+x^2)(1+y^2)(1+z^2) + A x y z - 2 with A = 10
by default; each involution flips one coordinate along the fibers of
the projection that forgets it.
"""

import json
from fractions import Fraction
from importlib import resources

from .balls import Ball, BallContext, BallVec
from .errors import DomainError

DEFAULT_A = 10


class SurfacePoint:
    """Affine point with ball coordinates."""

    __slots__ = ("x", "y", "z")

    def __init__(self, x: Ball, y: Ball, z: Ball):
        self.x, self.y, self.z = x, y, z

    def coords(self):
        return (self.x, self.y, self.z)

    def __repr__(self):
        return f"SurfacePoint({self.x!r}, {self.y!r}, {self.z!r})"

    def certified_on_surface(self, A) -> bool:
        return eval_q(self, A).contains(0)


def eval_q(p: SurfacePoint, A) -> Ball:
    """Ball containing q_A(p)."""
    x, y, z = p.coords()
    one = x.ctx.ball(1)
    return (one + x * x) * (one + y * y) * (one + z * z) + A * x * y * z - 2


def _alpha(u: Ball, v: Ball) -> Ball:
    """u v / ((1+u^2)(1+v^2)); bounded by 1/4 * ... <= 1."""
    one = u.ctx.ball(1)
    return (u * v) / ((one + u * u) * (one + v * v))


def sigma(i: int, p: SurfacePoint, A) -> SurfacePoint:
    """The i-th involution (i in {1,2,3}), defined on all of R^3."""
    x, y, z = p.coords()
    if i == 1:
        return SurfacePoint(-x - A * _alpha(y, z), y, z)
    if i == 2:
        return SurfacePoint(x, -y - A * _alpha(x, z), z)
    if i == 3:
        return SurfacePoint(x, y, -z - A * _alpha(x, y))
    raise ValueError("involution index must be 1, 2 or 3")


def eval_f(p: SurfacePoint, A) -> SurfacePoint:
    """f = sigma_3 o sigma_2 o sigma_1."""
    return sigma(3, sigma(2, sigma(1, p, A), A), A)


def eval_f_inverse(p: SurfacePoint, A) -> SurfacePoint:
    """f^{-1} = sigma_1 o sigma_2 o sigma_3 (involutions reversed)."""
    return sigma(1, sigma(2, sigma(3, p, A), A), A)


def reflection(p: SurfacePoint) -> SurfacePoint:
    """Reflection through the plane {x = -z}; conjugates f to f^{-1}."""
    return SurfacePoint(-p.z, p.y, -p.x)


def conjugation_check(p: SurfacePoint, A) -> Ball:
    """|| rho(f(p)) - f^{-1}(rho(p)) ||_2; contains 0 for any p."""
    a = reflection(eval_f(p, A))
    b = eval_f_inverse(reflection(p), A)
    return BallVec([a.x - b.x, a.y - b.y, a.z - b.z]).norm2()


# -- discriminant and the two solution branches --------------------------


def discriminant(x: Ball, y: Ball, A=DEFAULT_A) -> Ball:
    """Discriminant of q in its third variable, evaluated at (x, y)."""
    ctx = x.ctx
    one = ctx.ball(1)
    Ab = ctx.ball(A) if not isinstance(A, Ball) else A
    P = one + x * x
    Q = one + y * y
    return Ab * Ab * x * x * y * y + 8 * P * Q - 4 * P * P * Q * Q


def p_pm(branch: int, x: Ball, y: Ball, A=DEFAULT_A) -> Ball:
    """Solution branch (-A x y + branch*sqrt(D)) / (2(1+x^2)(1+y^2)).

    Requires the discriminant ball to be strictly positive.
    """
    ctx = x.ctx
    one = ctx.ball(1)
    Ab = ctx.ball(A) if not isinstance(A, Ball) else A
    disc = discriminant(x, y, Ab)
    if not disc.strictly_positive():
        raise DomainError("discriminant enclosure reaches <= 0")
    root = disc.sqrt()
    P = one + x * x
    Q = one + y * y
    num = -Ab * x * y + (root if branch > 0 else -root)
    return num / (2 * P * Q)


# -- charts ---------------------------------------------------------------


class ChartSpec:
    """Chart of the surface: fills coordinate `axis` with a solution
    branch, the other two coordinates are free (in increasing axis
    order), centered at the exact rational base point (a, b)."""

    __slots__ = ("axis", "branch", "a", "b")

    def __init__(self, axis: int, branch: int, a, b):
        if axis not in (1, 2, 3):
            raise ValueError("axis must be 1, 2 or 3")
        if branch not in (1, -1):
            raise ValueError("branch must be +1 or -1")
        self.axis = axis
        self.branch = branch
        self.a = a if isinstance(a, Fraction) else Fraction(a)
        self.b = b if isinstance(b, Fraction) else Fraction(b)

    def __repr__(self):
        sign = "+" if self.branch > 0 else "-"
        return f"ChartSpec(Psi_{self.axis}^{sign} at ({float(self.a):.6f}, {float(self.b):.6f}))"

    def base_balls(self, ctx: BallContext):
        return ctx.ball(self.a), ctx.ball(self.b)

    def free_axes(self):
        return tuple(k for k in (1, 2, 3) if k != self.axis)


def chart_forward(chart: ChartSpec, w, ctx: BallContext, A=DEFAULT_A) -> SurfacePoint:
    """Point of the surface at chart coordinates w = (w0, w1)."""
    a, b = chart.base_balls(ctx)
    u = a + w[0]
    v = b + w[1]
    filled = p_pm(chart.branch, u, v, A)
    coords = {}
    fa, fb = chart.free_axes()
    coords[fa], coords[fb] = u, v
    coords[chart.axis] = filled
    return SurfacePoint(coords[1], coords[2], coords[3])


def chart_inverse(chart: ChartSpec, p: SurfacePoint, ctx: BallContext) -> BallVec:
    """Projection back to chart coordinates (defined everywhere)."""
    a, b = chart.base_balls(ctx)
    fa, fb = chart.free_axes()
    coords = {1: p.x, 2: p.y, 3: p.z}
    return BallVec([coords[fa] - a, coords[fb] - b])


# -- the bundled pseudo-orbit ---------------------------------------------


def load_orbit_json(text: str):
    """Parse a pseudo-orbit file: [{index, axis, branch, a, b}, ...]."""
    raw = json.loads(text)
    entries = sorted(raw, key=lambda e: e["index"])
    charts = []
    for k, e in enumerate(entries):
        if e["index"] != k:
            raise ValueError("pseudo-orbit indices must be 0..n-1")
        branch = {"+": 1, "-": -1, 1: 1, -1: -1}[e["branch"]]
        charts.append(ChartSpec(int(e["axis"]), branch, Fraction(e["a"]), Fraction(e["b"])))
    return charts


def bundled_orbit_charts():
    text = resources.files("k3cert.data").joinpath("table1.json").read_text()
    return load_orbit_json(text)


# -- chart transitions ----------------------------------------------------


def transition(charts, i: int, w, ctx: BallContext, A=DEFAULT_A) -> BallVec:
    """Chart expression of f from chart i to chart i+1 (mod n).

    Checks that both the source and the image coordinates have a
    certified positive discriminant.
    """
    n = len(charts)
    src = charts[i % n]
    dst = charts[(i + 1) % n]
    p = chart_forward(src, w, ctx, A)
    fp = eval_f(p, A)
    out = chart_inverse(dst, fp, ctx)
    a, b = dst.base_balls(ctx)
    if not discriminant(a + out[0], b + out[1], A).strictly_positive():
        raise DomainError(f"image of transition {i} leaves the target chart domain")
    return out


def residual(charts, i: int, ctx: BallContext, A=DEFAULT_A) -> Ball:
    """||f_i^c(0)||_2: how far chart i's base point is from closing up."""
    zero = ctx.ball(0)
    return transition(charts, i, (zero, zero), ctx, A).norm2()


# -- optional Newton refinement -------------------------------------------


def refine_orbit(charts, ctx: BallContext, A=DEFAULT_A, iterations: int = 1):
    """One or more damped Newton sweeps on the closing equations.

    Returns a new chart list with adjusted base points (same axes and
    branches).  Works on midpoints; rigor comes later from re-checking
    residuals, not from this utility.
    """
    from fractions import Fraction as F

    from .jets import jacobian_at_zero

    charts = list(charts)
    n = len(charts)
    for _ in range(iterations):
        # residual vector r_i = f_i^c(0) and block jacobians L_i
        rs, ls = [], []
        zero = ctx.ball(0)
        for i in range(n):
            rs.append(transition(charts, i, (zero, zero), ctx, A))
            ls.append(jacobian_at_zero(charts, i, ctx, A))
        # Solve (L - I) shift = -r in the cyclic block structure by float LU
        import numpy as np

        big = np.zeros((2 * n, 2 * n))
        rhs = np.zeros(2 * n)
        for i in range(n):
            j = (i + 1) % n
            li = np.array([[float(ls[i][r, c].mid) for c in range(2)] for r in range(2)])
            big[2 * j : 2 * j + 2, 2 * i : 2 * i + 2] = li
            big[2 * j : 2 * j + 2, 2 * j : 2 * j + 2] -= np.eye(2)
            rhs[2 * j : 2 * j + 2] = -np.array([float(rs[i][0].mid), float(rs[i][1].mid)])
        shift = np.linalg.solve(big, rhs)
        out = []
        for i, c in enumerate(charts):
            da = F(shift[2 * i]).limit_denominator(10**40)
            db = F(shift[2 * i + 1]).limit_denominator(10**40)
            out.append(ChartSpec(c.axis, c.branch, c.a + da, c.b + db))
        charts = out
    return charts
