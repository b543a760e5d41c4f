"""Exact integer/rational linear algebra on the rank-12 curve lattice.

The lattice W is spanned by twelve rational curves living over the
points at infinity of the three projective factors.  All arithmetic in
this module is exact (ints and Fractions); the only rounding happens in
`spectral_radius`, which returns a Ball.
"""

from fractions import Fraction

from .balls import Ball, BallContext
from .errors import FactorError, IntegralityError, SingularError

DIM = 12

# Intersection matrix of the twelve curves p_1..p_12.
M_INTERSECTION = (
    (-2, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 1),
    (0, -2, 0, 0, 0, 1, 0, 0, 0, 0, 1, 1),
    (0, 0, -2, 0, 0, 0, 1, 1, 1, 0, 0, 0),
    (0, 0, 0, -2, 0, 0, 1, 1, 0, 1, 0, 0),
    (1, 0, 0, 0, -2, 0, 0, 0, 1, 1, 0, 0),
    (0, 1, 0, 0, 0, -2, 0, 0, 1, 1, 0, 0),
    (0, 0, 1, 1, 0, 0, -2, 0, 0, 0, 1, 0),
    (0, 0, 1, 1, 0, 0, 0, -2, 0, 0, 0, 1),
    (0, 0, 1, 0, 1, 1, 0, 0, -2, 0, 0, 0),
    (0, 0, 0, 1, 1, 1, 0, 0, 0, -2, 0, 0),
    (1, 1, 0, 0, 0, 0, 1, 0, 0, 0, -2, 0),
    (1, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, -2),
)

# Pairings of the first involution's images: S[i][j] = <sigma_1 p_i | p_j>.
S_PAIRING = (
    (-2, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 1),
    (0, -2, 0, 0, 0, 1, 0, 0, 0, 0, 1, 1),
    (0, 0, -2, 0, 0, 0, 1, 1, 1, 0, 0, 0),
    (0, 0, 0, -2, 0, 0, 1, 1, 0, 1, 0, 0),
    (1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0),
    (0, 1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0),
    (0, 0, 1, 1, 0, 0, 0, -2, 0, 0, 0, 1),
    (0, 0, 1, 1, 0, 0, -2, 0, 0, 0, 1, 0),
    (0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0),
    (0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0),
    (1, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, -2),
    (1, 1, 0, 0, 0, 0, 1, 0, 0, 0, -2, 0),
)

# Curve index permutations induced by swapping two of the three
# coordinates of the ambient (P^1)^3; the surface equation is symmetric,
# so conjugating the first involution's action by these yields the
# actions of the other two involutions.
PERM_SWAP_XY = (4, 5, 6, 7, 0, 1, 2, 3, 10, 11, 8, 9)
PERM_SWAP_XZ = (10, 11, 8, 9, 6, 7, 4, 5, 2, 3, 0, 1)


def _perm_matrix(perm):
    return tuple(tuple(1 if j == perm[i] else 0 for j in range(DIM)) for i in range(DIM))

# Fiber classes of the three coordinate projections, in the p-basis
# (1-based curve indices 5,6,9,10 / 1,2,11,12 / 3,4,7,8).
C1 = (0, 0, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0)
C2 = (1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1)
C3 = (0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 0, 0)


# -- basic exact matrix helpers -----------------------------------------


def mat_mul(a, b):
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)) for i in range(n)
    )


def mat_vec(a, v):
    return tuple(sum(a[i][k] * v[k] for k in range(len(v))) for i in range(len(a)))


def transpose(a):
    return tuple(zip(*a))


def identity(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def mat_inverse(a):
    """Exact inverse over Q by Gauss-Jordan elimination."""
    n = len(a)
    rows = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if piv is None:
            raise SingularError("matrix is singular over Q")
        rows[col], rows[piv] = rows[piv], rows[col]
        p = rows[col][col]
        rows[col] = [x / p for x in rows[col]]
        for r in range(n):
            if r != col and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[col])]
    return tuple(tuple(row[n:]) for row in rows)


def pairing(v, w, form=M_INTERSECTION):
    """Intersection pairing <v, w> = v^T M w, exact."""
    return sum(v[i] * sum(form[i][j] * w[j] for j in range(DIM)) for i in range(DIM))


def signature(sym):
    """Signature (n_plus, n_minus) of a symmetric rational matrix by
    congruence diagonalization."""
    n = len(sym)
    a = [[Fraction(x) for x in row] for row in sym]
    plus = minus = 0
    for k in range(n):
        if a[k][k] == 0:
            j = next((j for j in range(k + 1, n) if a[k][j] != 0), None)
            if j is None:
                continue  # zero row and column: rank drop, contributes nothing
            # congruence: add row j into row k, then column j into column k
            for c in range(n):
                a[k][c] += a[j][c]
            for r in range(n):
                a[r][k] += a[r][j]
        d = a[k][k]
        if d > 0:
            plus += 1
        else:
            minus += 1
        factors = [a[r][k] / d for r in range(n)]
        for r in range(k + 1, n):
            if factors[r] != 0:
                for c in range(n):
                    a[r][c] -= factors[r] * a[k][c]
        for c in range(k + 1, n):
            if factors[c] != 0:
                for r in range(n):
                    a[r][c] -= factors[c] * a[r][k]
    return plus, minus


# -- module operations ---------------------------------------------------


def build_intersection_matrices():
    return M_INTERSECTION, S_PAIRING


def induced_action(k: int):
    """Action of the k-th involution on W (integer 12x12 matrix).

    k = 1 is derived as M^{-1} S and checked to be integral; k = 2, 3
    follow by conjugating with the coordinate-swap permutations.  All
    three are verified to preserve the form and square to the identity.
    """
    if k == 1:
        minv = mat_inverse(M_INTERSECTION)
        prod = mat_mul(minv, [[Fraction(x) for x in row] for row in S_PAIRING])
        out = []
        for row in prod:
            irow = []
            for x in row:
                if x.denominator != 1:
                    raise IntegralityError(f"M^-1 S has non-integer entry {x}")
                irow.append(int(x))
            out.append(tuple(irow))
        act = tuple(out)
    elif k == 2:
        p = _perm_matrix(PERM_SWAP_XY)
        act = mat_mul(p, mat_mul(induced_action(1), p))
    elif k == 3:
        p = _perm_matrix(PERM_SWAP_XZ)
        act = mat_mul(p, mat_mul(induced_action(1), p))
    else:
        raise ValueError("k must be 1, 2 or 3")
    _verify_isometry(act)
    return act

def _verify_isometry(act):
    if mat_mul(act, act) != identity(DIM):
        raise IntegralityError("induced action is not an involution")
    if mat_mul(transpose(act), mat_mul(M_INTERSECTION, act)) != M_INTERSECTION:
        raise IntegralityError("induced action does not preserve the form")


def f_star():
    """Action of the composed automorphism on W."""
    s1 = induced_action(1)
    s2 = induced_action(2)
    s3 = induced_action(3)
    return mat_mul(s3, mat_mul(s2, s1))


# -- characteristic polynomial and the Salem factor ----------------------


def charpoly(a):
    """Coefficients of det(xI - a), ascending, exact (Faddeev-LeVerrier)."""
    n = len(a)
    af = [[Fraction(x) for x in row] for row in a]
    coeffs_desc = [Fraction(1)]
    mk = identity(n)
    mk = [[Fraction(x) for x in row] for row in mk]
    for k in range(1, n + 1):
        am = mat_mul(af, mk)
        c = -sum(am[i][i] for i in range(n)) / k
        coeffs_desc.append(c)
        mk = [[am[i][j] + (c if i == j else 0) for j in range(n)] for i in range(n)]
    asc = list(reversed(coeffs_desc))
    out = []
    for c in asc:
        if c.denominator != 1:
            raise IntegralityError("characteristic polynomial not integral")
        out.append(int(c))
    return tuple(out)


def poly_divmod(num, den):
    """Exact division of integer polynomials (ascending coefficients)."""
    num = list(num)
    den = list(den)
    out = [0] * (len(num) - len(den) + 1)
    for k in range(len(out) - 1, -1, -1):
        lead = num[k + len(den) - 1]
        if lead % den[-1] != 0:
            return None, num
        q = lead // den[-1]
        out[k] = q
        for j, d in enumerate(den):
            num[k + j] -= q * d
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    return tuple(out), tuple(num)


def poly_eval_fraction(coeffs, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def poly_eval_ball(coeffs, x: Ball) -> Ball:
    ctx = x.ctx
    acc = ctx.ball(0)
    for c in reversed(coeffs):
        acc = acc * x + ctx.ball(c)
    return acc


def _cyclotomic(d):
    """Coefficients of the d-th cyclotomic polynomial (ascending)."""
    poly = [-1] + [0] * (d - 1) + [1]  # x^d - 1
    for e in range(1, d):
        if d % e == 0:
            q, r = poly_divmod(poly, _cyclotomic(e))
            assert q is not None and all(c == 0 for c in r)
            poly = list(q)
    return tuple(poly)


class SalemData:
    """Characteristic polynomial, its Salem factor, and a root bracket."""

    def __init__(self, char_coeffs, salem_coeffs, cyclotomic_part, bracket):
        self.char_coeffs = tuple(char_coeffs)
        self.salem_coeffs = tuple(salem_coeffs)
        self.cyclotomic_part = tuple(cyclotomic_part)  # list of (d, multiplicity)
        self.bracket = bracket  # (Fraction lo, Fraction hi) isolating the big root

    def __repr__(self):
        return f"SalemData(salem={self.salem_coeffs}, bracket={self.bracket})"


def salem(fstar_matrix=None) -> SalemData:
    """Characteristic polynomial of the induced action and its Salem factor.

    The factor is obtained by exactly dividing out every cyclotomic
    factor; what remains must be a degree-6 reciprocal polynomial with a
    single root outside the unit circle.
    """
    a = f_star() if fstar_matrix is None else fstar_matrix
    cp = charpoly(a)
    if cp[0] != 1 or cp[-1] != 1 or tuple(reversed(cp)) != cp:
        raise FactorError("characteristic polynomial is not reciprocal with p(0) = 1")
    rest = cp
    cyclo = []
    d = 1
    while len(rest) > 7 and d <= 40:
        phi = _cyclotomic(d)
        mult = 0
        while True:
            q, r = poly_divmod(rest, phi)
            if q is not None and all(c == 0 for c in r) and len(q) >= 1:
                rest = q
                mult += 1
            else:
                break
        if mult:
            cyclo.append((d, mult))
        d += 1
    if len(rest) != 7:
        raise FactorError(f"no degree-6 Salem factor found (left degree {len(rest) - 1})")
    if tuple(reversed(rest)) != rest:
        raise FactorError("degree-6 factor is not reciprocal")
    # bracket the unique root > 1 by integer sign changes
    lo = None
    for k in range(1, 16):
        if poly_eval_fraction(rest, Fraction(k)) < 0 and poly_eval_fraction(rest, Fraction(k + 1)) > 0:
            lo = Fraction(k)
            break
    if lo is None:
        raise FactorError("failed to bracket the Salem root in [1, 16]")
    return SalemData(cp, rest, cyclo, (lo, lo + 1))


def spectral_radius(data: SalemData, digits: int = 6) -> Ball:
    """Ball enclosing the leading root of the Salem factor.

    Sign-change bisection (exact rationals) narrows the bracket, then
    interval Newton in ball arithmetic polishes to the requested number
    of decimal digits plus two guard digits.
    """
    coeffs = data.salem_coeffs
    deriv = tuple(i * c for i, c in enumerate(coeffs))[1:]
    lo, hi = data.bracket
    tol = Fraction(1, 10 ** (digits + 2))
    # bisect until reasonably tight; keeps Newton safely inside the bracket
    while hi - lo > Fraction(1, 1024):
        mid = (lo + hi) / 2
        v = poly_eval_fraction(coeffs, mid)
        if v == 0:
            lo = hi = mid
            break
        if v < 0:
            lo = mid
        else:
            hi = mid
    prec = max(64, int(digits * 3.4) + 64)
    ctx = BallContext(prec)
    x = ctx.from_endpoints(lo, hi)
    for _ in range(64):
        flo, fhi = x.interval_fractions()
        if fhi - flo <= tol:
            break
        m = ctx.ball((flo + fhi) / 2)
        fx = poly_eval_ball(coeffs, m)
        fpx = poly_eval_ball(deriv, x)
        try:
            step = fx / fpx
        except Exception:
            break
        candidate = m - step
        clo, chi = candidate.interval_fractions()
        nlo, nhi = max(clo, flo), min(chi, fhi)
        if nhi < nlo:
            break
        if nhi - nlo >= fhi - flo:
            # Newton stalled; fall back to one exact bisection step
            mid = (flo + fhi) / 2
            if poly_eval_fraction(coeffs, mid) < 0:
                nlo, nhi = mid, fhi
            else:
                nlo, nhi = flo, mid
        x = ctx.from_endpoints(nlo, nhi)
    return x


ENTROPY_DIGITS_DEFAULT = 6


def pairing_growth(c, n: int):
    """[<c, (f*)^k c> for k = 0..n], exact integers."""
    fs = f_star()
    out = []
    v = tuple(c)
    for _ in range(n + 1):
        out.append(pairing(c, v))
        v = mat_vec(fs, v)
    return out
