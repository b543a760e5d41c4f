"""Geometric model of the punctured disk and its half-twists.

Punctures have strictly increasing x-coordinates inside the unit disk.
A half-twist about the straight arc joining two x-adjacent punctures is
realized as an explicit plane homeomorphism (rigid half turn in a lens
around the segment, angular interpolation to the identity on the lens
boundary).  Arcs are float polylines; their homotopy class is read off
as crossing data against the vertical lines through the punctures, so
the correctness contract is combinatorial, not metric.
"""

import numpy as np

from ..errors import DegeneracyError
from .arcdata import ArcData, reduced
from .arcdata import reduced as reduced_of

OVER = 1
UNDER = -1


class MarkedDisk:
    """Punctures z_0..z_{n-1} ordered left to right in the open unit disk."""

    def __init__(self, points):
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError("points must be (n, 2)")
        xs = pts[:, 0]
        if not np.all(np.diff(xs) > 0):
            raise ValueError("puncture x-coordinates must be strictly increasing")
        if np.max(np.hypot(pts[:, 0], pts[:, 1])) >= 1:
            raise ValueError("punctures must lie in the open unit disk")
        self.points = pts
        self.n = len(pts)
        gaps = np.diff(xs)
        self.min_gap = float(gaps.min()) if len(gaps) else 1.0
        self._twist_cache = {}
        self._data_cache = {}

    @classmethod
    def collinear(cls, n, lo=-0.7, hi=0.7):
        """Roughly evenly spaced punctures near the axis; small
        deterministic jitter keeps the configuration free of exact
        coincidences under the rigid parts of the twists."""
        xs = np.linspace(lo, hi, n) + 0.003 * np.sin(3.7 * np.arange(n) + 0.4)
        ys = 0.004 * np.cos(2.3 * np.arange(n) + 1.1)
        return cls(np.stack([xs, ys], axis=1))

    def x(self, k):
        return self.points[k, 0]

    def y(self, k):
        return self.points[k, 1]

    # -- crossing extraction ------------------------------------------

    def extract(self, polyline, snap=True) -> ArcData:
        """Arc data of a polyline whose endpoints sit at punctures."""
        poly = np.array(polyline, dtype=float)
        start = self._closest_puncture(poly[0], snap)
        end = self._closest_puncture(poly[-1], snap)
        poly = self._trim_terminal_cluster(poly, start, end)
        xs = self.points[:, 0]
        # interior vertices sitting on a line make crossings ambiguous;
        # nudging them is homotopy-safe because a grazing touch either
        # records nothing or an adjacent cancelling pair
        inner = poly[1:-1, 0]
        near = np.min(np.abs(inner[:, None] - xs[None, :]), axis=1) < 1e-9
        if near.any():
            poly[1:-1, 0] = np.where(near, inner + 3.1e-9, inner)
        x0 = poly[:-1, 0]
        y0 = poly[:-1, 1]
        x1 = poly[1:, 0]
        y1 = poly[1:, 1]
        eps = 1e-12
        lo = np.minimum(x0, x1)
        hi = np.maximum(x0, x1)
        seg_idx, line_idx = np.nonzero(
            (xs[None, :] > lo[:, None] + eps) & (xs[None, :] < hi[:, None] - eps)
        )
        if len(seg_idx) == 0:
            return reduced(ArcData(start, end, ()))
        t = (xs[line_idx] - x0[seg_idx]) / (x1[seg_idx] - x0[seg_idx])
        ycross = y0[seg_idx] + t * (y1[seg_idx] - y0[seg_idx])
        dy = ycross - self.points[line_idx, 1]
        if np.min(np.abs(dy)) < 1e-11:
            k = int(line_idx[np.argmin(np.abs(dy))])
            raise DegeneracyError(f"arc crosses line {k} at its puncture")
        order = np.lexsort((t, seg_idx))
        events = [(int(line_idx[i]), OVER if dy[i] > 0 else UNDER) for i in order]
        return reduced(ArcData(start, end, events))

    def _closest_puncture(self, p, snap):
        d = np.hypot(self.points[:, 0] - p[0], self.points[:, 1] - p[1])
        k = int(np.argmin(d))
        if snap and d[k] > 0.25 * self.min_gap:
            raise DegeneracyError(f"polyline endpoint {p} is not at a puncture (nearest {k}, dist {d[k]:.2e})")
        return k

    def _trim_terminal_cluster(self, poly, start, end):
        """Drop vertices huddled inside a small ball around each
        endpoint puncture and reattach the endpoint directly.

        The ball contains no other puncture, and windings around an
        arc's own endpoint are homotopically trivial, so this never
        changes the class; it removes side-ambiguous micro-segments
        produced by twisting near a moved endpoint.
        """
        r = 0.2 * self.min_gap
        ps, pe = self.points[start], self.points[end]
        i = 1
        while i < len(poly) - 1 and np.hypot(*(poly[i] - ps)) < r:
            i += 1
        j = len(poly) - 2
        while j > i and np.hypot(*(poly[j] - pe)) < r:
            j -= 1
        return np.concatenate([ps[None, :], poly[i : j + 1], pe[None, :]], axis=0)

    # -- synthesis ------------------------------------------------------

    def synthesize(self, data: ArcData) -> np.ndarray:
        """Canonical polyline realizing the (reduced) arc data.

        Each crossing gets a short localized horizontal hop across its
        line; between crossings the polyline moves inside a single
        convex slab, so no unrecorded crossings can occur.
        """
        from .arcdata import walk_slabs

        data = reduced(data)
        slabs = walk_slabs(data)  # validates
        pts = [self.points[data.start].copy()]
        xs = self.points[:, 0]
        h0 = 0.12
        for m, (j, s) in enumerate(data.events):
            # entering slab before the crossing is slabs[m]; the hop is
            # localized around line j
            gap_left = xs[j] - xs[j - 1] if j > 0 else 0.4
            gap_right = xs[j + 1] - xs[j] if j + 1 < self.n else 0.4
            ex = 0.35 * min(gap_left, gap_right, 0.4)
            dirn = 1.0 if slabs[m + 1] > slabs[m] else -1.0
            h = h0 * (1 + 0.013 * (m + 1)) * (1 + 0.07 * j)
            ycross = self.points[j, 1] + s * h
            pts.append(np.array([xs[j] - dirn * ex, ycross]))
            pts.append(np.array([xs[j] + dirn * ex, ycross]))
        pts.append(self.points[data.end].copy())
        return np.asarray(pts)

    # -- half-twists -----------------------------------------------------

    def _twist_frame(self, k):
        """Affine frame and support ellipse for the twist at (k, k+1)."""
        if k in self._twist_cache:
            return self._twist_cache[k]
        p, q = self.points[k], self.points[k + 1]
        c = 0.5 * (p + q)
        u = 0.5 * (q - p)
        d = float(np.hypot(*u))
        e1 = u / d
        e2 = np.array([-e1[1], e1[0]])
        # normalized coordinates: punctures at (+-1, 0)
        others = [self.points[m] for m in range(self.n) if m not in (k, k + 1)]
        rel = [np.array([(o - c) @ e1, (o - c) @ e2]) / d for o in others]
        bound_margin = (1.0 - max(np.hypot(*(pt)) for pt in (p, q))) / d

        def feasible(a, b):
            if max(a, b) >= 0.95 * (bound_margin + 1.0):
                return False
            return all((x / a) ** 2 + (y / b) ** 2 > 1.44 for x, y in rel)

        # prefer a thick interpolation annulus (large a) and only then a
        # thick support (large b): the twist sharpness goes like
        # 1/((1 - rho0) b) with rho0 = (1/a + 1)/2
        best = None
        for a in (2.4, 2.0, 1.7, 1.45, 1.25, 1.12, 1.05, 1.02):
            b = min(0.9, a)
            while b > 1e-4 and not feasible(a, b):
                b *= 0.8
            if b > 1e-4:
                rho0 = 0.5 * (1.0 / a + 1.0)
                score = (1.0 - rho0) * b
                if best is None or score > best[0]:
                    best = (score, a, b)
        if best is None:
            raise DegeneracyError(f"no valid twist support for pair ({k},{k + 1})")
        _, a, b = best
        frame = (c, e1, e2, d, a, b)
        self._twist_cache[k] = frame
        return frame

    def twist_lipschitz(self, k):
        """Conservative Lipschitz constant of the twist map: rotation
        by theta(rho) in circle coordinates has |D| <= 1 + pi/(1-rho0),
        conjugated by the axis-ratio distortion."""
        _, _, _, _, a, b = self._twist_frame(k)
        rho0 = 0.5 * (1.0 / a + 1.0)
        ratio = max(a, b) / min(a, b)
        return 1.25 * ratio * (1.0 + np.pi / (1.0 - rho0))

    def twist_map(self, k, sign):
        """The plane homeomorphism of the half-twist s_k^{sign}.

        The rotation happens in the circle coordinates (xi/a, eta/b),
        where the support levels are round: each level circle rotates
        within itself by the interpolated angle, which makes the map an
        actual homeomorphism (pi-rotation inside, identity outside).
        """
        c, e1, e2, d, a, b = self._twist_frame(k)
        rho0 = 0.5 * (1.0 / a + 1.0)

        def apply(pts):
            pts = np.atleast_2d(pts)
            rel = (pts - c) / d
            u = (rel @ e1) / a
            v = (rel @ e2) / b
            rho = np.hypot(u, v)
            theta = np.where(
                rho <= rho0,
                np.pi,
                np.where(rho >= 1.0, 0.0, np.pi * (1.0 - rho) / (1.0 - rho0)),
            ) * float(sign)
            ct, st = np.cos(theta), np.sin(theta)
            u2 = ct * u - st * v
            v2 = st * u + ct * v
            out = c + d * (np.outer(a * u2, e1) + np.outer(b * v2, e2))
            return out

        return apply

    def _support_radius(self, k):
        c, e1, e2, d, a, b = self._twist_frame(k)
        return d * max(a, b), c

    def _segments_puncture_clearance(self, pts):
        """Per-segment distance to the nearest puncture (vectorized)."""
        a = pts[:-1]
        d = pts[1:] - a
        denom = np.einsum("ij,ij->i", d, d)
        denom[denom == 0] = 1e-300
        out = np.full(len(a), np.inf)
        for p in self.points:
            t = np.clip(np.einsum("ij,ij->i", p - a, d) / denom, 0.0, 1.0)
            proj = a + t[:, None] * d
            dist = np.hypot(proj[:, 0] - p[0], proj[:, 1] - p[1])
            out = np.minimum(out, dist)
        return out

    def _rho(self, pts, k):
        """Elliptic support radius of points in the twist-k frame."""
        c, e1, e2, d, a, b = self._twist_frame(k)
        rel = (np.atleast_2d(pts) - c) / d
        xi = rel @ e1
        eta = rel @ e2
        return np.sqrt((xi / a) ** 2 + (eta / b) ** 2)

    def apply_twist_polyline(self, polyline, k, sign, max_points=600000):
        """Image of a polyline under s_k^{sign}.

        Segments entirely inside the rigid core map exactly (sublevel
        ellipses are convex and the core rotates rigidly) and segments
        entirely outside the support are fixed; only segments touching
        the interpolation annulus are refined, until the Lipschitz bulge
        bound plus the image gap is small against the image's distance
        from the punctures.
        """
        c, e1, e2, d, a, b = self._twist_frame(k)
        rho0 = 0.5 * (1.0 / a + 1.0)
        fmap = self.twist_map(k, sign)
        lip = self.twist_lipschitz(k)
        shape_tol = min(self.min_gap / 4.0, 0.05)
        pts = np.asarray(polyline, dtype=float)
        for _ in range(80):
            img = fmap(pts)
            rho = self._rho(pts, k)
            rho_pair_max = np.maximum(rho[:-1], rho[1:])
            rho_pair_min = np.minimum(rho[:-1], rho[1:])
            rigid = rho_pair_max <= rho0  # convex sublevel: exact image
            # a segment with both ends outside can still dip into the
            # support; detect by distance of endpoints to the centre
            dist_c = np.hypot(pts[:, 0] - c[0], pts[:, 1] - c[1])
            src_gaps = np.hypot(*(np.diff(pts, axis=0).T))
            reach = d * max(a, b)
            misses = (np.minimum(dist_c[:-1], dist_c[1:]) - src_gaps) > reach
            outside = (rho_pair_min >= 1.0) & misses
            active = ~(rigid | outside)
            if not active.any():
                break
            img_gaps = np.hypot(*(np.diff(img, axis=0).T))
            clear = self._segments_puncture_clearance(img)
            # err <= clear/3 keeps the straight-line homotopy between
            # the chord and the true image clear of every puncture
            budget = np.minimum(shape_tol, np.maximum(clear / 3.0, 1e-10))
            err = img_gaps + lip * src_gaps
            bad = (err > budget) & active
            if not bad.any():
                break
            idx = np.nonzero(bad)[0]
            mids = 0.5 * (pts[idx] + pts[idx + 1])
            pts = np.insert(pts, idx + 1, mids, axis=0)
            if len(pts) > max_points:
                raise DegeneracyError("twist refinement exceeded its point budget")
        else:
            raise DegeneracyError("twist refinement did not converge")
        out = fmap(pts)
        # endpoints stay at punctures: snap against float fuzz
        for idx in (0, -1):
            j = self._closest_puncture(out[idx], snap=True)
            out[idx] = self.points[j]
        return out

    def apply_twist(self, data: ArcData, k, sign) -> ArcData:
        """Action of a half-twist on reduced arc data (memoized)."""
        if not (0 <= k < self.n - 1):
            raise ValueError(f"generator index {k} out of range for {self.n} punctures")
        key = (data.start, data.end, data.events, k, sign)
        hit = self._data_cache.get(key)
        if hit is not None:
            return hit
        poly = self.synthesize(data)
        out = self.extract(self.apply_twist_polyline(poly, k, sign))
        self._data_cache[key] = out
        # the inverse twist is known for free
        self._data_cache[(out.start, out.end, out.events, k, -sign)] = reduced_of(data)
        return out


def _segment_point_distance(a, b, p):
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0:
        return float(np.hypot(*(p - a)))
    t = max(0.0, min(1.0, float((p - a) @ ab) / denom))
    proj = a + t * ab
    return float(np.hypot(*(p - proj)))
