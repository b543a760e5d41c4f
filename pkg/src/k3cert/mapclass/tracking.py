"""From the certified periodic orbit to arcs in the marked disk.

The real surface is star-shaped seen from the origin, so radial
projection takes it to the unit sphere; stereographic projection from
the north pole followed by a fixed rescale lands everything in the open
unit disk.  The automorphism is tracked through this chain in plain
floats: the outputs are homotopy data, verified combinatorially
downstream, so no ball arithmetic is needed here.
"""

import numpy as np

from ..balls import BallContext
from ..errors import DegeneracyError, PoleError, SubdivisionBudgetError
from ..surface import bundled_orbit_charts, chart_forward
from .disk import MarkedDisk

NORTH = np.array([0.0, 0.0, 1.0])


def _q(p, A=10.0):
    x, y, z = p[..., 0], p[..., 1], p[..., 2]
    return (1 + x * x) * (1 + y * y) * (1 + z * z) + A * x * y * z - 2


def _f(p, A=10.0):
    x, y, z = p[..., 0].copy(), p[..., 1].copy(), p[..., 2].copy()
    x = -x - A * y * z / ((1 + y * y) * (1 + z * z))
    y = -y - A * x * z / ((1 + x * x) * (1 + z * z))
    z = -z - A * x * y / ((1 + x * x) * (1 + y * y))
    return np.stack([x, y, z], axis=-1)


def ray_to_surface(direction, A=10.0):
    """Positive multiples of unit vectors lying on the surface
    (vectorized bisection; the region below the surface is star-shaped,
    so the scaling is unique)."""
    d = np.atleast_2d(np.asarray(direction, dtype=float))
    d = d / np.linalg.norm(d, axis=-1, keepdims=True)
    lo = np.zeros(len(d))
    hi = np.ones(len(d))
    for _ in range(10):
        mask = _q(hi[:, None] * d, A) < 0
        if not mask.any():
            break
        hi[mask] *= 2
    else:
        raise DegeneracyError("a ray does not appear to meet the surface")
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        below = _q(mid[:, None] * d, A) < 0
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    out = (0.5 * (lo + hi))[:, None] * d
    return out[0] if np.asarray(direction).ndim == 1 else out


class DiskProjection:
    """Stereographic chart of the sphere model with a fixed rescale."""

    def __init__(self, scale):
        self.scale = scale

    def to_disk(self, p):
        p = np.asarray(p, dtype=float)
        single = p.ndim == 1
        p = np.atleast_2d(p)
        s = p / np.linalg.norm(p, axis=-1, keepdims=True)
        denom = 1.0 - s[:, 2]
        if np.min(np.abs(denom)) < 1e-12:
            raise PoleError("point projects from the pole")
        out = np.stack([s[:, 0] / denom, s[:, 1] / denom], axis=-1) * self.scale
        return out[0] if single else out

    def from_disk(self, w, A=10.0):
        u = np.atleast_2d(np.asarray(w, dtype=float)) / self.scale
        n2 = np.einsum("ij,ij->i", u, u)
        sphere = np.stack([2 * u[:, 0], 2 * u[:, 1], n2 - 1.0], axis=-1) / (n2 + 1.0)[:, None]
        out = ray_to_surface(sphere, A)
        return out[0] if np.asarray(w).ndim == 1 else out

    def track(self, p, A=10.0):
        """Disk image of f applied to surface points over disk points."""
        return self.to_disk(_f(np.asarray(p, dtype=float), A))


def orbit_marked_disk(A=10.0, prec=256):
    """Project the bundled periodic orbit into the unit disk.

    Returns (disk, projection, successor) where successor[k] is the
    left-to-right index of the f-image of puncture k.
    """
    ctx = BallContext(prec)
    charts = bundled_orbit_charts()
    zero = ctx.ball(0)
    pts = []
    for c in charts:
        sp = chart_forward(c, (zero, zero), ctx)
        pts.append([float(sp.x.mid), float(sp.y.mid), float(sp.z.mid)])
    pts = np.asarray(pts)
    # the north pole is a period-two point of the map; the orbit and its
    # arcs must avoid it and its preimage (the projection center ray)
    sphere = pts / np.linalg.norm(pts, axis=1, keepdims=True)
    if np.min(1.0 - sphere[:, 2]) < 1e-6:
        raise PoleError("an orbit point sits at the projection pole")
    raw = sphere[:, :2] / (1.0 - sphere[:, 2:3])
    scale = 0.8 / np.max(np.hypot(raw[:, 0], raw[:, 1]))
    proj = DiskProjection(scale)
    disk_pts = raw * scale
    order = np.argsort(disk_pts[:, 0])
    ordered = disk_pts[order]
    if np.min(np.diff(ordered[:, 0])) < 1e-9:
        raise DegeneracyError("projected punctures need a general-position nudge")
    disk = MarkedDisk(ordered)
    pos_of_orbit = {int(o): k for k, o in enumerate(order)}
    successor = [pos_of_orbit[(int(order[k]) + 1) % len(order)] for k in range(len(order))]
    surface_pts = pts[order]
    return disk, proj, successor, surface_pts


def straight_arc_points(disk: MarkedDisk, k, samples=64):
    a, b = disk.points[k], disk.points[k + 1]
    t = np.linspace(0.0, 1.0, samples)
    return a[None, :] * (1 - t)[:, None] + b[None, :] * t[:, None]


def track_arc(disk: MarkedDisk, proj: DiskProjection, successor, k,
              A=10.0, tol=None, max_depth=48, budget=400000):
    """Image polyline of the straight arc p_k under the tracked map.

    The parameter grid is refined until consecutive disk images are
    close relative to their distance from the punctures (same fidelity
    rule as the twists), then endpoints are snapped to the image
    punctures.
    """
    if tol is None:
        tol = min(disk.min_gap / 4.0, 0.02)
    pts = straight_arc_points(disk, k, 33)

    def image_of(w):
        w = np.atleast_2d(w)
        return proj.track(proj.from_disk(w, A), A)

    # fidelity near the image endpoints is moot: windings inside the
    # terminal snap ball are endpoint-trivial, so those two punctures
    # are left out of the clearance demand
    ends = {successor[k], successor[k + 1]}
    others = np.array([p for i, p in enumerate(disk.points) if i not in ends])

    params = pts
    images = image_of(params)
    for _ in range(max_depth):
        gaps = np.hypot(*(np.diff(images, axis=0).T))
        clear = np.full(len(images), np.inf)
        for o in others:
            clear = np.minimum(clear, np.hypot(images[:, 0] - o[0], images[:, 1] - o[1]))
        seg_clear = np.minimum(clear[:-1], clear[1:])
        bad = gaps > np.minimum(tol, np.maximum(0.3 * seg_clear, 1e-7))
        if not bad.any():
            break
        mids = 0.5 * (params[:-1][bad] + params[1:][bad])
        mid_imgs = image_of(mids)
        new_params = [params[:1]]
        new_images = [images[:1]]
        mi = 0
        for i in range(len(params) - 1):
            if bad[i]:
                new_params.append(mids[mi : mi + 1])
                new_images.append(mid_imgs[mi : mi + 1])
                mi += 1
            new_params.append(params[i + 1 : i + 2])
            new_images.append(images[i + 1 : i + 2])
        params = np.concatenate(new_params, axis=0)
        images = np.concatenate(new_images, axis=0)
        if len(params) > budget:
            raise SubdivisionBudgetError("arc tracking exceeded its sample budget")
    else:
        raise SubdivisionBudgetError("arc tracking did not converge")
    out = np.asarray(images)
    out[0] = disk.points[successor[k]]
    out[-1] = disk.points[successor[k + 1]]
    return out


def tracked_arc_data(disk, proj, successor, k, A=10.0):
    return disk.extract(track_arc(disk, proj, successor, k, A))
