"""Numerical univalence of planar maps and shape classification of their images.

The oracle never looks at Weierstrass data: it only evaluates the map, so it
can be used to cross-check theorem-based certificates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.spatial import cKDTree

from .holofn import DomainSpec, Disk, HoloExpr, boundary_winding, derivative, evaluate
from .holofn import points_in_polygon

UNIVALENT = "univalent"
NOT_UNIVALENT = "not_univalent"
INCONCLUSIVE = "inconclusive"

CONVEX = "convex"
STARLIKE = "starlike_not_convex"
NEITHER = "neither"
UNKNOWN = "unknown"

STARLIKE_CANDIDATES = 17


class ResolutionTooLow(ValueError):
    pass


class NonSimplePolyline(ValueError):
    pass


class DerivativeVanishes(ArithmeticError):
    pass


@dataclass
class UnivalenceReport:
    verdict: str
    jacobian_sign: str
    collision_witness: tuple[complex, complex] | None
    boundary_simple: bool
    grid_resolution: int
    jacobian_counts: dict = field(default_factory=dict)
    jacobian_witness: tuple[complex, complex] | None = None
    boundary_witness: tuple[int, int] | None = None
    eps_collide: float = 0.0
    delta_sep: float = 0.0
    unconfirmed_collisions: int = 0
    notes: list = field(default_factory=list)

    def as_dict(self) -> dict:
        def pair(p):
            return None if p is None else [[z.real, z.imag] for z in map(complex, p)]

        return {
            "verdict": self.verdict,
            "jacobianSign": self.jacobian_sign,
            "boundarySimple": self.boundary_simple,
            "gridResolution": self.grid_resolution,
            "jacobianCounts": dict(self.jacobian_counts),
            "jacobianWitness": pair(self.jacobian_witness),
            "collisionWitness": pair(self.collision_witness),
            "unconfirmedCollisions": self.unconfirmed_collisions,
            "epsCollide": self.eps_collide,
            "deltaSep": self.delta_sep,
            "notes": list(self.notes),
        }


@dataclass
class ImageCurve:
    points: np.ndarray
    truncated: bool = False


@dataclass
class ImageShape:
    boundary: np.ndarray
    classification: str
    starlike_center: complex | None = None
    candidate_grid: int = STARLIKE_CANDIDATES


# ---------------------------------------------------------------------------
# polyline geometry


def _cross(a, b):
    return (np.conj(a) * b).imag


def find_self_intersection(poly) -> tuple[int, int] | None:
    """Indices (i, j) of two non-adjacent crossing edges of a closed polyline.

    Edges are swept in order of their left x-coordinate; only edges whose
    x-ranges overlap are tested. Only proper crossings count.
    """
    P = np.asarray(poly, dtype=complex)
    m = len(P)
    if m < 4:
        return None
    A, B = P, np.roll(P, -1)
    xmin = np.minimum(A.real, B.real)
    xmax = np.maximum(A.real, B.real)
    ymin = np.minimum(A.imag, B.imag)
    ymax = np.maximum(A.imag, B.imag)
    order = np.argsort(xmin, kind="stable")
    xs = xmin[order]
    for pos in range(m):
        i = order[pos]
        stop = np.searchsorted(xs, xmax[i], side="right")
        if stop <= pos + 1:
            continue
        j = order[pos + 1 : stop]
        gap = np.abs(j - i)
        j = j[(gap > 1) & (gap < m - 1)]
        j = j[(ymin[j] <= ymax[i]) & (ymax[j] >= ymin[i])]
        if j.size == 0:
            continue
        a, b = A[i], B[i]
        c, d = A[j], B[j]
        o1 = _cross(b - a, c - a)
        o2 = _cross(b - a, d - a)
        o3 = _cross(d - c, a - c)
        o4 = _cross(d - c, b - c)
        hit = (o1 * o2 < 0) & (o3 * o4 < 0)
        if np.any(hit):
            k = int(j[np.argmax(hit)])
            return (int(min(i, k)), int(max(i, k)))
    return None


def _winding_numbers(curve: np.ndarray, pts: np.ndarray) -> np.ndarray:
    d = curve[None, :] - pts[:, None]
    dphi = np.angle(np.roll(d, -1, axis=1) / d)
    return np.rint(dphi.sum(axis=1) / (2 * np.pi)).astype(int)


def _drop_repeats(P: np.ndarray, eps: float) -> np.ndarray:
    keep = np.abs(np.roll(P, -1) - P) > eps
    if not np.any(keep):
        return P[:1]
    return P[keep]


# ---------------------------------------------------------------------------
# oracle


def _fd_jacobian(fmap: Callable, pts: np.ndarray, step: float):
    """Jacobian x_u y_v - x_v y_u by central differences at two step sizes.

    Returns (J, scale, reliable): ``scale`` is (|f_u|^2 + |f_v|^2)/2 and a value
    is reliable when the two step sizes agree to 5% of |J|.
    """
    k = len(pts)
    shifts = np.array([step, -step, 1j * step, -1j * step])
    shifts = np.concatenate([shifts, 2 * shifts])
    vals = fmap((pts[None, :] + shifts[:, None]).ravel()).reshape(8, k)

    def jac(v, s):
        fu = (v[0] - v[1]) / (2 * s)
        fv = (v[2] - v[3]) / (2 * s)
        return _cross(fu, fv), 0.5 * (np.abs(fu) ** 2 + np.abs(fv) ** 2)

    J1, scale = jac(vals[:4], step)
    J2, _ = jac(vals[4:], 2 * step)
    reliable = np.abs(J1 - J2) <= 0.05 * np.abs(J1) + 1e-13 * scale
    return J1, scale, reliable


def univalence_oracle(fmap: Callable, domain: DomainSpec, n: int = 301,
                      boundary_samples: int | None = None,
                      max_confirmations: int = 2000) -> UnivalenceReport:
    """Decide numerically whether ``fmap`` is injective on ``domain``.

    Three stages: (1) Jacobian sign census on an ``n x n`` interior grid plus a
    ring just inside the boundary (a sign change or a vanishing Jacobian rules
    out univalence by Lewy's theorem); (2) image collisions found with a k-d
    tree, confirmed by a boundary-image winding number of at least 2;
    (3) self-intersection test of the boundary image. ``univalent`` requires a
    single-signed Jacobian, no confirmed collision and a simple boundary image;
    a non-simple boundary with nothing else wrong is ``inconclusive``.
    """
    if n < 64:
        raise ResolutionTooLow(f"resolution {n} < 64")
    diam = domain.diameter
    x0, x1, y0, y1 = domain.bbox
    spacing = max(x1 - x0, y1 - y0) / (n - 1)
    margin = 0.5 * spacing
    inset = 1e-6 * diam
    m = boundary_samples or 4 * n

    W = domain.grid(n, margin)
    ring = domain.boundary(m, inset)
    notes = []

    # stage 1
    Jg, sg, okg = _fd_jacobian(fmap, W, min(1e-5 * diam, 0.25 * margin))
    Jb, sb, okb = _fd_jacobian(fmap, ring, 0.25 * inset)
    pts = np.concatenate([W, ring])
    J = np.concatenate([Jg, Jb])
    sc = np.concatenate([sg, sb])
    ok = np.concatenate([okg, okb])
    vanish = ok & (np.abs(J) <= 1e-10 * sc)
    pos = ok & ~vanish & (J > 0)
    neg = ok & ~vanish & (J < 0)
    counts = {"positive": int(pos.sum()), "negative": int(neg.sum()),
              "vanishing": int(vanish.sum()), "unreliable": int((~ok).sum())}
    jwit = None
    if counts["positive"] and counts["negative"]:
        jsign = "mixed"
        jwit = (complex(pts[pos][0]), complex(pts[neg][0]))
    elif counts["vanishing"]:
        jsign = "mixed"
        z = complex(pts[vanish][0])
        jwit = (z, z)
        notes.append("Jacobian vanishes at a sample point")
    elif counts["negative"]:
        jsign = "negative"
    else:
        jsign = "positive"

    # stage 2
    fW = fmap(W)
    fring = fmap(ring)
    allimg = np.concatenate([fW, fring])
    image_diam = float(np.hypot(np.ptp(allimg.real), np.ptp(allimg.imag)))
    eps = image_diam / (8 * n)
    delta = diam / (n / 4)
    tree = cKDTree(np.column_stack([fW.real, fW.imag]))
    pairs = tree.query_pairs(eps, output_type="ndarray")
    if len(pairs):
        pairs = pairs[np.abs(W[pairs[:, 0]] - W[pairs[:, 1]]) > delta]
    collision = None
    unconfirmed = 0
    if len(pairs):
        if jsign == "mixed":
            i, j = pairs[0]
            collision = (complex(W[i]), complex(W[j]))
        else:
            cand = pairs[:max_confirmations]
            wind = np.abs(_winding_numbers(fring, fW[cand[:, 0]]))
            hit = np.flatnonzero(wind >= 2)
            if hit.size:
                i, j = cand[hit[0]]
                collision = (complex(W[i]), complex(W[j]))
            unconfirmed = int(len(pairs) - hit.size)

    # stage 3
    bwit = find_self_intersection(fring)
    simple = bwit is None

    if jsign == "mixed" or collision is not None:
        verdict = NOT_UNIVALENT
    elif simple:
        verdict = UNIVALENT
    else:
        verdict = INCONCLUSIVE
        notes.append("boundary image self-intersects but no interior witness was found")
    if unconfirmed:
        notes.append(f"{unconfirmed} near-coincident image pairs without a degree-2 witness")
    if domain.truncated:
        notes.append("domain is a truncation; verdict applies to the truncated surface")

    return UnivalenceReport(verdict, jsign, collision, simple, n, counts, jwit, bwit,
                            eps, delta, unconfirmed, notes)


# ---------------------------------------------------------------------------
# image boundary and shape


def boundary_image(fmap: Callable, domain: DomainSpec, m: int = 1024,
                   inset: float | None = None) -> ImageCurve:
    """Closed polyline f(boundary), sampled slightly inside the domain."""
    if m < 3:
        raise ValueError("need at least 3 boundary samples")
    inset = 1e-6 * domain.diameter if inset is None else inset
    pts = fmap(domain.boundary(m, inset))
    return ImageCurve(np.asarray(pts, dtype=complex), domain.truncated)


def classify_image(poly, tol: float = 1e-9,
                   candidates: int = STARLIKE_CANDIDATES) -> ImageShape:
    """Convex / starlike / neither for a simple closed polyline.

    Convex when every pair of consecutive edges turns the same way (up to
    ``tol * scale^2``). Otherwise a ``candidates x candidates`` grid of
    interior centers is searched for one seeing the boundary with monotone
    angle.
    """
    if isinstance(poly, ImageCurve):
        poly = poly.points
    P = np.asarray(poly, dtype=complex)
    x0, x1, y0, y1 = P.real.min(), P.real.max(), P.imag.min(), P.imag.max()
    scale = float(np.hypot(x1 - x0, y1 - y0))
    P = _drop_repeats(P, 1e-15 * scale)
    if len(P) < 3 or scale == 0:
        raise NonSimplePolyline("degenerate polyline")
    if find_self_intersection(P) is not None:
        raise NonSimplePolyline("polyline crosses itself")
    area = 0.5 * float(np.sum(_cross(P, np.roll(P, -1))))
    if area < 0:
        P = P[::-1]
    thresh = -tol * scale**2

    E = np.roll(P, -1) - P
    turns = _cross(E, np.roll(E, -1))
    if np.all(turns >= thresh):
        return ImageShape(P, CONVEX, None, candidates)

    xs = np.linspace(x0, x1, candidates)
    ys = np.linspace(y0, y1, candidates)
    C = (xs[None, :] + 1j * ys[:, None]).ravel()
    C = C[points_in_polygon(C, P)]
    cr = _cross(P, np.roll(P, -1))
    cx = float(np.sum((P.real + np.roll(P.real, -1)) * cr) / (6 * abs(area)))
    cy = float(np.sum((P.imag + np.roll(P.imag, -1)) * cr) / (6 * abs(area)))
    C = C[np.argsort(np.abs(C - complex(cx, cy)), kind="stable")]
    for c in C:
        R = P - c
        if np.all(_cross(R, np.roll(R, -1)) >= thresh):
            return ImageShape(P, STARLIKE, complex(c), candidates)
    return ImageShape(P, NEITHER, None, candidates)


# ---------------------------------------------------------------------------
# analytic convexity


def _convexity_test(d1: HoloExpr, d2: HoloExpr, domain: DomainSpec, n: int, m: int,
                    margin: float) -> bool:
    inset = 1e-6 * domain.diameter
    grid = domain.grid(n, margin=inset)
    ring = domain.boundary(m, inset)
    v1g, v1r = evaluate(d1, grid), evaluate(d1, ring)
    mags = np.abs(np.concatenate([v1g, v1r]))
    if np.any(mags <= 1e-14 * np.median(mags)):
        raise DerivativeVanishes("derivative vanishes at a sample point")
    if boundary_winding(v1r) != 0:
        # zeros of the derivative inside: not even locally univalent
        return False
    v2g, v2r = evaluate(d2, grid), evaluate(d2, ring)
    if isinstance(domain, Disk):
        qg = (1 + grid * v2g / v1g).real
        qr = (1 + ring * v2r / v1r).real
        return bool(np.all(qg > margin) and np.all(qr > margin))
    if not domain.convex:
        return False
    tang = np.roll(ring, -1) - np.roll(ring, 1)
    tang = tang / np.abs(tang)
    q = (tang * v2r / v1r).imag * domain.diameter
    return bool(np.all(q > margin))


def analytic_convexity(phi: HoloExpr, domain: DomainSpec, n: int = 128, m: int = 1024,
                       margin: float = -1e-9) -> bool:
    """Convexity of the conformal image phi(domain) from phi' and phi''.

    On disks centred at 0 this is Re(1 + w phi''/phi') > margin on an
    ``n x n`` grid and ``m`` points just inside the boundary. On other convex
    domains the turning rate Im(phi''/phi' * tangent) of the boundary image is
    tested instead.
    """
    d1 = derivative(phi)
    return _convexity_test(d1, derivative(d1), domain, n, m, margin)


def weierstrass_convexity(data, domain: DomainSpec | None = None, n: int = 128,
                          m: int = 1024, margin: float = -1e-9) -> bool:
    """F zero-free and Re(1 + w F'/F) > 0, i.e. h = int F is convex on a disk."""
    domain = data.domain if domain is None else domain
    if not isinstance(domain, Disk):
        raise ValueError("the Weierstrass-data convexity test needs a disk centred at 0")
    return _convexity_test(data.F, data.dF, domain, n, m, margin)
