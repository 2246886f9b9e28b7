"""Graph / non-graph certificates over the radius rho = |c lambda^2|.

Every certificate comes from a theorem whose hypotheses are re-checked
numerically; ``sweep_validate`` then compares the certificates with the
univalence oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import distance_transform_edt
from scipy.optimize import brentq, minimize, minimize_scalar
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from . import univalence as U
from .holofn import (Disk, DomainSpec, PoleOrBranchCut, Polygon, _sample_closed_polyline,
                     evaluate, points_in_polygon)
from .weierstrass import DeformParams, WeierstrassData, planar_map_fn

ISOTROPIC = "isotropic-convex"
SEEDED = "krust-seeded"
NONGRAPH = "nongraph-annulus"
RESTRICTED = "restricted-disk"
SCHWARZ = "schwarz-disk"
LINEAR_CONN = "linear-connectivity"

# sup |G| <= 1 + SUP_SLACK counts as the |G| < 1 hypothesis (maximum attained on the boundary)
SUP_SLACK = 1e-12
# max of 16-connected grid path length over Euclidean distance
STENCIL_STRETCH = 1 / math.cos(math.atan(1 / 2) / 2)
ENDPOINT_DEPTH = 3.0


class HypothesisFailed(ValueError):
    pass


class SeedOutsideBound(ValueError):
    pass


def _round_endpoint(x: float) -> float:
    """Round to 12 significant digits so ulp noise in sup|G| does not move endpoints."""
    return float(f"{x:.12g}") if math.isfinite(x) else x


# ---------------------------------------------------------------------------
# norms of G


@dataclass
class NormEstimates:
    sup_abs_G: float
    sup_refinement: float
    inf_abs_G: float
    has_interior_zero: bool
    argmax: complex
    argmin: complex
    truncated: bool = False

    def as_dict(self) -> dict:
        return {"supAbsG": self.sup_abs_G, "supRefinement": self.sup_refinement,
                "infAbsG": self.inf_abs_G, "hasInteriorZero": self.has_interior_zero,
                "argmax": [self.argmax.real, self.argmax.imag],
                "argmin": [self.argmin.real, self.argmin.imag],
                "truncated": self.truncated}


def _boundary_curve(domain: DomainSpec):
    """Map t in [0, 1) to the boundary, counter-clockwise."""
    if isinstance(domain, Disk):
        r = domain.radius
        return lambda t: r * np.exp(2j * np.pi * np.asarray(t))
    if isinstance(domain, Polygon):
        v = domain.vertices
    else:
        v = domain.corners()
    seg = np.roll(v, -1) - v
    cum = np.concatenate([[0.0], np.cumsum(np.abs(seg))])
    total = cum[-1]

    def curve(t):
        s = (np.asarray(t, dtype=float) % 1.0) * total
        idx = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(v) - 1)
        return v[idx] + (s - cum[idx]) / np.abs(seg[idx]) * seg[idx]

    return curve


def _abs_on_boundary(G, domain: DomainSpec):
    curve = _boundary_curve(domain)
    inset_pt = domain.diameter * 1e-9

    def absG(t):
        w = curve(t)
        try:
            return np.abs(evaluate(G, w))
        except PoleOrBranchCut:
            # step off the boundary toward the basepoint
            w = w + inset_pt * (domain.basepoint - w) / np.abs(domain.basepoint - w)
            return np.abs(evaluate(G, w))

    return curve, absG


def _refine_boundary(absG, m: int, sign: float, top: int = 8):
    t = np.arange(m) / m
    vals = absG(t)
    order = np.argsort(sign * vals)[::-1][:top]
    best_t, best = t[order[0]], vals[order[0]]
    for k in order:
        res = minimize_scalar(lambda s: -sign * float(absG(s)),
                              bounds=(t[k] - 1 / m, t[k] + 1 / m), method="bounded",
                              options={"xatol": 1e-14})
        v = float(absG(res.x))
        if sign * v > sign * best:
            best, best_t = v, res.x % 1.0
    return float(best), float(best_t), float(vals[order[0]])


def sup_abs_G(data: WeierstrassData, domain: DomainSpec | None = None,
              m: int = 4096) -> tuple[float, float, complex]:
    """sup |G| over the closed domain: boundary samples refined by a bounded
    scalar search near the best samples. Returns (value, refinement, argmax);
    the estimate approaches the true sup from below."""
    domain = data.domain if domain is None else domain
    curve, absG = _abs_on_boundary(data.G, domain)
    best, t, sampled = _refine_boundary(absG, m, +1.0)
    return best, best - sampled, complex(curve(t))


def inf_abs_G(data: WeierstrassData, domain: DomainSpec | None = None, n: int = 129,
              m: int = 4096) -> tuple[float, bool, complex]:
    """inf |G| over the domain. A zero is detected from the winding number of G
    along the boundary and located by Newton's method; otherwise the grid
    minimum is refined locally and compared with the boundary minimum.
    Returns (value, has_zero, argmin)."""
    domain = data.domain if domain is None else domain
    G, dG = data.G, data.dG
    inset = 1e-6 * domain.diameter
    grid = domain.grid(n, margin=inset)
    gv = np.abs(evaluate(G, grid))
    w0 = complex(grid[np.argmin(gv)])
    if np.min(gv) == 0:
        return 0.0, True, w0
    ring = domain.boundary(m, inset)
    winding = _winding(evaluate(G, ring))
    if winding > 0:
        w = w0
        for _ in range(60):
            step = complex(evaluate(G, w) / evaluate(dG, w))
            w -= step
            if abs(step) < 1e-15 * max(1.0, abs(w)):
                break
        if not domain.contains(np.array([w]))[0]:
            w = w0
        return 0.0, True, w

    def objective(x):
        z = complex(x[0], x[1])
        if not domain.contains(np.array([z]))[0]:
            return float(np.max(gv)) + 1.0
        return float(abs(evaluate(G, z)))

    res = minimize(objective, [w0.real, w0.imag], method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-15})
    best, arg = float(np.min(gv)), w0
    if res.fun < best:
        best, arg = float(res.fun), complex(res.x[0], res.x[1])
    curve, absG = _abs_on_boundary(G, domain)
    bmin, t, _ = _refine_boundary(absG, m, -1.0)
    if bmin < best:
        best, arg = bmin, complex(curve(t))
    return best, False, arg


def _winding(values) -> int:
    z = np.asarray(values, dtype=complex)
    return int(round(np.angle(np.roll(z, -1) / z).sum() / (2 * np.pi)))


def norm_estimates(data: WeierstrassData, domain: DomainSpec | None = None) -> NormEstimates:
    domain = data.domain if domain is None else domain
    sup, delta, amax = sup_abs_G(data, domain)
    inf, zero, amin = inf_abs_G(data, domain)
    inf = min(inf, sup)
    return NormEstimates(sup, delta, inf, zero, amax, amin, domain.truncated)


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    def contains(self, rho: float) -> bool:
        above = rho >= self.lo if self.lo_closed else rho > self.lo
        below = rho <= self.hi if self.hi_closed else rho < self.hi
        return above and below

    @property
    def empty(self) -> bool:
        if self.lo < self.hi:
            return False
        return not (self.lo == self.hi and self.lo_closed and self.hi_closed)

    def intersects(self, other: Interval) -> bool:
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo < hi:
            return True
        if lo > hi:
            return False
        return self.contains(lo) and other.contains(lo)

    def as_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi if math.isfinite(self.hi) else "inf",
                "loClosed": self.lo_closed, "hiClosed": self.hi_closed}

    def __str__(self):
        hi = "inf" if not math.isfinite(self.hi) else f"{self.hi:.12g}"
        return (f"{'[' if self.lo_closed else '('}{self.lo:.12g}, {hi}"
                f"{']' if self.hi_closed else ')'}")


@dataclass
class Certificate:
    kind: str  # "graph" or "nongraph"
    theorem: str
    interval: Interval
    hypotheses: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    witness: dict | None = None

    def as_dict(self) -> dict:
        out = {"kind": self.kind, "theorem": self.theorem,
               "interval": self.interval.as_dict(), "hypotheses": self.hypotheses,
               "notes": list(self.notes)}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class RegionClassification:
    """Certified graph and non-graph sets on the rho axis; the rest is undetermined."""

    certified_graph: list = field(default_factory=list)
    certified_nongraph: list = field(default_factory=list)
    norms: NormEstimates | None = None
    notes: list = field(default_factory=list)

    def classify(self, rho: float) -> str:
        for cert in self.certified_graph:
            if cert.interval.contains(rho):
                return f"graph:{cert.theorem}"
        for cert in self.certified_nongraph:
            if cert.interval.contains(rho):
                return "nongraph"
        return "undetermined"

    @property
    def graph_radius(self) -> float:
        return max((c.interval.hi for c in self.certified_graph), default=0.0)

    def merge(self, other: RegionClassification) -> RegionClassification:
        return RegionClassification(self.certified_graph + other.certified_graph,
                                    self.certified_nongraph + other.certified_nongraph,
                                    self.norms or other.norms, self.notes + other.notes)

    def conflicts(self) -> list[tuple[str, str]]:
        return [(g.theorem, n.theorem) for g in self.certified_graph
                for n in self.certified_nongraph if g.interval.intersects(n.interval)]

    def as_dict(self) -> dict:
        return {"axis": "rho=|c*lambda^2|",
                "certifiedGraph": [c.as_dict() for c in self.certified_graph],
                "certifiedNongraph": [c.as_dict() for c in self.certified_nongraph],
                "norms": None if self.norms is None else self.norms.as_dict(),
                "notes": list(self.notes)}


def _norms(data, norms):
    return norm_estimates(data) if norms is None else norms


def _check_G(data: WeierstrassData, norms: NormEstimates) -> dict:
    if data.G.is_constant:
        raise HypothesisFailed("G is constant")
    if norms.sup_abs_G > 1 + SUP_SLACK:
        raise HypothesisFailed(f"sup|G| = {norms.sup_abs_G:.17g} exceeds 1")
    return {"G_nonconstant": True, "supAbsG": norms.sup_abs_G,
            "supAbsG_le_1": True, "truncated": norms.truncated}


def _truncation_notes(norms: NormEstimates) -> list:
    if norms.truncated:
        return ["norms computed on the truncated domain; certificate applies to the "
                "truncated surface only"]
    return []


def check_h_convex(data: WeierstrassData, oracle_n: int = 201) -> dict:
    """Evidence that h = int F maps the domain univalently onto a convex set."""
    dom = data.domain
    if isinstance(dom, Disk):
        ok = U.weierstrass_convexity(data)
        evidence = {"method": "Re(1 + w F'/F) > 0 on disk", "convex": ok}
    else:
        ok = U._convexity_test(data.F, data.dF, dom, 128, 1024, -1e-9)
        evidence = {"method": "boundary turning of h", "convex": ok}
        if ok:
            rep = U.univalence_oracle(planar_map_fn(data, DeformParams(0.0, 1.0, 0.0)),
                                      dom, oracle_n)
            evidence["h_oracle"] = rep.verdict
            ok = rep.verdict == U.UNIVALENT
    evidence["h_univalent_convex"] = ok
    return evidence


def region_isotropic(data: WeierstrassData, norms: NormEstimates | None = None,
                     oracle_n: int = 201) -> RegionClassification:
    """Convex h and |G| <= 1 give graphs for rho in [0, 1/sup|G|^2]."""
    norms = _norms(data, norms)
    hyp = _check_G(data, norms)
    evidence = check_h_convex(data, oracle_n)
    hyp.update(evidence)
    if not evidence["h_univalent_convex"]:
        raise HypothesisFailed("h = int F is not certified univalent with convex image")
    bound = _round_endpoint(1.0 / norms.sup_abs_G**2)
    cert = Certificate("graph", ISOTROPIC, Interval(0.0, bound), hyp,
                       _truncation_notes(norms))
    return RegionClassification([cert], [], norms)


def region_seeded(data: WeierstrassData, seed: DeformParams,
                  norms: NormEstimates | None = None, oracle_n: int = 301,
                  m: int = 2048) -> RegionClassification:
    """A seed surface that is a graph over a convex domain, with
    |c0 lambda0^2| <= 1/sup|G|^2, gives graphs for rho in [0, |c0 lambda0^2|]."""
    norms = _norms(data, norms)
    bound = 1.0 / norms.sup_abs_G**2
    if seed.rho > bound * (1 + 1e-12):
        raise SeedOutsideBound(f"seed radius {seed.rho:.17g} exceeds 1/sup|G|^2 = {bound:.17g}")
    f = planar_map_fn(data, seed)
    rep = U.univalence_oracle(f, data.domain, oracle_n)
    hyp = {"seed": seed.as_dict(), "seedRho": seed.rho, "bound": bound,
           "seed_oracle": rep.verdict}
    if rep.verdict != U.UNIVALENT:
        raise HypothesisFailed(f"seed map is {rep.verdict}")
    shape = U.classify_image(U.boundary_image(f, data.domain, m))
    hyp["seed_image"] = shape.classification
    if shape.classification != U.CONVEX:
        raise HypothesisFailed(f"seed image is {shape.classification}, not convex")
    cert = Certificate("graph", SEEDED, Interval(0.0, _round_endpoint(seed.rho)), hyp,
                       _truncation_notes(norms))
    return RegionClassification([cert], [], norms)


def nongraph_witness(data: WeierstrassData, rho: float, norms: NormEstimates) -> dict:
    """A point with rho |G(w)|^2 = 1, where the Jacobian of the planar map vanishes.

    Bisection on the segment from argmin |G| to argmax |G|."""
    a, b = norms.argmin, norms.argmax
    path = data.domain.path(a, b - 1e-12 * data.domain.diameter * (b - a) / abs(b - a)) \
        if isinstance(data.domain, Polygon) else [a, b]
    G = data.G

    def phi(z):
        return rho * abs(complex(evaluate(G, z))) ** 2 - 1.0

    for p, q in zip(path[:-1], path[1:]):
        fp, fq = phi(p), phi(q)
        if fp <= 0 <= fq or fq <= 0 <= fp:
            s = brentq(lambda s: phi(p + s * (q - p)), 0.0, 1.0, xtol=1e-16, rtol=1e-15,
                       maxiter=200)
            w = complex(p + s * (q - p))
            return {"rho": rho, "w": [w.real, w.imag], "residual": abs(phi(w))}
    raise HypothesisFailed("no level-set crossing found for the witness")


def region_nongraph(data: WeierstrassData, norms: NormEstimates | None = None,
                    witness_rho: float | None = None) -> RegionClassification:
    """rho in (1/sup|G|^2, 1/inf|G|^2) gives surfaces that are not graphs."""
    norms = _norms(data, norms)
    hyp = _check_G(data, norms)
    hyp.update({"infAbsG": norms.inf_abs_G, "hasInteriorZero": norms.has_interior_zero})
    lo = _round_endpoint(1.0 / norms.sup_abs_G**2)
    hi = math.inf if norms.inf_abs_G == 0 else _round_endpoint(1.0 / norms.inf_abs_G**2)
    iv = Interval(lo, hi, lo_closed=False, hi_closed=False)
    if iv.empty:
        return RegionClassification([], [], norms, ["non-graph annulus is empty"])
    if witness_rho is None:
        witness_rho = 4.0 * lo if not math.isfinite(hi) else math.sqrt(lo * hi)
    if not iv.contains(witness_rho):
        raise ValueError(f"witness radius {witness_rho} not in {iv}")
    wit = nongraph_witness(data, witness_rho, norms)
    notes = _truncation_notes(norms)
    if math.isfinite(hi):
        notes.append(f"silent beyond rho = {hi:.12g}")
    cert = Certificate("nongraph", NONGRAPH, iv, hyp, notes, wit)
    return RegionClassification([], [cert], norms)


def restrict_to_disk(data: WeierstrassData, R: float) -> WeierstrassData:
    if not isinstance(data.domain, Disk) or data.domain.radius != 1.0:
        raise ValueError("restriction needs data on the unit disk")
    if not 0 < R <= 1:
        raise ValueError("need 0 < R <= 1")
    base = data.base if abs(data.base) < R else 0j
    return data.with_domain(Disk(R, base), base)


def region_restricted(data: WeierstrassData, R: float) -> RegionClassification:
    """Certificates for the surface restricted to |w| < R.

    Always rho <= 1/sup_{|w|<R}|G|^2; when G(0) = 0 also the Schwarz-lemma
    bound rho <= 1/R^2."""
    sub = restrict_to_disk(data, R)
    full = norm_estimates(data)
    hyp = _check_G(data, full)
    if not U.weierstrass_convexity(sub):
        raise HypothesisFailed("h is not convex on the restricted disk")
    hyp["h_convex_on_restricted_disk"] = True
    sup_R, delta, amax = sup_abs_G(sub)
    hyp.update({"R": R, "supAbsG_R": sup_R})
    norms = NormEstimates(sup_R, delta, 0.0, False, amax, 0j)
    certs = [Certificate("graph", RESTRICTED, Interval(0.0, _round_endpoint(1.0 / sup_R**2)),
                         dict(hyp))]
    G0 = abs(complex(evaluate(data.G, 0j)))
    if G0 <= 1e-14:
        certs.append(Certificate("graph", SCHWARZ, Interval(0.0, _round_endpoint(1.0 / R**2)),
                                 dict(hyp, G_at_0=G0),
                                 ["|G(w)| <= |w| on the unit disk since G(0) = 0"]))
    return RegionClassification(certs, [], norms)


def region_linear_conn(data: WeierstrassData, M: float, norms: NormEstimates | None = None,
                       oracle_n: int = 201, M_error: float | None = None
                       ) -> RegionClassification:
    """h univalent onto an M-arcwise connected set gives graphs for rho < 1/(M sup|G|^2)."""
    if not M >= 1:
        raise ValueError("M must be >= 1")
    norms = _norms(data, norms)
    hyp = _check_G(data, norms)
    rep = U.univalence_oracle(planar_map_fn(data, DeformParams(0.0, 1.0, 0.0)),
                              data.domain, oracle_n)
    hyp.update({"h_oracle": rep.verdict, "M": M})
    if M_error is not None:
        hyp["M_error"] = M_error
    if rep.verdict != U.UNIVALENT:
        raise HypothesisFailed(f"h is {rep.verdict}")
    full = _round_endpoint(1.0 / norms.sup_abs_G**2)
    hi = _round_endpoint(1.0 / (M * norms.sup_abs_G**2))
    notes = ["open at the endpoint; behaviour at rho = 1/(M sup|G|^2) is undetermined",
             f"when the image of h is convex (M = 1) the {ISOTROPIC} certificate gives the "
             f"stronger closed interval [0, {full:.12g}]"]
    cert = Certificate("graph", LINEAR_CONN, Interval(0.0, hi, hi_closed=False), hyp, notes)
    return RegionClassification([cert], [], norms)


def classify_region(data: WeierstrassData, seed: DeformParams | None = None,
                    M: float | None = None, oracle_n: int = 301) -> RegionClassification:
    """Collect every applicable certificate.

    If the isotropic test fails and no seed is given, the seeds
    (0, 1, +-1/sup|G|^2) are tried."""
    norms = norm_estimates(data)
    out = RegionClassification([], [], norms, _truncation_notes(norms))
    try:
        out = out.merge(region_isotropic(data, norms))
    except HypothesisFailed as err:
        out.notes.append(f"{ISOTROPIC}: {err}")
        if seed is None:
            r = _round_endpoint(1.0 / norms.sup_abs_G**2)
            for c in (r, -r):
                try:
                    out = out.merge(region_seeded(data, DeformParams(0.0, 1.0, c), norms,
                                                  oracle_n))
                    break
                except (HypothesisFailed, SeedOutsideBound) as err2:
                    out.notes.append(f"{SEEDED} seed c={c:.12g}: {err2}")
    if seed is not None:
        try:
            out = out.merge(region_seeded(data, seed, norms, oracle_n))
        except (HypothesisFailed, SeedOutsideBound) as err:
            out.notes.append(f"{SEEDED}: {err}")
    if M is not None:
        try:
            out = out.merge(region_linear_conn(data, M, norms))
        except HypothesisFailed as err:
            out.notes.append(f"{LINEAR_CONN}: {err}")
    try:
        out = out.merge(region_nongraph(data, norms))
    except HypothesisFailed as err:
        out.notes.append(f"{NONGRAPH}: {err}")
    if out.conflicts():
        raise AssertionError(f"graph and non-graph certificates overlap: {out.conflicts()}")
    return out


# ---------------------------------------------------------------------------
# linear connectivity


@dataclass
class LinearConnectivity:
    M: float
    resolution: int
    stretch: float
    pair: tuple[complex, complex]
    sources: int
    lower_bound: bool = True

    def as_dict(self) -> dict:
        return {"M": self.M, "resolution": self.resolution, "gridStretch": self.stretch,
                "pair": [[z.real, z.imag] for z in self.pair], "sources": self.sources,
                "lowerBound": self.lower_bound}


_OFFSETS = [(1, 0), (0, 1), (1, 1), (1, -1), (2, 1), (1, 2), (2, -1), (1, -2)]


def _grid_graph(inside: np.ndarray, cell: float):
    ny, nx = inside.shape
    idx = -np.ones(inside.shape, dtype=np.int64)
    idx[inside] = np.arange(int(inside.sum()))
    rows, cols, vals = [], [], []

    def shifted(dx, dy):
        # mask of cells (y, x) whose neighbour (y+dy, x+dx) is inside
        out = np.zeros_like(inside)
        ys = slice(max(0, -dy), ny - max(0, dy))
        xs = slice(max(0, -dx), nx - max(0, dx))
        yt = slice(max(0, dy), ny - max(0, -dy))
        xt = slice(max(0, dx), nx - max(0, -dx))
        out[ys, xs] = inside[yt, xt]
        return out

    for dx, dy in _OFFSETS:
        ok = inside & shifted(dx, dy)
        # cells crossed by the move must be inside too
        if abs(dx) + abs(dy) >= 2:
            for cx, cy in _crossed(dx, dy):
                ok &= shifted(cx, cy)
        ys, xs = np.nonzero(ok)
        rows.append(idx[ys, xs])
        cols.append(idx[ys + dy, xs + dx])
        vals.append(np.full(len(ys), cell * math.hypot(dx, dy)))
    rows, cols, vals = map(np.concatenate, (rows, cols, vals))
    n = int(inside.sum())
    return coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()


def _crossed(dx, dy):
    if abs(dx) == 1 and abs(dy) == 1:
        return [(dx, 0), (0, dy)]
    if abs(dx) == 2:
        return [(dx // 2, 0), (dx // 2, dy)]
    return [(0, dy // 2), (dx, dy // 2)]


def estimate_linear_connectivity(poly, resolution: int = 512, boundary_sources: int = 12
                                 ) -> LinearConnectivity:
    """Lower estimate of the arcwise-connectivity constant M of a polygonal domain.

    The interior is rasterized at ``resolution`` cells across; shortest
    interior paths use a 16-neighbour stencil (Euclidean weights, at most
    ``STENCIL_STRETCH`` longer than straight segments). Sources are the cells
    nearest each polygon vertex and evenly spaced boundary points; the
    estimate is the max of path length / distance over pairs at least
    ``resolution/16`` cells apart, clamped to >= 1.
    """
    P = np.asarray(poly.points if isinstance(poly, U.ImageCurve) else poly, dtype=complex)
    if len(P) < 3 or U.find_self_intersection(P) is not None:
        raise U.NonSimplePolyline("estimate_linear_connectivity needs a simple polygon")
    x0, x1, y0, y1 = P.real.min(), P.real.max(), P.imag.min(), P.imag.max()
    cell = max(x1 - x0, y1 - y0) / resolution
    nx = int(math.ceil((x1 - x0) / cell))
    ny = int(math.ceil((y1 - y0) / cell))
    xs = x0 + cell * (np.arange(nx) + 0.5)
    ys = y0 + cell * (np.arange(ny) + 0.5)
    centers = xs[None, :] + 1j * ys[:, None]
    inside = points_in_polygon(centers, P)
    pts = centers[inside]
    graph = _grid_graph(inside, cell)
    # endpoints stay a few cells away from the ragged rasterized boundary
    depth = distance_transform_edt(np.pad(inside, 1))[1:-1, 1:-1][inside]
    eligible = depth >= ENDPOINT_DEPTH

    verts = P if len(P) <= 16 else np.empty(0, dtype=complex)
    anchors = np.concatenate([verts, _sample_closed_polyline(P, boundary_sources)])
    cand = np.flatnonzero(eligible)
    src = np.unique([int(cand[np.argmin(np.abs(pts[cand] - a))]) for a in anchors])
    best, pair = 0.0, (complex(pts[src[0]]), complex(pts[src[0]]))
    for i in src:
        dist = dijkstra(graph, directed=False, indices=i)
        euclid = np.abs(pts - pts[i])
        far = (euclid >= cell * resolution / 16) & np.isfinite(dist) & eligible
        if not np.any(far):
            continue
        ratio = dist[far] / euclid[far]
        k = int(np.argmax(ratio))
        if ratio[k] > best:
            best, pair = float(ratio[k]), (complex(pts[i]), complex(pts[far][k]))
    M = max(1.0, best)
    return LinearConnectivity(M, resolution, STENCIL_STRETCH, pair, len(src))


# ---------------------------------------------------------------------------
# sweep validation


@dataclass
class SweepRow:
    theta: float
    rho: float
    c_sign: int
    certificate: str
    oracle: str
    status: str  # agree / contradiction / unconfirmed / unjudged


@dataclass
class SweepTable:
    rows: list
    spot_check: float

    @property
    def contradictions(self) -> list:
        return [r for r in self.rows if r.status == "contradiction"]

    @property
    def unconfirmed(self) -> list:
        return [r for r in self.rows if r.status == "unconfirmed"]


def judge(certificate: str, oracle: str) -> str:
    if certificate == "undetermined" or oracle == "skipped":
        return "unjudged"
    graph = certificate.startswith("graph")
    if oracle == U.INCONCLUSIVE:
        return "unconfirmed"
    if graph == (oracle == U.UNIVALENT):
        return "agree"
    return "contradiction"


def sweep_validate(data: WeierstrassData, theta_samples, rho_samples,
                   oracle_resolution: int = 301,
                   region: RegionClassification | None = None) -> SweepTable:
    """Compare certificates with the oracle at lambda = 1, c = +-rho."""
    region = classify_region(data) if region is None else region
    rows = []
    for theta in theta_samples:
        for rho in rho_samples:
            for sign in ((1,) if rho == 0 else (1, -1)):
                p = DeformParams(float(theta), 1.0, sign * float(rho))
                cert = region.classify(float(rho))
                rep = U.univalence_oracle(planar_map_fn(data, p), data.domain,
                                          oracle_resolution)
                rows.append(SweepRow(float(theta), float(rho), sign, cert, rep.verdict,
                                     judge(cert, rep.verdict)))
    spot = lambda_spot_check(data, float(rho_samples[0]) if len(rho_samples) else 1.0)
    return SweepTable(rows, spot)


def lambda_spot_check(data: WeierstrassData, rho: float) -> float:
    """Max difference of planar maps at (0, 1, rho) and (0, 2, rho/4)."""
    pts = data.domain.grid(16, margin=0.05 * data.domain.diameter)
    a = planar_map_fn(data, DeformParams(0.0, 1.0, rho))(pts)
    b = planar_map_fn(data, DeformParams(0.0, 2.0, rho / 4))(pts)
    return float(np.max(np.abs(a - b)))
