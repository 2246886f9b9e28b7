"""Closed-form holomorphic functions and path integration on simply connected domains.

Functions are small immutable expression trees over the complex variable ``w``.
They evaluate on numpy arrays, differentiate exactly, and integrate along
polylines by adaptive Gauss-Kronrod quadrature.
"""

from __future__ import annotations

import ast
import math
import os
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

DEFAULT_TOL = 1e-10


def default_tol() -> float:
    """Quadrature tolerance, overridable through ``ZMC_DEFAULT_TOL``."""
    raw = os.environ.get("ZMC_DEFAULT_TOL")
    if raw is None:
        return DEFAULT_TOL
    tol = float(raw)
    if not tol > 0:
        raise ValueError(f"ZMC_DEFAULT_TOL must be positive, got {raw!r}")
    return tol


class PoleOrBranchCut(ArithmeticError):
    """Evaluation hit a pole or the principal-log branch cut."""


class QuadratureNoConvergence(ArithmeticError):
    pass


class PathExitsDomain(ValueError):
    pass


class ExprSyntaxError(ValueError):
    pass


# ---------------------------------------------------------------------------
# expression trees

_KINDS = ("var", "const", "add", "mul", "pow", "recip", "exp", "log", "affine")


@dataclass(frozen=True, eq=False)
class HoloExpr:
    """Node of a holomorphic expression tree.

    ``value`` holds the constant for ``const``, the integer exponent for
    ``pow`` and the pair ``(a, b)`` for ``affine`` (child evaluated at a*w+b).
    Build trees with :func:`var`, :func:`const`, the arithmetic operators,
    :func:`exp`, :func:`log` and :func:`affine` rather than directly.
    """

    kind: str
    args: tuple = ()
    value: object = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown node kind {self.kind!r}")

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        return add(self, as_expr(other))

    __radd__ = __add__

    def __neg__(self):
        return mul(const(-1.0), self)

    def __sub__(self, other):
        return add(self, -as_expr(other))

    def __rsub__(self, other):
        return add(as_expr(other), -self)

    def __mul__(self, other):
        return mul(self, as_expr(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return mul(self, recip(as_expr(other)))

    def __rtruediv__(self, other):
        return mul(as_expr(other), recip(self))

    def __pow__(self, n):
        if isinstance(n, HoloExpr):
            if n.kind != "const":
                raise TypeError("exponent must be an integer constant")
            n = n.value
        if isinstance(n, complex):
            if n.imag != 0:
                raise TypeError("exponent must be an integer")
            n = n.real
        if float(n) != int(n):
            raise TypeError("only integer powers are supported")
        return power(self, int(n))

    # evaluation -----------------------------------------------------------
    def __call__(self, w):
        return evaluate(self, w)

    def derivative(self) -> HoloExpr:
        return derivative(self)

    @property
    def is_constant(self) -> bool:
        return self.kind == "const"

    def __str__(self):
        return _to_string(self)

    def __repr__(self):
        return f"HoloExpr({_to_string(self)})"


def as_expr(x) -> HoloExpr:
    if isinstance(x, HoloExpr):
        return x
    if isinstance(x, (int, float, complex, np.number)):
        return const(x)
    raise TypeError(f"cannot convert {type(x).__name__} to HoloExpr")


_W = HoloExpr("var")


def var() -> HoloExpr:
    return _W


def const(c) -> HoloExpr:
    c = complex(c)
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise ValueError("constants must be finite")
    return HoloExpr("const", (), c)


def _is_const(e, c=None):
    return e.kind == "const" and (c is None or e.value == c)


def add(*terms) -> HoloExpr:
    flat = []
    total = 0j
    for t in terms:
        t = as_expr(t)
        parts = t.args if t.kind == "add" else (t,)
        for p in parts:
            if p.kind == "const":
                total += p.value
            else:
                flat.append(p)
    if total != 0 or not flat:
        flat.append(const(total))
    if len(flat) == 1:
        return flat[0]
    return HoloExpr("add", tuple(flat))


def mul(*factors) -> HoloExpr:
    flat = []
    coeff = 1 + 0j
    for f in factors:
        f = as_expr(f)
        parts = f.args if f.kind == "mul" else (f,)
        for p in parts:
            if p.kind == "const":
                coeff *= p.value
            else:
                flat.append(p)
    if coeff == 0:
        return const(0)
    if coeff != 1 or not flat:
        flat.insert(0, const(coeff))
    if len(flat) == 1:
        return flat[0]
    return HoloExpr("mul", tuple(flat))


def power(e: HoloExpr, n: int) -> HoloExpr:
    n = int(n)
    if n == 0:
        return const(1)
    if n == 1:
        return e
    if e.kind == "const":
        if e.value == 0 and n < 0:
            raise PoleOrBranchCut("negative power of zero constant")
        return const(e.value**n)
    if e.kind == "pow":
        return power(e.args[0], e.value * n)
    return HoloExpr("pow", (e,), n)


def recip(e: HoloExpr) -> HoloExpr:
    e = as_expr(e)
    if e.kind == "const":
        if e.value == 0:
            raise PoleOrBranchCut("reciprocal of zero constant")
        return const(1 / e.value)
    if e.kind == "recip":
        return e.args[0]
    return HoloExpr("recip", (e,))


def exp(e) -> HoloExpr:
    e = as_expr(e)
    if e.kind == "const":
        return const(np.exp(e.value))
    return HoloExpr("exp", (e,))


def log(e) -> HoloExpr:
    """Principal logarithm; the cut is the closed negative real axis."""
    e = as_expr(e)
    if e.kind == "const":
        v = e.value
        if v.imag == 0 and v.real <= 0:
            raise PoleOrBranchCut(f"log of {v} lies on the branch cut")
        return const(np.log(v))
    return HoloExpr("log", (e,))


def affine(e: HoloExpr, a, b=0.0) -> HoloExpr:
    """``e`` composed with ``w -> a*w + b``."""
    a, b = complex(a), complex(b)
    if a == 0:
        raise ValueError("affine coefficient must be nonzero")
    e = as_expr(e)
    if e.kind == "const" or (a == 1 and b == 0):
        return e
    if e.kind == "var":
        return add(mul(const(a), e), const(b))
    return HoloExpr("affine", (e,), (a, b))


# ---------------------------------------------------------------------------
# evaluation


def _eval(e: HoloExpr, w):
    k = e.kind
    if k == "var":
        return w
    if k == "const":
        return e.value  # broadcast by the caller
    if k == "add":
        out = _eval(e.args[0], w)
        for a in e.args[1:]:
            out = out + _eval(a, w)
        return out
    if k == "mul":
        out = _eval(e.args[0], w)
        for a in e.args[1:]:
            out = out * _eval(a, w)
        return out
    if k == "pow":
        x = _eval(e.args[0], w)
        n = e.value
        if n < 0:
            if np.any(x == 0):
                raise PoleOrBranchCut(f"pole of {e}")
            return 1.0 / x ** (-n)
        return x**n
    if k == "recip":
        x = _eval(e.args[0], w)
        if np.any(x == 0):
            raise PoleOrBranchCut(f"pole of {e}")
        return 1.0 / x
    if k == "exp":
        return np.exp(_eval(e.args[0], w))
    if k == "log":
        x = np.asarray(_eval(e.args[0], w), dtype=complex)
        if np.any((x.imag == 0) & (x.real <= 0)):
            raise PoleOrBranchCut(f"{e} evaluated on its branch cut")
        out = np.log(x)
        return out if out.ndim else complex(out)
    if k == "affine":
        a, b = e.value
        return _eval(e.args[0], a * w + b)
    raise AssertionError(k)


def evaluate(e: HoloExpr, w):
    """Evaluate ``e`` at a complex scalar or array ``w``."""
    scalar = np.ndim(w) == 0
    warr = complex(w) if scalar else np.asarray(w, dtype=complex)
    with np.errstate(all="ignore"):
        out = _eval(e, warr)
    out = np.asarray(out, dtype=complex)
    if not np.all(np.isfinite(out)):
        raise PoleOrBranchCut(f"{e} is not finite at some evaluation point")
    if scalar:
        return complex(out)
    return np.broadcast_to(out, warr.shape).copy() if out.shape != warr.shape else out


# ---------------------------------------------------------------------------
# differentiation


def derivative(e: HoloExpr) -> HoloExpr:
    """Exact symbolic derivative d/dw."""
    k = e.kind
    if k == "var":
        return const(1)
    if k == "const":
        return const(0)
    if k == "add":
        return add(*(derivative(a) for a in e.args))
    if k == "mul":
        terms = []
        for i, a in enumerate(e.args):
            da = derivative(a)
            if _is_const(da, 0):
                continue
            terms.append(mul(*e.args[:i], da, *e.args[i + 1 :]))
        return add(*terms) if terms else const(0)
    if k == "pow":
        (u,) = e.args
        return mul(const(e.value), power(u, e.value - 1), derivative(u))
    if k == "recip":
        (u,) = e.args
        return mul(const(-1), power(u, -2), derivative(u))
    if k == "exp":
        (u,) = e.args
        return mul(e, derivative(u))
    if k == "log":
        (u,) = e.args
        return mul(derivative(u), recip(u))
    if k == "affine":
        a, b = e.value
        return mul(const(a), affine(derivative(e.args[0]), a, b))
    raise AssertionError(k)


# ---------------------------------------------------------------------------
# printing and parsing


def _fmt_const(c: complex) -> str:
    if c.imag == 0:
        return repr(c.real)
    if c.real == 0:
        return f"{c.imag!r}j"
    return f"({c.real!r}{c.imag:+}j)"


def _to_string(e: HoloExpr) -> str:
    k = e.kind
    if k == "var":
        return "w"
    if k == "const":
        return _fmt_const(e.value)
    if k == "add":
        return "(" + " + ".join(_to_string(a) for a in e.args) + ")"
    if k == "mul":
        return "(" + "*".join(_to_string(a) for a in e.args) + ")"
    if k == "pow":
        return f"{_to_string(e.args[0])}**({e.value})"
    if k == "recip":
        return f"(1/{_to_string(e.args[0])})"
    if k in ("exp", "log"):
        return f"{k}({_to_string(e.args[0])})"
    if k == "affine":
        a, b = e.value
        inner = _to_string(e.args[0])
        return f"[{inner}](w -> {_fmt_const(a)}*w + {_fmt_const(b)})"
    raise AssertionError(k)


_NAMES = {"w": _W, "z": _W, "i": const(1j), "j": const(1j), "I": const(1j),
          "pi": const(math.pi), "e": const(math.e)}
_FUNCS = {"exp": exp, "log": log}


def parse(text: str) -> HoloExpr:
    """Parse an expression such as ``"4/(1 - w^4)"`` or ``"exp(2*w)"``.

    ``^`` and ``**`` both denote integer powers; ``i``/``j``/``1j`` are the
    imaginary unit.
    """
    try:
        tree = ast.parse(text.strip().replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ExprSyntaxError(f"cannot parse {text!r}: {exc.msg}") from None
    return _from_ast(tree.body, text)


def _from_ast(node, text):
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)):
        return const(node.value)
    if isinstance(node, ast.Name):
        if node.id not in _NAMES:
            raise ExprSyntaxError(f"unknown name {node.id!r} in {text!r}")
        return _NAMES[node.id]
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        inner = _from_ast(node.operand, text)
        return -inner if isinstance(node.op, ast.USub) else inner
    if isinstance(node, ast.BinOp):
        left = _from_ast(node.left, text)
        right = _from_ast(node.right, text)
        op = node.op
        if isinstance(op, ast.Add):
            return left + right
        if isinstance(op, ast.Sub):
            return left - right
        if isinstance(op, ast.Mult):
            return left * right
        if isinstance(op, ast.Div):
            return left / right
        if isinstance(op, ast.Pow):
            try:
                return left**right
            except TypeError as exc:
                raise ExprSyntaxError(f"{exc} in {text!r}") from None
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
        fn = _FUNCS.get(node.func.id)
        if fn is None or len(node.args) != 1 or node.keywords:
            raise ExprSyntaxError(f"unsupported call {node.func.id!r} in {text!r}")
        return fn(_from_ast(node.args[0], text))
    raise ExprSyntaxError(f"unsupported syntax in {text!r}")


def iter_nodes(e: HoloExpr):
    yield e
    for a in e.args:
        yield from iter_nodes(a)


# ---------------------------------------------------------------------------
# domains


def _seg_dist(p, a, b):
    """Distance from points p to segment [a, b] (all complex)."""
    d = b - a
    L2 = abs(d) ** 2
    if L2 == 0:
        return np.abs(p - a)
    t = np.clip(((p - a) * np.conj(d)).real / L2, 0.0, 1.0)
    return np.abs(p - (a + t * d))


class DomainSpec:
    """Simply connected domain with an interior basepoint.

    Subclasses provide ``contains``, ``boundary``, ``bbox`` and
    ``distance_to_boundary``.
    """

    basepoint: complex = 0j
    truncated: bool = False
    convex: bool = True

    def contains(self, w, margin: float = 0.0):
        return self.distance_to_boundary(w) > margin if margin > 0 else self._inside(w)

    def _inside(self, w):
        raise NotImplementedError

    def distance_to_boundary(self, w):
        raise NotImplementedError

    def boundary(self, count: int, inset: float = 0.0) -> np.ndarray:
        raise NotImplementedError

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        raise NotImplementedError

    @property
    def diameter(self) -> float:
        x0, x1, y0, y1 = self.bbox
        return float(math.hypot(x1 - x0, y1 - y0))

    def grid(self, n: int, margin: float = 0.0) -> np.ndarray:
        """Points of an ``n x n`` grid over the bounding box lying inside."""
        x0, x1, y0, y1 = self.bbox
        xs = np.linspace(x0, x1, n)
        ys = np.linspace(y0, y1, n)
        W = xs[None, :] + 1j * ys[:, None]
        W = W.ravel()
        return W[self.contains(W, margin)]

    def sample_points(self, n: int = 48, count: int = 512) -> np.ndarray:
        """Interior grid plus a slightly inset boundary, for validity checks."""
        inset = 1e-6 * self.diameter
        return np.concatenate([self.grid(n, margin=inset), self.boundary(count, inset)])

    def segment_inside(self, z0, z1) -> bool:
        if self.convex:
            return bool(np.all(self._inside(np.array([z0, z1]))))
        t = np.linspace(0.0, 1.0, 65)
        return bool(np.all(self._inside(z0 + t * (z1 - z0))))

    def path(self, start: complex, end: complex) -> list[complex]:
        """Interior polyline from ``start`` to ``end``."""
        if not np.all(self._inside(np.array([start, end]))):
            raise PathExitsDomain(f"endpoint outside domain: {start} -> {end}")
        if self.segment_inside(start, end):
            return [start, end]
        raise PathExitsDomain(f"no interior path from {start} to {end}")

    def describe(self) -> dict:
        raise NotImplementedError


class Disk(DomainSpec):
    def __init__(self, radius: float = 1.0, basepoint: complex = 0j):
        if not radius > 0:
            raise ValueError("radius must be positive")
        self.radius = float(radius)
        self.basepoint = complex(basepoint)
        if not abs(self.basepoint) < self.radius:
            raise ValueError("basepoint must be strictly inside the disk")

    def _inside(self, w):
        return np.abs(w) < self.radius

    def distance_to_boundary(self, w):
        return self.radius - np.abs(w)

    def boundary(self, count, inset=0.0):
        phi = 2 * np.pi * np.arange(count) / count
        return (self.radius - inset) * np.exp(1j * phi)

    @property
    def bbox(self):
        r = self.radius
        return (-r, r, -r, r)

    @property
    def diameter(self):
        return 2 * self.radius

    def describe(self):
        return {"shape": "disk", "radius": self.radius}

    def __repr__(self):
        return f"Disk(radius={self.radius})"


class _Rectangle(DomainSpec):
    def __init__(self, x0, x1, y0, y1, basepoint):
        if not (x0 < x1 and y0 < y1):
            raise ValueError("empty rectangle")
        self._box = (float(x0), float(x1), float(y0), float(y1))
        self.basepoint = complex(basepoint)
        if not self._inside(np.array([self.basepoint]))[0]:
            raise ValueError("basepoint must be strictly inside the domain")

    def _inside(self, w):
        x0, x1, y0, y1 = self._box
        w = np.asarray(w)
        return (w.real > x0) & (w.real < x1) & (w.imag > y0) & (w.imag < y1)

    def distance_to_boundary(self, w):
        x0, x1, y0, y1 = self._box
        w = np.asarray(w)
        d = np.minimum.reduce([w.real - x0, x1 - w.real, w.imag - y0, y1 - w.imag])
        return d

    def corners(self, inset=0.0):
        x0, x1, y0, y1 = self._box
        x0, x1, y0, y1 = x0 + inset, x1 - inset, y0 + inset, y1 - inset
        return np.array([x0 + 1j * y0, x1 + 1j * y0, x1 + 1j * y1, x0 + 1j * y1])

    def boundary(self, count, inset=0.0):
        return _sample_closed_polyline(self.corners(inset), count)

    @property
    def bbox(self):
        return self._box


class TruncatedHalfPlane(_Rectangle):
    """Left half-plane ``Re w < 0`` cut down to ``[-W, -delta] x [-H, H]``."""

    truncated = True

    def __init__(self, width: float = 6.0, height: float = 6.0, delta: float = 1e-3,
                 basepoint: complex = -1.0):
        if not (width > delta > 0 and height > 0):
            raise ValueError("need width > delta > 0 and height > 0")
        self.width, self.height, self.delta = float(width), float(height), float(delta)
        super().__init__(-width, -delta, -height, height, basepoint)

    def describe(self):
        return {"shape": "halfplane", "width": self.width, "height": self.height,
                "delta": self.delta}

    def __repr__(self):
        return f"TruncatedHalfPlane(width={self.width}, height={self.height}, delta={self.delta})"


def _signed_area(v):
    return 0.5 * float(np.sum((np.conj(v) * np.roll(v, -1)).imag))


def _sample_closed_polyline(vertices, count):
    """``count`` points spaced uniformly by arc length along a closed polyline."""
    v = np.asarray(vertices, dtype=complex)
    seg = np.roll(v, -1) - v
    lengths = np.abs(seg)
    cum = np.concatenate([[0.0], np.cumsum(lengths)])
    s = cum[-1] * np.arange(count) / count
    idx = np.searchsorted(cum, s, side="right") - 1
    idx = np.clip(idx, 0, len(v) - 1)
    t = (s - cum[idx]) / np.where(lengths[idx] > 0, lengths[idx], 1.0)
    return v[idx] + t * seg[idx]


def points_in_polygon(p, vertices) -> np.ndarray:
    """Even-odd point-in-polygon test, vectorized over ``p``."""
    p = np.asarray(p, dtype=complex)
    v = np.asarray(vertices, dtype=complex)
    ax, ay = v.real, v.imag
    bx, by = np.roll(ax, -1), np.roll(ay, -1)
    flat = p.ravel()
    out = np.empty(flat.shape, dtype=bool)
    chunk = max(1, 2**22 // len(v))
    for k in range(0, len(flat), chunk):
        q = flat[k:k + chunk]
        x, y = q.real[:, None], q.imag[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            crosses = ((ay > y) != (by > y)) & (x < (bx - ax) * (y - ay) / (by - ay) + ax)
        out[k:k + chunk] = np.count_nonzero(crosses, axis=1) % 2 == 1
    return out.reshape(p.shape)


class Polygon(DomainSpec):
    """Simple polygon; vertices are reordered counter-clockwise."""

    def __init__(self, vertices: Sequence[complex], basepoint: complex | None = None):
        v = np.asarray([complex(z) for z in vertices])
        if len(v) < 3:
            raise ValueError("polygon needs at least 3 vertices")
        if _signed_area(v) < 0:
            v = v[::-1]
        self.vertices = v
        turns = ((np.roll(v, -1) - v) * np.conj(v - np.roll(v, 1))).imag
        self.convex = bool(np.all(turns >= 0))
        if basepoint is None:
            basepoint = self._area_centroid()
            if not self._inside(np.array([basepoint]))[0]:
                g = self.grid(33, margin=0.0)
                d = self.distance_to_boundary(g)
                basepoint = g[np.argmax(d)]
        self.basepoint = complex(basepoint)
        if not self._inside(np.array([self.basepoint]))[0]:
            raise ValueError("basepoint must be strictly inside the polygon")

    def _area_centroid(self):
        v = self.vertices
        vn = np.roll(v, -1)
        cr = (np.conj(v) * vn).imag
        A = 0.5 * cr.sum()
        cx = ((v.real + vn.real) * cr).sum() / (6 * A)
        cy = ((v.imag + vn.imag) * cr).sum() / (6 * A)
        return complex(cx, cy)

    def _inside(self, w):
        return points_in_polygon(w, self.vertices) & (self.distance_to_boundary(w) > 0)

    def distance_to_boundary(self, w):
        w = np.asarray(w, dtype=complex)
        v = self.vertices
        d = np.full(w.shape, np.inf)
        for a, b in zip(v, np.roll(v, -1)):
            d = np.minimum(d, _seg_dist(w, a, b))
        return d

    def contains(self, w, margin=0.0):
        inside = points_in_polygon(w, self.vertices)
        return inside & (self.distance_to_boundary(w) > margin)

    def boundary(self, count, inset=0.0):
        pts = _sample_closed_polyline(self.vertices, count)
        if inset <= 0:
            return pts
        v = self.vertices
        seg = np.roll(v, -1) - v
        normals = 1j * seg / np.abs(seg)  # inward for counter-clockwise order
        # push each sample along the inward normal of its nearest edge
        dists = np.stack([_seg_dist(pts, a, b) for a, b in zip(v, np.roll(v, -1))])
        nearest = np.argmin(dists, axis=0)
        return pts + inset * normals[nearest]

    @property
    def bbox(self):
        v = self.vertices
        return (float(v.real.min()), float(v.real.max()), float(v.imag.min()),
                float(v.imag.max()))

    def path(self, start, end):
        if not np.all(self.contains(np.array([start, end]))):
            raise PathExitsDomain(f"endpoint outside polygon: {start} -> {end}")
        if self.segment_inside(start, end):
            return [start, end]
        # visibility graph through slightly inset vertices
        v = self.vertices
        prev, nxt = np.roll(v, 1), np.roll(v, -1)
        bis = (prev - v) / np.abs(prev - v) + (nxt - v) / np.abs(nxt - v)
        bis = np.where(np.abs(bis) > 0, bis / np.where(np.abs(bis) > 0, np.abs(bis), 1), 1j)
        step = 1e-6 * self.diameter
        cand = v + step * bis
        cand = np.where(self.contains(cand), cand, v - step * bis)
        nodes = np.concatenate([[start, end], cand])
        N = len(nodes)
        rows, cols, vals = [], [], []
        for i in range(N):
            for j in range(i + 1, N):
                if self.segment_inside(nodes[i], nodes[j]):
                    rows.append(i)
                    cols.append(j)
                    vals.append(abs(nodes[j] - nodes[i]))
        graph = csr_matrix((vals, (rows, cols)), shape=(N, N))
        dist, pred = dijkstra(graph, directed=False, indices=0, return_predecessors=True)
        if not np.isfinite(dist[1]):
            raise PathExitsDomain(f"no interior path from {start} to {end}")
        out = [1]
        while out[-1] != 0:
            out.append(pred[out[-1]])
        return [complex(nodes[k]) for k in reversed(out)]

    def describe(self):
        return {"shape": "polygon",
                "vertices": [[float(z.real), float(z.imag)] for z in self.vertices]}

    def __repr__(self):
        return f"Polygon({len(self.vertices)} vertices)"


# ---------------------------------------------------------------------------
# validity checks on a domain


def boundary_winding(values: np.ndarray) -> int:
    """Winding number around 0 of the closed curve through ``values``."""
    z = np.asarray(values, dtype=complex)
    dphi = np.angle(np.roll(z, -1) / z)
    return int(round(dphi.sum() / (2 * np.pi)))


def check_on_domain(e: HoloExpr, domain: DomainSpec, samples: np.ndarray | None = None):
    """Reject ``e`` if it is singular on the domain's sample set, if a
    denominator winds around 0 along the boundary (a pole inside), or if the
    argument of one of its logs crosses the branch cut along the boundary."""
    pts = domain.sample_points() if samples is None else samples
    evaluate(e, pts)
    ring = domain.boundary(1024, inset=1e-6 * domain.diameter)
    for node in iter_nodes(e):
        if node.kind == "recip" or (node.kind == "pow" and node.value < 0):
            inner = node.args[0]
            while inner.kind == "pow" and inner.value > 0:
                inner = inner.args[0]  # same zeros, smaller argument steps
            if boundary_winding(evaluate(inner, ring)) != 0:
                raise PoleOrBranchCut(f"{node} has a pole inside the domain")
            continue
        if node.kind != "log":
            continue
        arg = evaluate(node.args[0], ring)
        nxt = np.roll(arg, -1)
        flips = np.signbit(arg.imag) != np.signbit(nxt.imag)
        if not np.any(flips):
            continue
        a, b = arg[flips], nxt[flips]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = a.imag / (a.imag - b.imag)
        xr = a.real + t * (b.real - a.real)
        if np.any(xr <= 0):
            raise PoleOrBranchCut(f"branch cut of {node} meets the domain boundary")


# ---------------------------------------------------------------------------
# quadrature

_XGK = np.array([0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                 0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                 0.207784955007898467600689403773245, 0.0])
_WGK = np.array([0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                 0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                 0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_WG = np.array([0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                0.381830050505118944950369775488975, 0.417959183673469387755102040816327])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KW = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GW = np.zeros(15)
_GW[1::2] = np.concatenate([_WG[:-1], _WG[::-1]])


def integrate_segments(f: Callable, z0, z1, tol: float | None = None,
                       max_depth: int = 40, max_panels: int = 4_000_000) -> np.ndarray:
    """Integrals of ``f`` along straight segments ``z0[k] -> z1[k]``.

    Adaptive 7/15-point Gauss-Kronrod with bisection; a panel of parameter
    width ``dt`` is accepted once its Kronrod/Gauss difference is at most
    ``tol * dt``, so the total error estimate per segment stays below ``tol``.
    """
    tol = default_tol() if tol is None else tol
    z0, z1 = np.broadcast_arrays(np.asarray(z0, dtype=complex), np.asarray(z1, dtype=complex))
    shape = z0.shape
    z0, z1 = z0.ravel(), z1.ravel()
    dz = z1 - z0
    result = np.zeros(z0.size, dtype=complex)
    idx = np.arange(z0.size)
    a = np.zeros(z0.size)
    b = np.ones(z0.size)
    used = 0
    for _ in range(max_depth):
        if idx.size == 0:
            break
        used += idx.size
        if used > max_panels:
            break
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        t = mid[:, None] + half[:, None] * _NODES[None, :]
        vals = f(z0[idx, None] + t * dz[idx, None]) * dz[idx, None]
        K = half * (vals @ _KW)
        G = half * (vals @ _GW)
        err = np.abs(K - G)
        ok = err <= tol * (b - a)
        np.add.at(result, idx[ok], K[ok])
        bad = ~ok
        idx, a, b, mid = idx[bad], a[bad], b[bad], mid[bad]
        idx = np.concatenate([idx, idx])
        a, b = np.concatenate([a, mid]), np.concatenate([mid, b])
    if idx.size:
        raise QuadratureNoConvergence(
            f"{np.unique(idx).size} segment(s) did not reach tol={tol:g}")
    return result.reshape(shape)


def _as_callable(e):
    if isinstance(e, HoloExpr):
        return e.__call__
    return e


def path_antiderivative(e, base: complex, w, tol: float | None = None,
                        domain: DomainSpec | None = None,
                        path: Sequence[complex] | None = None):
    """``integral_base^w e(zeta) dzeta`` along an interior polyline.

    Without an explicit ``path`` the route comes from ``domain.path`` (a straight
    segment for convex domains). ``w`` may be an array when no path is given.
    """
    f = _as_callable(e)
    tol = default_tol() if tol is None else tol
    if path is not None:
        pts = [complex(z) for z in path]
        if abs(pts[0] - base) > 0 or abs(pts[-1] - complex(w)) > 0:
            raise ValueError("path must start at base and end at w")
        if domain is not None:
            for p, q in zip(pts[:-1], pts[1:]):
                if not domain.segment_inside(p, q):
                    raise PathExitsDomain(f"segment {p} -> {q} leaves the domain")
        segs = np.array(pts)
        per = integrate_segments(f, segs[:-1], segs[1:], tol / max(1, len(pts) - 1))
        return complex(per.sum())

    scalar = np.ndim(w) == 0
    warr = np.atleast_1d(np.asarray(w, dtype=complex))
    if domain is None or domain.convex:
        if domain is not None and not np.all(domain.contains(warr)):
            raise PathExitsDomain("target point outside the domain")
        out = integrate_segments(f, np.full(warr.shape, complex(base)), warr, tol)
    else:
        flat = warr.ravel()
        out = np.empty(flat.shape, dtype=complex)
        direct = domain.contains(flat)
        if not np.all(direct):
            raise PathExitsDomain("target point outside the domain")
        vis = np.array([domain.segment_inside(base, z) for z in flat])
        if np.any(vis):
            out[vis] = integrate_segments(f, np.full(vis.sum(), complex(base)), flat[vis], tol)
        for k in np.flatnonzero(~vis):
            out[k] = path_antiderivative(f, base, flat[k], tol, domain,
                                         domain.path(base, flat[k]))
        out = out.reshape(warr.shape)
    return complex(out[0]) if scalar else out
