"""The three-parameter family X_{theta, lambda, c} built from Weierstrass data (F, G).

With potentials

    h = int F,   g = -int G^2 F,   T = int 2 G F      (all vanishing at the basepoint)

a surface point is

    horizontal = e^{i theta}/lambda * (h + c lambda^2 e^{-2 i theta} conj(g))
    height     = Re(e^{i theta} T)

and ``planar_map`` is the harmonic map h + c lambda^2 e^{-2 i theta} conj(g) whose
univalence decides graphness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from . import holofn
from .holofn import DomainSpec, HoloExpr, derivative, evaluate

TWO_PI = 2 * math.pi


class ZeroC(ValueError):
    """Normalization to |c| = 1 needs c != 0."""


@dataclass(frozen=True)
class DeformParams:
    """One point (theta, lambda, c) of the parameter space."""

    theta: float = 0.0
    lam: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if not math.isfinite(self.c):
            raise ValueError("c must be finite")
        object.__setattr__(self, "theta", float(self.theta) % TWO_PI)
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "c", float(self.c))

    @property
    def rho(self) -> float:
        """Polar radius |c lambda^2| of the region pictures."""
        return abs(self.c * self.lam**2)

    @property
    def coupling(self) -> complex:
        """c lambda^2 e^{-2 i theta}, the coefficient of conj(g) in the planar map."""
        return self.c * self.lam**2 * np.exp(-2j * self.theta)

    def as_dict(self):
        return {"theta": self.theta, "lambda": self.lam, "c": self.c}


@dataclass(frozen=True)
class SurfacePoint:
    horizontal: complex | np.ndarray
    height: float | np.ndarray
    w: complex | np.ndarray

    def xyz(self) -> np.ndarray:
        h = np.asarray(self.horizontal)
        return np.stack([h.real, h.imag, np.asarray(self.height)], axis=-1)


@dataclass(frozen=True)
class Potentials:
    """Evaluators for h, g, T and their derivatives.

    ``symbolic`` is True when all three come from closed forms; otherwise
    values are computed by path quadrature from the basepoint.
    """

    h: Callable
    g: Callable
    T: Callable
    dh: Callable
    dg: Callable
    dT: Callable
    symbolic: bool


@dataclass(frozen=True, eq=False)
class WeierstrassData:
    """Weierstrass data (F, G) on a simply connected domain.

    ``closed_forms`` optionally supplies antiderivatives (h, g, T) as
    expressions; they are shifted to vanish at ``base``.
    """

    F: HoloExpr
    G: HoloExpr
    domain: DomainSpec
    base: complex | None = None
    closed_forms: tuple | None = None
    name: str = "custom"
    tol: float | None = None
    F_zero_count: int = field(init=False, default=0)

    def __post_init__(self):
        base = self.domain.basepoint if self.base is None else complex(self.base)
        if not self.domain.contains(np.array([base]))[0]:
            raise ValueError(f"basepoint {base} is not inside {self.domain!r}")
        object.__setattr__(self, "base", base)
        if self.tol is None:
            object.__setattr__(self, "tol", holofn.default_tol())
        samples = self.domain.sample_points()
        holofn.check_on_domain(self.F, self.domain, samples)
        holofn.check_on_domain(self.G, self.domain, samples)
        Fv = evaluate(self.F, samples)
        if np.all(np.abs(Fv) == 0):
            raise ValueError("F must not vanish identically")
        ring = self.domain.boundary(2048, inset=1e-6 * self.domain.diameter)
        object.__setattr__(self, "F_zero_count",
                           max(0, holofn.boundary_winding(evaluate(self.F, ring))))
        if self.closed_forms is not None:
            for e in self.closed_forms:
                holofn.check_on_domain(e, self.domain, samples)

    @property
    def has_closed_forms(self) -> bool:
        return self.closed_forms is not None

    def without_closed_forms(self) -> WeierstrassData:
        return replace(self, closed_forms=None)

    def with_domain(self, domain: DomainSpec, base: complex | None = None) -> WeierstrassData:
        return replace(self, domain=domain, base=domain.basepoint if base is None else base)

    @cached_property
    def dF(self) -> HoloExpr:
        return derivative(self.F)

    @cached_property
    def dG(self) -> HoloExpr:
        return derivative(self.G)

    @cached_property
    def potentials(self) -> Potentials:
        return _build_potentials(self)


def _shifted(e: HoloExpr, base: complex) -> HoloExpr:
    return e - evaluate(e, base)


def _build_potentials(data: WeierstrassData) -> Potentials:
    F, G = data.F, data.G
    dh_e = F
    dg_e = -(G * G * F)
    dT_e = 2 * G * F
    if data.closed_forms is not None:
        h_e, g_e, T_e = (_shifted(e, data.base) for e in data.closed_forms)
        return Potentials(h_e, g_e, T_e, derivative(h_e), derivative(g_e), derivative(T_e),
                          symbolic=True)

    def integral(expr):
        def fn(w):
            return holofn.path_antiderivative(expr, data.base, w, data.tol, data.domain)
        return fn

    return Potentials(integral(dh_e), integral(dg_e), integral(dT_e), dh_e, dg_e, dT_e,
                      symbolic=False)


def potentials(data: WeierstrassData) -> Potentials:
    return data.potentials


# ---------------------------------------------------------------------------
# the family


def planar_map(data: WeierstrassData, p: DeformParams, w):
    """f = h + c lambda^2 e^{-2 i theta} conj(g)."""
    pot = data.potentials
    return pot.h(w) + p.coupling * np.conj(pot.g(w))


def planar_map_fn(data: WeierstrassData, p: DeformParams) -> Callable:
    return lambda w: planar_map(data, p, w)


def surface_point(data: WeierstrassData, p: DeformParams, w) -> SurfacePoint:
    pot = data.potentials
    rot = np.exp(1j * p.theta)
    horizontal = rot / p.lam * planar_map(data, p, w)
    height = np.real(rot * pot.T(w))
    return SurfacePoint(horizontal, height, w)


def dilatation(data: WeierstrassData, p: DeformParams, w):
    """Analytic dilatation -c lambda^2 e^{2 i theta} G^2 of the planar map."""
    G = evaluate(data.G, w)
    return -p.c * p.lam**2 * np.exp(2j * p.theta) * G * G


def jacobian(data: WeierstrassData, p: DeformParams, w):
    """|f_w|^2 - |f_wbar|^2 = |F|^2 (1 - c^2 lambda^4 |G|^4)."""
    F = evaluate(data.F, w)
    G = evaluate(data.G, w)
    return np.abs(F) ** 2 * (1 - (p.c * p.lam**2) ** 2 * np.abs(G) ** 4)


def metric_coeff(data: WeierstrassData, p: DeformParams, w):
    """Conformal factor (|F|/lambda)^2 (1 + c lambda^2 |G|^2)^2 of the induced metric.

    theta does not enter: the associated family is isometric.
    """
    F = evaluate(data.F, w)
    G = evaluate(data.G, w)
    return (np.abs(F) / p.lam) ** 2 * (1 + p.c * p.lam**2 * np.abs(G) ** 2) ** 2


def conformality_residual(data: WeierstrassData, p: DeformParams, w):
    """|phi_1^2 + phi_2^2 + c phi_3^2| with phi_j = dX_j/dw from the potentials."""
    pot = data.potentials
    a = np.exp(1j * p.theta) / p.lam
    k = p.c * p.lam**2
    dh, dg, dT = pot.dh(w), pot.dg(w), pot.dT(w)
    phi1 = 0.5 * a * (dh + k * dg)
    phi2 = -0.5j * a * (dh - k * dg)
    phi3 = 0.5 * np.exp(1j * p.theta) * dT
    return np.abs(phi1**2 + phi2**2 + p.c * phi3**2)


def singular_locus(data: WeierstrassData, p: DeformParams, grid_resolution: int = 128,
                   tol: float = 1e-10) -> np.ndarray:
    """Points where the induced metric degenerates.

    Returns grid points whose conformal factor is below ``tol``, zeros of
    1 + c lambda^2 |G|^2 located by bisection along grid edges where it changes
    sign, and interior zeros of F found by Newton refinement.
    """
    dom = data.domain
    x0, x1, y0, y1 = dom.bbox
    xs = np.linspace(x0, x1, grid_resolution)
    ys = np.linspace(y0, y1, grid_resolution)
    W = xs[None, :] + 1j * ys[:, None]
    inside = dom.contains(W)
    found = []

    Wi = W[inside]
    mc = metric_coeff(data, p, Wi)
    found.extend(Wi[mc < tol])

    k = p.c * p.lam**2

    def s(z):
        return 1 + k * abs(complex(evaluate(data.G, z))) ** 2

    if k < 0:
        S = np.full(W.shape, np.nan)
        S[inside] = 1 + k * np.abs(evaluate(data.G, W[inside])) ** 2
        head, tail = slice(None, -1), slice(1, None)
        every = slice(None)
        for ia, ib in (((every, head), (every, tail)), ((head, every), (tail, every))):
            sa, sb = S[ia], S[ib]
            flip = np.isfinite(sa) & np.isfinite(sb) & (np.sign(sa) != np.sign(sb))
            for za, zb in zip(W[ia][flip], W[ib][flip]):
                t = brentq(lambda t: s(za + t * (zb - za)), 0.0, 1.0, xtol=1e-14)
                found.append(za + t * (zb - za))

    if data.F_zero_count > 0:
        found.extend(_newton_zeros(data.F, data.dF, Wi, dom))

    return _dedupe(np.array(found, dtype=complex), 1e-9 * dom.diameter)


def _newton_zeros(f: HoloExpr, df: HoloExpr, pts: np.ndarray, dom: DomainSpec,
                  seeds: int = 64) -> list[complex]:
    vals = np.abs(evaluate(f, pts))
    order = np.argsort(vals)[:seeds]
    out = []
    for z in pts[order]:
        for _ in range(50):
            fz = complex(evaluate(f, z))
            dfz = complex(evaluate(df, z))
            if dfz == 0:
                break
            step = fz / dfz
            z = z - step
            if abs(step) < 1e-15 * max(1.0, abs(z)):
                break
        if dom.contains(np.array([z]))[0] and abs(complex(evaluate(f, z))) < 1e-12:
            out.append(z)
    return out


def _dedupe(z: np.ndarray, eps: float) -> np.ndarray:
    if z.size == 0:
        return z
    z = z[np.lexsort((z.imag, z.real))]
    keep = [z[0]]
    for v in z[1:]:
        if np.min(np.abs(np.array(keep) - v)) > eps:
            keep.append(v)
    return np.array(keep)


# ---------------------------------------------------------------------------
# parameter transforms


def conjugate(p: DeformParams) -> DeformParams:
    return replace(p, theta=p.theta + math.pi / 2)


def bonnet(p: DeformParams, dtheta: float) -> DeformParams:
    return replace(p, theta=p.theta + dtheta)


def lopez_ros(p: DeformParams, mu: float) -> DeformParams:
    if not mu > 0:
        raise ValueError(f"Lopez-Ros factor must be positive, got {mu}")
    return replace(p, lam=p.lam * mu)


def c_shift(p: DeformParams, c: float) -> DeformParams:
    return replace(p, c=c)


def rotate_quarter(z):
    """Quarter-turn J of the horizontal plane taking the conjugate of the
    opposite-signature surface onto the dual (multiplication by -i)."""
    return -1j * np.asarray(z) if np.ndim(z) else -1j * z


def dual_point(data: WeierstrassData, p: DeformParams, w) -> SurfacePoint:
    """Dual surface: third 1-form multiplied by i, i.e. (Re psi1, Re psi2, -Im psi3)."""
    pot = data.potentials
    a = np.exp(1j * p.theta) / p.lam
    k = p.c * p.lam**2
    h, g, T = pot.h(w), pot.g(w), pot.T(w)
    psi1 = a * (h + k * g)
    psi2 = -1j * a * (h - k * g)
    psi3 = np.exp(1j * p.theta) * T
    return SurfacePoint(np.real(psi1) + 1j * np.real(psi2), -np.imag(psi3), w)


def dual_via_conjugate(data: WeierstrassData, p: DeformParams, w) -> SurfacePoint:
    """J applied to the conjugate surface with c replaced by -c."""
    q = replace(conjugate(p), c=-p.c)
    sp = surface_point(data, q, w)
    return SurfacePoint(rotate_quarter(sp.horizontal), sp.height, w)


def normalize_to_unit_c(data: WeierstrassData, c: float) -> tuple[WeierstrassData, int]:
    """Rescale G by sqrt|c| so that X(c) becomes X(sign c) after t -> sqrt|c| t."""
    if c == 0:
        raise ZeroC("cannot normalize the isotropic case c = 0")
    s = math.sqrt(abs(c))
    closed = None
    if data.closed_forms is not None:
        h, g, T = data.closed_forms
        closed = (h, abs(c) * g, s * T)
    out = replace(data, G=s * data.G, closed_forms=closed,
                  name=f"{data.name}[G*{s:g}]")
    return out, (1 if c > 0 else -1)
