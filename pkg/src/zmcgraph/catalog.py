"""Built-in example surfaces with closed-form potentials."""

from __future__ import annotations

from dataclasses import dataclass

from .holofn import Disk, TruncatedHalfPlane, const, exp, log, var
from .weierstrass import WeierstrassData

w = var()


@dataclass(frozen=True)
class ExampleSpec:
    id: str
    data: WeierstrassData
    description: str
    params: dict


def enneper(n: int = 3) -> ExampleSpec:
    """Enneper-type data (1, w^n) on the unit disk."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    h = w
    g = -(w ** (2 * n + 1)) / (2 * n + 1)
    T = 2 * w ** (n + 1) / (n + 1)
    data = WeierstrassData(const(1), w**n, Disk(1.0), closed_forms=(h, g, T),
                           name=f"enneper(n={n})")
    return ExampleSpec(
        "enneper", data,
        "Enneper-type surface; the minimal graph (0,1,1) lies over a "
        "hypocycloid-bounded starlike, non-convex domain.",
        {"n": n})


def exponential(n: int = 2, domain: str = "halfplane", truncation: float = 6.0,
                height: float = 6.0, delta: float = 1e-3) -> ExampleSpec:
    """Data (1, e^{nw}) on a truncated left half-plane (default) or the unit disk."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    if domain == "halfplane":
        dom = TruncatedHalfPlane(truncation, height, delta)
    elif domain == "disk":
        dom = Disk(1.0)
    else:
        raise ValueError(f"unknown domain option {domain!r}")
    h = w
    g = -exp(2 * n * w) / (2 * n)
    T = 2 * exp(n * w) / n
    data = WeierstrassData(const(1), exp(n * w), dom, closed_forms=(h, g, T),
                           name=f"exponential(n={n},{domain})")
    return ExampleSpec(
        "exponential", data,
        "Exponential data on Re w < 0; the isotropic graph (0,1,0) lies over a "
        "convex domain while the minimal graph's domain is not starlike.",
        {"n": n, "domain": domain, "truncation": truncation})


def scherk() -> ExampleSpec:
    """Scherk data (4/(1 - w^4), w) on the unit disk."""
    F = 4 / (1 - w**4)
    # 2 artanh(w) + 2 arctan(w), written with logs whose arguments keep Re > 0 on the disk
    L1 = log(1 + w) - log(1 - w)
    L2 = log(1 - 1j * w) - log(1 + 1j * w)
    h = L1 + 1j * L2
    g = -L1 + 1j * L2
    T = 2 * (log(1 + w**2) - log(1 - w**2))
    data = WeierstrassData(F, w, Disk(1.0), closed_forms=(h, g, T), name="scherk")
    return ExampleSpec(
        "scherk", data,
        "Scherk surface; the minimal graph (0,1,1) lies over the square "
        "(-pi, pi)^2.",
        {})


CATALOG = {"enneper": enneper, "exponential": exponential, "scherk": scherk}


def get(name: str, **kwargs) -> ExampleSpec:
    try:
        factory = CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown example {name!r}; choose from {sorted(CATALOG)}") from None
    return factory(**kwargs)
