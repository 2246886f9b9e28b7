import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zmcgraph import catalog
from zmcgraph import holofn as H
from zmcgraph import krust as K
from zmcgraph import univalence as U
from zmcgraph.weierstrass import DeformParams, WeierstrassData

w = H.var()
L_SHAPE = np.array([0, 1, 1 + 0.5j, 0.5 + 0.5j, 0.5 + 1j, 1j])
# computed by the grid shortest-path estimator itself at resolution 512 and frozen
L_SHAPE_M_512 = 1.4057732262250409


@pytest.fixture(scope="module")
def enneper3():
    return catalog.enneper(3).data


@pytest.fixture(scope="module")
def enneper1():
    return catalog.enneper(1).data


# -- norms --------------------------------------------------------------------


def test_sup_on_unit_circle(enneper3):
    sup, delta, arg = K.sup_abs_G(enneper3)
    assert 1 - 1e-9 <= sup <= 1 + 1e-12
    assert delta >= 0 and abs(abs(arg) - 1) < 1e-12


@pytest.mark.parametrize("n,R", [(1, 0.5), (2, 0.5), (3, 0.7)])
def test_sup_on_smaller_disk(n, R):
    d = K.restrict_to_disk(catalog.enneper(n).data, R)
    assert K.sup_abs_G(d)[0] == pytest.approx(R**n, rel=1e-12)


def test_exponential_norms_truncated():
    d = catalog.exponential(2).data
    est = K.norm_estimates(d)
    assert est.sup_abs_G == pytest.approx(math.exp(-2 * 1e-3), rel=1e-12)
    assert est.inf_abs_G == pytest.approx(math.exp(-2 * 6.0), rel=1e-9)
    assert est.truncated and not est.has_interior_zero


def test_inf_with_zero(enneper3):
    inf, zero, arg = K.inf_abs_G(enneper3)
    assert inf == 0 and zero and abs(arg) < 1e-12


def test_inf_located_zero_off_grid():
    d = WeierstrassData(H.const(1), (w - 0.123 - 0.031j) / 2, H.Disk())
    inf, zero, arg = K.inf_abs_G(d)
    assert zero and abs(arg - (0.123 + 0.031j)) < 1e-12


def test_inf_on_boundary():
    d = WeierstrassData(H.const(1), (w + 3) / 4, H.Disk())
    est = K.norm_estimates(d)
    assert est.inf_abs_G == pytest.approx(0.5, abs=1e-12)
    assert est.sup_abs_G == pytest.approx(1.0, abs=1e-12)
    assert abs(est.argmin + 1) < 1e-6


# -- isotropic and seeded certificates ----------------------------------------


def test_isotropic_enneper(enneper3):
    r = K.region_isotropic(enneper3)
    (cert,) = r.certified_graph
    assert cert.theorem == K.ISOTROPIC
    assert cert.interval == K.Interval(0.0, 1.0, True, True)
    assert cert.interval.hi == 1.0


def test_isotropic_scherk_h_not_convex():
    with pytest.raises(K.HypothesisFailed):
        K.region_isotropic(catalog.scherk().data)


def test_isotropic_exponential_rectangle():
    r = K.region_isotropic(catalog.exponential(2).data)
    (cert,) = r.certified_graph
    assert cert.interval.hi == pytest.approx(math.exp(4e-3), rel=1e-11)
    assert cert.hypotheses["h_oracle"] == U.UNIVALENT
    assert any("truncated" in n for n in cert.notes)


@pytest.mark.parametrize("G", [H.const(0.5), 2 * w])
def test_isotropic_hypotheses(G):
    with pytest.raises(K.HypothesisFailed):
        K.region_isotropic(WeierstrassData(H.const(1), G, H.Disk()))


def test_seeded_scherk():
    r = K.region_seeded(catalog.scherk().data, DeformParams(0, 1, 1))
    (cert,) = r.certified_graph
    assert cert.theorem == K.SEEDED and cert.interval.hi == 1.0
    assert cert.hypotheses["seed_image"] == U.CONVEX


def test_seeded_lambda_scaling_same_interval():
    d = catalog.scherk().data
    a = K.region_seeded(d, DeformParams(0, 1, 1)).certified_graph[0].interval
    b = K.region_seeded(d, DeformParams(0, 2, 0.25)).certified_graph[0].interval
    assert a == b


def test_seeded_isotropic_seed_degenerates(enneper3):
    (cert,) = K.region_seeded(enneper3, DeformParams(0, 1, 0)).certified_graph
    assert cert.interval == K.Interval(0.0, 0.0)
    assert cert.interval.contains(0.0) and not cert.interval.contains(1e-9)


def test_seeded_enneper_hypocycloid_rejected(enneper3):
    with pytest.raises(K.HypothesisFailed, match="starlike_not_convex"):
        K.region_seeded(enneper3, DeformParams(0, 1, 1))


def test_seed_outside_bound(enneper3):
    with pytest.raises(K.SeedOutsideBound):
        K.region_seeded(enneper3, DeformParams(0, 1, 1.5))


# -- non-graph annulus --------------------------------------------------------


def test_nongraph_enneper(enneper3):
    (cert,) = K.region_nongraph(enneper3).certified_nongraph
    iv = cert.interval
    assert iv.lo == 1.0 and math.isinf(iv.hi) and not iv.lo_closed
    assert not iv.contains(1.0) and iv.contains(1.0 + 1e-9) and iv.contains(1e9)


def test_nongraph_witness_circle(enneper1):
    (cert,) = K.region_nongraph(enneper1, witness_rho=4.0).certified_nongraph
    z = complex(*cert.witness["w"])
    assert abs(z) == pytest.approx(0.5, abs=1e-12)
    assert cert.witness["residual"] <= 1e-9


def test_nongraph_bounded_annulus():
    d = WeierstrassData(H.const(1), (w + 3) / 4, H.Disk())
    (cert,) = K.region_nongraph(d).certified_nongraph
    assert cert.interval.lo == 1.0 and cert.interval.hi == 4.0
    z = complex(*cert.witness["w"])
    rho = cert.witness["rho"]
    assert abs(rho * abs((z + 3) / 4) ** 2 - 1) < 1e-12
    assert any("silent" in n for n in cert.notes)


# -- restricted disks ---------------------------------------------------------


def test_restricted_half_disk(enneper1):
    r = K.region_restricted(enneper1, 0.5)
    bounds = {c.theorem: c.interval.hi for c in r.certified_graph}
    assert bounds == {K.RESTRICTED: 4.0, K.SCHWARZ: 4.0}


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("R", [0.3, 0.5, 0.9])
def test_schwarz_bound_never_exceeds_restricted(n, R):
    r = K.region_restricted(catalog.enneper(n).data, R)
    bounds = {c.theorem: c.interval.hi for c in r.certified_graph}
    assert bounds[K.SCHWARZ] <= bounds[K.RESTRICTED]
    assert bounds[K.RESTRICTED] == pytest.approx(R ** (-2 * n), rel=1e-11)


def test_restricted_full_disk_matches_isotropic(enneper3):
    r = K.region_restricted(enneper3, 1.0)
    iso = K.region_isotropic(enneper3).certified_graph[0].interval
    assert r.certified_graph[0].interval == iso


def test_restricted_no_schwarz_without_zero():
    d = WeierstrassData(H.const(1), (w + 1) / 3, H.Disk())
    thms = [c.theorem for c in K.region_restricted(d, 0.5).certified_graph]
    assert thms == [K.RESTRICTED]


def test_restricted_bad_radius(enneper1):
    for R in (0, 1.5):
        with pytest.raises(ValueError):
            K.region_restricted(enneper1, R)


# -- linear connectivity ------------------------------------------------------


def test_linear_conn_interval(enneper3):
    (cert,) = K.region_linear_conn(enneper3, 1.0).certified_graph
    assert cert.interval == K.Interval(0.0, 1.0, True, False)
    assert not cert.interval.contains(1.0) and cert.interval.contains(0.999999)
    assert any(K.ISOTROPIC in n and "[0, 1]" in n for n in cert.notes)
    (cert,) = K.region_linear_conn(enneper3, 2.0).certified_graph
    assert cert.interval.hi == 0.5
    with pytest.raises(ValueError):
        K.region_linear_conn(enneper3, 0.5)


def test_estimate_square_and_disk():
    sq = np.array([0, 1, 1 + 1j, 1j])
    disk = np.exp(2j * np.pi * np.arange(512) / 512)
    for poly in (sq, disk):
        lc = K.estimate_linear_connectivity(poly, 256)
        assert 1.0 <= lc.M <= 1.05
        assert lc.M <= K.STENCIL_STRETCH + 1e-12


def test_estimate_l_shape_golden():
    lc = K.estimate_linear_connectivity(L_SHAPE, 512)
    assert lc.M == pytest.approx(L_SHAPE_M_512, rel=1e-12)
    assert abs(lc.M - math.sqrt(2)) < 0.02
    # worst pair straddles the notch
    a, b = lc.pair
    assert min(a.real, b.real) < 0.5 < max(a.real, b.real)


def test_estimate_rejects_nonsimple():
    with pytest.raises(U.NonSimplePolyline):
        K.estimate_linear_connectivity(np.array([0, 1 + 1j, 1, 1j]), 64)


def test_linear_conn_from_estimate(enneper3):
    lc = K.estimate_linear_connectivity(L_SHAPE, 128)
    (cert,) = K.region_linear_conn(enneper3, lc.M, M_error=lc.stretch - 1).certified_graph
    assert cert.interval.hi == pytest.approx(1 / lc.M, rel=1e-11)
    assert cert.hypotheses["M_error"] == pytest.approx(lc.stretch - 1)


# -- region properties --------------------------------------------------------


@pytest.mark.parametrize("name", ["enneper", "exponential", "scherk"])
def test_catalog_regions_consistent(name):
    r = K.classify_region(catalog.get(name).data)
    assert r.conflicts() == []
    assert r.certified_graph and r.certified_nongraph
    lo = min(c.interval.lo for c in r.certified_nongraph)
    assert r.graph_radius == lo  # closed on the graph side, open on the other
    assert r.classify(lo).startswith("graph")


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 5), st.floats(0, 5))
def test_graph_region_downward_closed(a, b):
    r = REGION_E3
    lo, hi = min(a, b), max(a, b)
    if r.classify(hi).startswith("graph"):
        assert r.classify(lo).startswith("graph")


REGION_E3 = K.classify_region(catalog.enneper(3).data)


def test_interval_helpers():
    a = K.Interval(0, 1)
    b = K.Interval(1, math.inf, False, False)
    assert not a.intersects(b)
    assert a.intersects(K.Interval(1, 2))
    assert K.Interval(2, 1).empty and not K.Interval(1, 1).empty
    assert K.Interval(1, 1, True, False).empty
    assert str(b) == "(1, inf)"


@pytest.mark.parametrize("cert,oracle,status", [
    ("graph:isotropic-convex", "univalent", "agree"),
    ("graph:krust-seeded", "not_univalent", "contradiction"),
    ("nongraph", "univalent", "contradiction"),
    ("nongraph", "not_univalent", "agree"),
    ("nongraph", "inconclusive", "unconfirmed"),
    ("undetermined", "univalent", "unjudged"),
    ("graph:x", "skipped", "unjudged"),
])
def test_judge(cert, oracle, status):
    assert K.judge(cert, oracle) == status


@pytest.mark.parametrize("name,rhos", [
    ("enneper", [0.5, 1.0, 2.0]),
    ("exponential", [0.25, 1.0, 2.0]),
    ("scherk", [0.5, 1.0, 2.0]),
])
def test_sweep_agrees_with_oracle(name, rhos):
    table = K.sweep_validate(catalog.get(name).data, [0.0, math.pi / 2], rhos, 301)
    assert table.contradictions == []
    assert len(table.rows) == 2 * len(rhos) * 2
    assert table.spot_check < 1e-12
    for row in table.rows:
        if row.rho <= 1:
            assert row.oracle == U.UNIVALENT
