import json
import math

import numpy as np
import pytest

from zmcgraph import catalog, cli, export
from zmcgraph.export import read_mesh
from zmcgraph.weierstrass import DeformParams, metric_coeff


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


# -- surface ------------------------------------------------------------------


def test_surface_mesh_roundtrip(tmp_path, capsys):
    path = tmp_path / "e.mesh"
    code, _, _ = run(capsys, "surface", "enneper", "--n", 3, "--grid", 12, "--out", path)
    assert code == 0
    V, Fc, meta = read_mesh(path.read_text())
    assert meta["data"] == "enneper(n=3)" and meta["c"] == "1"
    assert Fc.min() >= 0 and Fc.max() < len(V)
    a, b, c = V[Fc[:, 0]], V[Fc[:, 1]], V[Fc[:, 2]]
    assert np.all(0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1) > 1e-14)
    assert (tmp_path / "e.mesh.singular").exists()


def test_surface_isotropic_horizontal_part_is_w(capsys):
    code, out, _ = run(capsys, "surface", "enneper", "--n", 3, "--c", 0, "--grid", 10)
    assert code == 0
    V, _, _ = read_mesh(out)
    grid = export.domain_grid(catalog.enneper(3).data.domain, 10)
    assert np.max(np.abs(V[:, 0] + 1j * V[:, 1] - grid.points)) < 1e-15


def test_surface_minkowski_flags_singular_set(tmp_path, capsys):
    # with c lambda^2 = -4 the singular set of Enneper n = 3 is |w| = 4^(-1/6)
    path = tmp_path / "s.mesh"
    code, _, _ = run(capsys, "surface", "enneper", "--lambda", 2, "--c", -1, "--grid", 48,
                     "--out", path)
    assert code == 0
    idx = [int(s.split()[0]) - 1 for s in
           (tmp_path / "s.mesh.singular").read_text().splitlines()[1:]]
    grid = export.domain_grid(catalog.enneper(3).data.domain, 48)
    r = np.abs(grid.points[idx])
    assert len(idx) >= grid.shape[1]
    assert np.max(np.abs(r - 4 ** (-1 / 6))) < 1.5 / 48
    assert read_mesh(path.read_text())[2]["singular_vertices"] == str(len(idx))


def test_mesh_output_deterministic(capsys):
    _, a, _ = run(capsys, "surface", "scherk", "--grid", 8)
    _, b, _ = run(capsys, "surface", "scherk", "--grid", 8)
    assert a == b


# -- verify -------------------------------------------------------------------


def verify(capsys, *argv):
    code, out, _ = run(capsys, "verify", *argv, "--resolution", 301)
    assert code == 0
    return json.loads(out)


def test_verify_enneper_graph(capsys):
    rep = verify(capsys, "enneper", "--n", 3, "--c", 1, "--lambda", 1)
    assert rep["verdict"] == "univalent" and rep["imageClass"] == "starlike_not_convex"
    assert rep["boundarySimple"] is True and rep["jacobianSign"] == "positive"
    assert rep["supAbsDilatation"] == pytest.approx(1.0, abs=1e-12)


def test_verify_enneper_not_graph(capsys):
    rep = verify(capsys, "enneper", "--n", 3, "--c", 1, "--lambda", 2)
    assert rep["verdict"] == "not_univalent"
    assert rep["supAbsDilatation"] == pytest.approx(4.0, abs=1e-11)


def test_verify_scherk_isotropic(capsys):
    # h of Scherk's data maps the disk onto a starlike, not convex, region
    rep = verify(capsys, "scherk", "--c", 0)
    assert rep["verdict"] == "univalent" and rep["imageClass"] == "starlike_not_convex"
    rep = verify(capsys, "scherk", "--c", 1)
    assert rep["verdict"] == "univalent" and rep["imageClass"] == "convex"


def test_verify_rho_flag(capsys):
    rep = verify(capsys, "enneper", "--lambda", 2, "--c", -1, "--rho", 0.5)
    assert rep["metadata"]["c"] == pytest.approx(-0.125)
    assert rep["supAbsDilatation"] == pytest.approx(0.5, abs=1e-12)


# -- region -------------------------------------------------------------------


def test_region_enneper(tmp_path, capsys):
    out = tmp_path / "r"
    code, _, _ = run(capsys, "region", "enneper", "--n", 3, "--theta-samples", 2,
                     "--rho-samples", 5, "--rho-max", 2, "--resolution", 128, "--out", out)
    assert code == 0
    doc = json.loads((tmp_path / "r.json").read_text())
    (g,) = doc["certifiedGraph"]
    assert g["interval"] == {"lo": 0.0, "hi": 1.0, "loClosed": True, "hiClosed": True}
    (ng,) = doc["certifiedNongraph"]
    assert ng["interval"]["lo"] == 1.0 and ng["interval"]["hi"] == "inf"
    assert doc["contradictions"] == 0
    rows = (tmp_path / "r.csv").read_text().splitlines()
    assert rows[0] == "theta,rho,c_sign,certificate,oracle"
    assert len(rows) == 1 + 2 * (1 + 4 * 2)


def test_region_scherk_and_exponential(tmp_path, capsys):
    for name in ("scherk", "exponential"):
        code, _, _ = run(capsys, "region", name, "--no-oracle", "--out", tmp_path / name)
        assert code == 0
        doc = json.loads((tmp_path / f"{name}.json").read_text())
        graph = [c for c in doc["certifiedGraph"] if c["interval"]["lo"] == 0]
        assert any(c["interval"]["hi"] >= 1.0 and c["interval"]["hiClosed"] for c in graph)
    assert doc["metadata"]["truncated"] is True
    assert any("truncated" in n for c in doc["certifiedGraph"] for n in c["notes"])


def test_region_deterministic(tmp_path, capsys):
    args = ["region", "enneper", "--theta-samples", 2, "--rho-samples", 4, "--resolution", 128]
    for k in (1, 2):
        assert run(capsys, *args, "--out", tmp_path / f"r{k}")[0] == 0
    for ext in ("csv", "json"):
        assert (tmp_path / f"r1.{ext}").read_bytes() == (tmp_path / f"r2.{ext}").read_bytes()


def test_region_corrupted_certificate_exit_4(tmp_path, capsys):
    args = ["region", "enneper", "--theta-samples", 1, "--rho-samples", 3,
            "--resolution", 128, "--corrupt-certificate", "--out", tmp_path / "r"]
    code, _, err = run(capsys, *args)
    assert code == 4 and "contradiction" in err
    assert run(capsys, *args, "--no-oracle")[0] == 0


def test_region_seed_and_M(tmp_path, capsys):
    code, _, _ = run(capsys, "region", "scherk", "--seed-c", 1, "--M", 2, "--no-oracle",
                     "--out", tmp_path / "r")
    assert code == 0
    doc = json.loads((tmp_path / "r.json").read_text())
    by_thm = {c["theorem"]: c["interval"]["hi"] for c in doc["certifiedGraph"]}
    assert by_thm["krust-seeded"] == 1.0
    assert by_thm["linear-connectivity"] == pytest.approx(0.5)


# -- family -------------------------------------------------------------------


def test_family_c_sweep(tmp_path, capsys):
    code, _, _ = run(capsys, "family", "enneper", "--sweep", "c", "--from", -1, "--to", 1,
                     "--steps", 9, "--grid", 8, "--out", tmp_path)
    assert code == 0
    man = json.loads((tmp_path / "index.json").read_text())
    assert len(man["meshes"]) == 9 and man["meshes"][4]["c"] == 0
    assert man["invariants"]["maxSecondDifference"] < 1e-12
    V0, _, _ = read_mesh((tmp_path / "mesh_004.mesh").read_text())
    Vm, _, _ = read_mesh((tmp_path / "mesh_000.mesh").read_text())
    Vp, _, _ = read_mesh((tmp_path / "mesh_008.mesh").read_text())
    assert np.max(np.abs(V0 - (Vm + Vp) / 2)) < 1e-12


def test_family_theta_sweep_isometric(tmp_path, capsys):
    code, _, _ = run(capsys, "family", "scherk", "--sweep", "theta", "--steps", 8,
                     "--grid", 8, "--out", tmp_path)
    assert code == 0
    man = json.loads((tmp_path / "index.json").read_text())
    assert len(man["meshes"]) == 8
    assert man["values"][1] == pytest.approx(math.pi / 4)
    assert man["invariants"]["maxRelativeDeviation"] <= 1e-15


def test_family_lambda_sweep(tmp_path, capsys):
    code, _, _ = run(capsys, "family", "enneper", "--sweep", "lambda", "--from", 0.6,
                     "--to", 2.0, "--steps", 8, "--grid", 8, "--out", tmp_path)
    assert code == 0
    man = json.loads((tmp_path / "index.json").read_text())
    lams = [m["lambda"] for m in man["meshes"]]
    assert lams[0] == 0.6 and lams[-1] == 2.0 and 1.0 in lams
    assert man["invariants"]["maxDeviation"] < 1e-12


# -- configuration and errors -------------------------------------------------


def test_config_precedence(tmp_path, capsys):
    conf = tmp_path / "zmc.conf"
    conf.write_text("# test\nlambda = 2\nc = 0.5\ngrid = 6\n")
    _, out, _ = run(capsys, "surface", "enneper", "--config", conf, "--c", 0.25)
    meta = read_mesh(out)[2]
    assert meta["lambda"] == "2" and meta["c"] == "0.25"
    assert meta["grid"] == "polar 6x16"
    assert json.loads(meta["config"])["lambda"] == 2.0


def test_data_file(tmp_path, capsys):
    path = tmp_path / "d.json"
    path.write_text(json.dumps({"F": "1", "G": "w^2", "domain": {"shape": "disk"},
                                "closed_forms": {"h": "w", "g": "w^5/5", "T": "w^3/3"}}))
    rep = json.loads(run(capsys, "verify", path, "--resolution", 128)[1])
    ref = json.loads(run(capsys, "verify", "enneper", "--n", 2, "--resolution", 128)[1])
    assert rep["verdict"] == ref["verdict"] == "univalent"
    assert rep["imageClass"] == ref["imageClass"]


def test_data_file_without_closed_forms_matches_catalog(tmp_path, capsys):
    path = tmp_path / "d.json"
    path.write_text(json.dumps({"F": "4/(1-w^4)", "G": "w", "domain": {"shape": "disk"}}))
    V, _, meta = read_mesh(run(capsys, "surface", path, "--grid", 6)[1])
    W, _, _ = read_mesh(run(capsys, "surface", "scherk", "--grid", 6)[1])
    assert meta["symbolic_potentials"] == "False"
    assert np.max(np.abs(V - W)) < 1e-8


@pytest.mark.parametrize("argv", [
    ["surface", "nope"],
    ["surface", "enneper", "--lambda", "-1"],
    ["verify", "enneper", "--resolution", "10"],
    ["family", "enneper", "--steps", "0"],
])
def test_input_errors_exit_2(argv, capsys):
    assert run(capsys, *argv)[0] == 2


def test_argparse_error_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["surface", "enneper", "--grid", "x"])
    assert exc.value.code == 2


def test_bad_data_files_exit_2(tmp_path, capsys):
    pole = tmp_path / "pole.json"
    pole.write_text(json.dumps({"F": "1/(w-0.5)", "G": "w"}))
    syntax = tmp_path / "syntax.json"
    syntax.write_text(json.dumps({"F": "sin(w)", "G": "w"}))
    conf = tmp_path / "bad.conf"
    conf.write_text("colour = red\n")
    assert run(capsys, "surface", pole)[0] == 2
    assert run(capsys, "surface", syntax)[0] == 2
    assert run(capsys, "surface", "enneper", "--config", conf)[0] == 2


def test_quadrature_failure_exit_3(tmp_path, capsys, monkeypatch):
    path = tmp_path / "q.json"
    path.write_text(json.dumps({"F": "exp(3*w)/(1.0001-w)", "G": "w"}))
    monkeypatch.setenv("ZMC_DEFAULT_TOL", "1e-300")
    code, _, err = run(capsys, "surface", path, "--grid", 8)
    assert code == 3 and "did not reach" in err


def test_examples_lists_catalog(capsys):
    code, out, _ = run(capsys, "examples")
    assert code == 0
    assert [line.split(":")[0] for line in out.splitlines()] == list(catalog.CATALOG)


def test_metric_invariant_helper_matches_library():
    d = catalog.scherk().data
    params = [DeformParams(t, 1, 1) for t in (0, 1, 2)]
    inv = cli.family_invariants(d, "theta", params)
    pts = d.domain.grid(12, margin=0.05 * d.domain.diameter)
    m = metric_coeff(d, params[0], pts)
    assert np.all(m > 0) and inv["maxRelativeDeviation"] <= 1e-15
