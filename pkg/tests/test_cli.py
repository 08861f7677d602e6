import json
import math

import numpy as np
import pytest

from fibrespec.cli import EXIT_CHECK_FAILED, EXIT_INVALID, EXIT_OK, main
from fibrespec.geometry import make_icosphere, read_mesh


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_spectrum_icosphere(capsys):
    code, out, _ = run(capsys, "spectrum", "--manifold", "icosphere", "--subdiv", "5", "--k", "4")
    assert code == EXIT_OK
    vals = json.loads(out)["eigenvalues"]
    assert abs(vals[0]) < 1e-8
    assert np.allclose(vals[1:], 2.0, rtol=1e-2)


def test_spectrum_circle(capsys):
    code, out, _ = run(capsys, "spectrum", "--manifold", "circle", "--length", "6.2831853",
                       "--n", "256", "--k", "5")
    assert code == EXIT_OK
    assert np.allclose(json.loads(out)["eigenvalues"], [0, 1, 1, 4, 4], atol=1e-3)


def test_spectrum_validation(capsys):
    code, _, err = run(capsys, "spectrum", "--manifold", "icosphere", "--subdiv", "-1")
    assert code == EXIT_INVALID and err
    code, _, _ = run(capsys, "spectrum", "--manifold", "icosphere", "--n", "12")
    assert code == EXIT_INVALID


def test_spectrum_csv_and_warped(capsys):
    code, out, _ = run(capsys, "spectrum", "--manifold", "warped", "--n", "256", "--k", "4",
                       "--format", "csv")
    assert code == EXIT_OK
    rows = out.strip().splitlines()
    assert len(rows) == 5
    assert float(rows[2].split(",")[1]) == pytest.approx(1.0, abs=1e-6)


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# circle run\nmanifold = circle\nn = 128\nk = 3\n")
    code, out, _ = run(capsys, "spectrum", "--config", str(cfg))
    assert code == EXIT_OK
    assert len(json.loads(out)["eigenvalues"]) == 3
    # flags win over the file
    code, out, _ = run(capsys, "spectrum", "--config", str(cfg), "--k", "2")
    assert len(json.loads(out)["eigenvalues"]) == 2
    cfg.write_text("manifold = circle\nbogus = 1\n")
    code, _, _ = run(capsys, "spectrum", "--config", str(cfg))
    assert code == EXIT_INVALID


def test_seed_environment(monkeypatch, capsys):
    argv = ("spectrum", "--manifold", "icosphere", "--subdiv", "2", "--k", "4")
    monkeypatch.setenv("SPECTRAL_SEED", "11")
    _, a, _ = run(capsys, *argv, "--seed", "3")
    _, b, _ = run(capsys, *argv, "--seed", "11")
    assert a == b
    monkeypatch.setenv("SPECTRAL_SEED", "not-a-number")
    code, _, _ = run(capsys, *argv)
    assert code == EXIT_INVALID


def test_byte_identical_outputs(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main(["spectrum", "--manifold", "icosphere", "--subdiv", "3", "--k", "6",
                     "--out", str(p)]) == EXIT_OK
    assert paths[0].read_bytes() == paths[1].read_bytes()
    for p in (tmp_path / "v1.json", tmp_path / "v2.json"):
        main(["verify", "t1_3", "--n", "16", "--resolution", "8", "--format", "json",
              "--out", str(p)])
    assert (tmp_path / "v1.json").read_bytes() == (tmp_path / "v2.json").read_bytes()


def test_no_partial_output_on_validation_failure(tmp_path, capsys):
    out = tmp_path / "x.csv"
    assert main(["tabulate", "squashed-sphere", "--rho", "1:0.5:0.1", "--out", str(out)]) \
        == EXIT_INVALID
    assert not out.exists()
    assert main(["spectrum", "--manifold", "icosphere", "--subdiv", "-1", "--out", str(out)]) \
        == EXIT_INVALID
    assert not out.exists()
    assert list(tmp_path.iterdir()) == []


def test_geom_roundtrip(tmp_path):
    path = tmp_path / "ico.mesh"
    assert main(["geom", "icosphere", "--subdiv", "2", "--out", str(path)]) == EXIT_OK
    mesh = read_mesh(path)
    assert mesh.n_vertices == make_icosphere(2).n_vertices


def test_symmetrize_tube(tmp_path):
    mesh, prof = tmp_path / "xs.mesh", tmp_path / "v.csv"
    code = main(["symmetrize", "--manifold", "tube", "--n", "32", "--resolution", "16",
                 "--out", str(mesh), "--profile-out", str(prof)])
    assert code == EXIT_OK
    rows = [r.split(",") for r in prof.read_text().strip().splitlines()[1:]]
    s = np.array([float(r[0]) for r in rows])
    v = np.array([float(r[1]) for r in rows])
    assert np.allclose(v, 1 + 0.4 * np.cos(s), rtol=1e-10)
    assert read_mesh(mesh).n_vertices > 0


def test_symmetrize_field(tmp_path, capsys):
    fiber = make_icosphere(2)
    s = np.linspace(0, 2 * math.pi, 8, endpoint=False)
    values = np.cos(s)[:, None] * fiber.vertices[None, :, 2] + np.round(fiber.vertices[:, 0], 1)
    path = tmp_path / "f.csv"
    np.savetxt(path, values, delimiter=",")
    code, out, _ = run(capsys, "symmetrize", "--field", str(path), "--subdiv", "2")
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0].startswith("# model=spherical")
    assert lines[-1].startswith("# equimeasurability") and lines[-1].endswith("status=ok")
    code, _, _ = run(capsys, "symmetrize", "--field", str(tmp_path / "missing.csv"))
    assert code == EXIT_INVALID


def test_verify_examples(capsys):
    code, out, _ = run(capsys, "verify", "closedform", "--format", "json")
    assert code == EXIT_OK and json.loads(out)["status"] == "pass"
    code, out, _ = run(capsys, "verify", "t1_2", "--rho", "5", "--q", "1", "--format", "json")
    assert code == EXIT_OK and json.loads(out)["status"] == "not-applicable"
    code, _, _ = run(capsys, "verify", "t1_3", "--bogus", "1")
    assert code == EXIT_INVALID
    code, _, _ = run(capsys, "verify", "t1_3", "--preset", "band-fixed")
    assert code == EXIT_INVALID


def test_verify_failure_exit_code(capsys):
    # eight nodes put the discrete circle lambda_1 about 5% low, outside the 2% band
    code, out, _ = run(capsys, "verify", "eq1", "--fiber", "point", "--n", "8", "--format", "json")
    assert code == EXIT_CHECK_FAILED
    assert json.loads(out)["status"] == "fail"


def test_tabulate(capsys):
    code, out, _ = run(capsys, "tabulate", "squashed-s15", "--rho", "0.3:1.2:0.05")
    assert code == EXIT_OK
    rows = [r.split(",") for r in out.strip().splitlines()[1:]]
    rho = np.array([float(r[0]) for r in rows])
    lam = np.array([float(r[1]) for r in rows])
    assert rho[-1] == 1.2
    assert np.all(lam[rho <= 0.54] == 32) and np.all(lam[rho >= 0.55] < 32)
    code, _, _ = run(capsys, "tabulate", "squashed-sphere", "--rho", "0.6:0.5:0.05")
    assert code == EXIT_INVALID
