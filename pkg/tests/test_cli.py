import json
import subprocess
import sys

import numpy as np
import pytest

from finslerhom.cli import EXIT_DOMAIN, EXIT_GUARANTEE, EXIT_OK, EXIT_USAGE, main


def run(tmp_path, *args, name="out.txt"):
    out = tmp_path / name
    code = main([*args, "--out", str(out)])
    return code, (out.read_text() if out.exists() else None)


def test_spaces_listing(tmp_path):
    code, text = run(tmp_path, "spaces")
    doc = json.loads(text)
    names = {s["name"]: s for s in doc["spaces"]}
    assert code == EXIT_OK and len(names) >= 4 and doc["seed"] == 0
    assert names["heisenberg"]["dim"] == 3 and names["su2"]["dim"] == 3
    _, text = run(tmp_path, "spaces", "--dim", "2")
    assert "hyperbolic" in {s["name"] for s in json.loads(text)["spaces"]}
    _, text = run(tmp_path, "spaces", "--berwald", "--format", "csv")
    rows = [l.split(",") for l in text.splitlines()[2:]]
    assert all(r[5] == "true" for r in rows) and any(r[3] == "riemannian" for r in rows)


def test_tensors(tmp_path):
    code, text = run(tmp_path, "tensors", "--space", "flat", "--x", "1", "2", "3", "--y", "0.3", "-1", "2")
    doc = json.loads(text)
    assert code == EXIT_OK and np.allclose(doc["g"], np.eye(3))
    assert all(np.max(np.abs(doc[k])) <= 1e-12 for k in ("C", "gamma", "N", "Gamma"))
    code, text = run(tmp_path, "tensors", "--space", "hyperbolic", "--x", "0", "1", "--y", "1", "0.5")
    G = np.array(json.loads(text)["Gamma"])
    assert G[0, 0, 1] == pytest.approx(-1, abs=1e-8) and G[1, 0, 0] == pytest.approx(1, abs=1e-8)
    assert G[1, 1, 1] == pytest.approx(-1, abs=1e-8)


def test_tensors_y_zero_is_domain_error(tmp_path, capsys):
    code, text = run(tmp_path, "tensors", "--space", "heisenberg-randers", "--y", "0", "0", "0")
    assert code == EXIT_DOMAIN and text is None
    assert "not smooth" in capsys.readouterr().err


def test_tensors_csv(tmp_path):
    code, text = run(tmp_path, "tensors", "--space", "hyperbolic", "--y", "1", "0", "--format", "csv")
    lines = text.splitlines()
    assert lines[0] == "# seed=0" and lines[2] == "tensor,index,value"
    assert len(lines) == 3 + 4 + 8 + 8 + 4 + 8


def test_geodesic_csv(tmp_path):
    code, text = run(tmp_path, "geodesic", "--space", "hyperbolic", "--x", "0", "1", "--y", "0", "1")
    lines = text.splitlines()
    assert code == EXIT_OK and lines[1] == "t,x1,x2,y1,y2"
    last = [float(v) for v in lines[-1].split(",")]
    assert last[0] == 1.0 and abs(last[2] - np.e) <= 1e-6
    assert len(lines[-1].split(",")[1].split("e")[0].replace("-", "").replace(".", "")) == 17


def test_search_examples(tmp_path):
    code, text = run(tmp_path, "search", "--space", "su2", "--samples", "60")
    doc = json.loads(text)
    assert code == EXIT_OK and doc["all_directions_geodesic"] and doc["seed"] == 0
    code, text = run(tmp_path, "search", "--space", "heisenberg-randers", "--samples", "300", "--seed", "5")
    doc = json.loads(text)
    assert code == EXIT_OK and doc["seed"] == 5
    assert any(c["status"] == "certified" for c in doc["candidates"])


def test_search_csv(tmp_path):
    code, text = run(tmp_path, "search", "--space", "hyperbolic", "--samples", "100", "--format", "csv")
    lines = text.splitlines()
    assert lines[0] == "# seed=0" and lines[2].startswith("status,provenance,both_signs,X1,X2")
    assert lines[3].startswith("certified,")


def test_search_guarantee_violated(tmp_path, monkeypatch):
    import finslerhom.cli as cli

    class Fake:
        status = "guarantee-violated"

        def as_dict(self):
            return {"status": self.status}

    monkeypatch.setattr(cli, "find_zeros", lambda spec, cfg: Fake())
    code, text = run(tmp_path, "search", "--space", "heisenberg")
    assert code == EXIT_GUARANTEE and json.loads(text)["status"] == "guarantee-violated"


def test_verify(tmp_path):
    code, text = run(tmp_path, "verify", "--space", "heisenberg", "--X", "0", "0", "1")
    assert code == EXIT_OK and json.loads(text)["status"] == "certified"
    code, text = run(tmp_path, "verify", "--space", "heisenberg", "--X", "1", "0", "1")
    doc = json.loads(text)
    assert doc["status"] == "rejected" and doc["t_residual"] > 1e-2 and doc["lemma2_residual"] > 0.1
    _, text = run(tmp_path, "verify", "--space", "flat", "--X", "0.2", "-3", "1")
    assert json.loads(text)["status"] == "certified"
    code, _ = run(tmp_path, "verify", "--space", "flat", "--X", "0", "0", "0")
    assert code == EXIT_DOMAIN


def test_sphere_field(tmp_path):
    code, text = run(tmp_path, "sphere-field", "--space", "su2", "--samples", "50")
    lines = text.splitlines()
    assert lines[1] == "x1,x2,x3,v1,v2,v3,norm_v,norm_t" and len(lines) == 52
    assert max(float(l.split(",")[-1]) for l in lines[2:]) <= 1e-8
    _, text = run(tmp_path, "sphere-field", "--space", "heisenberg", "--samples", "2000")
    assert min(float(l.split(",")[-1]) for l in text.splitlines()[2:]) <= 1e-3
    _, text = run(tmp_path, "sphere-field", "--space", "heisenberg", "--samples", "1")
    assert len(text.splitlines()) == 3


def test_run_config(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"space": "hyperbolic", "samples": 40, "seed": 9, "tol": {"t_residual": 1e-9}}))
    code, text = run(tmp_path, "search", "--config", str(cfg))
    doc = json.loads(text)
    assert code == EXIT_OK and doc["seed"] == 9 and doc["config"]["samples"] == 40
    assert doc["config"]["tol"]["t_residual"] == 1e-9
    # flags override the file
    _, text = run(tmp_path, "search", "--config", str(cfg), "--seed", "2")
    assert json.loads(text)["seed"] == 2


@pytest.mark.parametrize("doc", [
    {"space": "hyperbolic", "colour": "red"},
    {"space": "hyperbolic", "tol": {"nope": 1.0}},
    {"space": "hyperbolic", "tol": -1.0},
    {"space": "hyperbolic", "samples": 0},
    {"space": "hyperbolic", "command": "verify"},
])
def test_run_config_rejections(tmp_path, doc):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps(doc))
    code, text = run(tmp_path, "search", "--config", str(cfg))
    assert code == EXIT_USAGE and text is None


def test_usage_errors(tmp_path):
    assert main(["frobnicate"]) == EXIT_USAGE
    assert main(["search", "--space", "no-such-space"]) == EXIT_USAGE
    assert main(["tensors", "--space", "heisenberg", "--y", "1", "0"]) == EXIT_USAGE
    assert main(["search", "--samples", "x"]) == EXIT_USAGE


def test_space_file_and_algebra_only(tmp_path):
    spec = tmp_path / "s.json"
    spec.write_text(json.dumps({"family": "hyperbolic", "metric": {"type": "randers", "b": [0.3, 0.0]}}))
    code, text = run(tmp_path, "verify", "--space", str(spec), "--X", "-0.3", "0.9539392014169456")
    assert code == EXIT_OK and json.loads(text)["status"] == "certified"
    alg = tmp_path / "a.json"
    c = np.zeros((2, 2, 2))
    alg.write_text(json.dumps({"family": "custom", "metric": {"type": "riemannian"},
                               "algebra": {"structure_constants": c.tolist()}}))
    code, text = run(tmp_path, "verify", "--space", str(alg), "--X", "1", "0")
    assert code == EXIT_OK and json.loads(text)["status"] == "uncorroborated"
    assert main(["search", "--space", str(alg)]) == EXIT_USAGE


def test_byte_identical_outputs(tmp_path):
    args = ["search", "--space", "hyperbolic-randers", "--samples", "120", "--seed", "4"]
    _, a = run(tmp_path, *args, name="a.json")
    _, b = run(tmp_path, *args, name="b.json")
    assert a == b


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "finslerhom", "spaces", "--format", "csv"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.startswith("# seed=0\nname,")
