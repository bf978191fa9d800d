import csv
import os
import subprocess
import sys

import numpy as np
import pytest

from hlo_denoise import fixtures as fx
from hlo_denoise import read_mesh, write_mesh
from hlo_denoise.cli import main
from hlo_denoise.mesh import build_mesh, mean_edge_length
from hlo_denoise.metrics import msae


@pytest.fixture
def sphere_obj(tmp_path):
    path = tmp_path / "gt.obj"
    write_mesh(fx.icosphere(2), path)
    return path


def run(*args):
    return main([str(a) for a in args])


def test_add_noise_reports_sigma(sphere_obj, tmp_path, capsys):
    out = tmp_path / "noisy.obj"
    assert run("add-noise", sphere_obj, "--sigma", 0.5, "--seed", 7, "-o", out) == 0
    text = capsys.readouterr().out
    le = mean_edge_length(read_mesh(sphere_obj))
    assert f"sigma_n = {0.5 * le:.9g}" in text
    assert "seed = 7" in text
    assert read_mesh(out).n_vertices == read_mesh(sphere_obj).n_vertices


def test_add_noise_zero_sigma_copies_geometry(sphere_obj, tmp_path):
    out = tmp_path / "copy.obj"
    assert run("add-noise", sphere_obj, "--sigma", 0, "-o", out) == 0
    assert out.read_bytes() == sphere_obj.read_bytes()


def test_missing_input_exit_two(tmp_path, capsys):
    assert run("add-noise", tmp_path / "missing.obj", "--sigma", 1, "-o", tmp_path / "x.obj") == 2
    err = capsys.readouterr().err
    assert err.startswith("error:") and "IoError" in err


def test_malformed_input_exit_two(tmp_path, capsys):
    bad = tmp_path / "bad.obj"
    bad.write_text("v 0 0 0\nv 1 0 zz\n")
    assert run("denoise", bad, "--iterations", 1, "-o", tmp_path / "o.obj") == 2
    assert "ParseError" in capsys.readouterr().err


def test_denoise_hlo(sphere_obj, tmp_path, capsys):
    out = tmp_path / "out.obj"
    assert run("denoise", sphere_obj, "--method", "hlo", "--iterations", 5, "-o", out) == 0
    text = capsys.readouterr().out
    assert "runtime_seconds =" in text
    assert read_mesh(out).n_faces == read_mesh(sphere_obj).n_faces


def test_denoise_uniform_shrinks_vase(tmp_path, capsys):
    src = tmp_path / "vase.off"
    write_mesh(fx.vase(), src)
    assert run("denoise", src, "--method", "uniform", "--iterations", 15, "-o", tmp_path / "v.off") == 0
    lines = dict(l.split(" = ") for l in capsys.readouterr().out.splitlines())
    assert float(lines["volume_after"]) < float(lines["volume_before"])


@pytest.mark.parametrize("bad", [["--iterations", "0"], ["--iterations", "x"], []])
def test_denoise_usage_errors(sphere_obj, tmp_path, capsys, bad):
    assert run("denoise", sphere_obj, "-o", tmp_path / "o.obj", *bad) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_no_command_is_usage_error(capsys):
    assert main([]) == 2


def test_emit_trace(sphere_obj, tmp_path):
    trace = tmp_path / "trace.csv"
    noisy = tmp_path / "n.obj"
    run("add-noise", sphere_obj, "--sigma", 0.3, "-o", noisy)
    for method in ("hlo", "uniform", "cotangent"):
        assert run("denoise", noisy, "--method", method, "--iterations", 4,
                   "-o", tmp_path / "o.obj", "--emit-trace", trace) == 0
        rows = list(csv.DictReader(trace.open()))
        assert [int(r["iteration"]) for r in rows] == [1, 2, 3, 4]
        assert set(rows[0]) == {"iteration", "avg_displacement", "total_delta_norm",
                                "mean_curvature_energy"}
        assert all(float(r["avg_displacement"]) > 0 for r in rows)


def test_trace_delta_norm_matches_library(sphere_obj, tmp_path):
    from hlo_denoise import HloConfig, denoise

    noisy = tmp_path / "n.obj"
    trace = tmp_path / "t.csv"
    run("add-noise", sphere_obj, "--sigma", 0.3, "-o", noisy)
    run("denoise", noisy, "--iterations", 3, "-o", tmp_path / "o.obj", "--emit-trace", trace)
    _, stats = denoise(read_mesh(noisy), HloConfig(iterations=3))
    rows = list(csv.DictReader(trace.open()))
    for row, s in zip(rows, stats):
        assert float(row["total_delta_norm"]) == pytest.approx(s.total_delta_norm, rel=1e-9)


def test_metrics_identical_zero(sphere_obj, capsys):
    assert run("metrics", sphere_obj, sphere_obj) == 0
    header, row = capsys.readouterr().out.strip().splitlines()
    values = dict(zip(header.split(","), row.split(",")))
    for key in ("e_v", "msae", "avg_vertex_error", "flipped_faces"):
        assert float(values[key]) == 0.0


def test_metrics_one_flipped_face(sphere_obj, tmp_path, capsys):
    gt = read_mesh(sphere_obj)
    faces = gt.faces.copy()
    faces[3] = faces[3][::-1]
    path = tmp_path / "flip.obj"
    write_mesh(build_mesh(gt.positions, faces), path)
    assert run("metrics", path, sphere_obj, "-o", tmp_path / "r.csv", "--text") == 0
    assert "flipped_faces" in capsys.readouterr().out
    row = next(csv.DictReader((tmp_path / "r.csv").open()))
    assert int(row["flipped_faces"]) == 1


def test_metrics_signed_error_field(sphere_obj, tmp_path):
    field = tmp_path / "signed.csv"
    assert run("metrics", sphere_obj, sphere_obj, "--signed-error", field) == 0
    lines = field.read_text().splitlines()
    assert lines[0] == "index,value"
    assert len(lines) == 1 + read_mesh(sphere_obj).n_vertices


def test_metrics_mismatch_surfaced(sphere_obj, tmp_path, capsys):
    other = tmp_path / "oct.obj"
    write_mesh(fx.octahedron(), other)
    assert run("metrics", sphere_obj, other) == 2
    assert "FaceCountMismatch" in capsys.readouterr().err


def test_pipeline_improves_msae(tmp_path):
    gt_path = tmp_path / "gt.obj"
    write_mesh(fx.icosphere(3), gt_path)
    noisy, out = tmp_path / "n.obj", tmp_path / "o.obj"
    assert run("add-noise", gt_path, "--sigma", 0.2, "--seed", 1, "-o", noisy) == 0
    assert run("denoise", noisy, "--iterations", 3, "-o", out) == 0
    gt = read_mesh(gt_path)
    assert msae(read_mesh(out), gt) < msae(read_mesh(noisy), gt)


def test_commands_are_deterministic(sphere_obj, tmp_path):
    outputs = []
    for k in range(2):
        noisy, out = tmp_path / f"n{k}.obj", tmp_path / f"o{k}.obj"
        run("add-noise", sphere_obj, "--sigma", 0.4, "--seed", 3, "-o", noisy)
        run("denoise", noisy, "--iterations", 4, "--random-ties", "--seed", 5, "-o", out)
        outputs.append((noisy.read_bytes(), out.read_bytes()))
    assert outputs[0] == outputs[1]


def test_threads_flag(sphere_obj, tmp_path):
    assert run("--threads", 1, "denoise", sphere_obj, "--iterations", 1, "-o", tmp_path / "o.obj") == 0


def _subprocess(args, env_extra=None, cwd=None):
    env = dict(os.environ)
    env.update(env_extra or {})
    return subprocess.run([sys.executable, "-m", "hlo_denoise", *map(str, args)],
                          capture_output=True, text=True, env=env, cwd=cwd)


def test_module_entry_point_exit_codes(sphere_obj, tmp_path):
    ok = _subprocess(["denoise", sphere_obj, "--iterations", 2, "-o", tmp_path / "o.obj"])
    assert ok.returncode == 0, ok.stderr
    bad = _subprocess(["denoise", sphere_obj, "--iterations", 0, "-o", tmp_path / "o.obj"])
    assert bad.returncode == 2
    assert bad.stderr.startswith("error:")


def test_env_flag_selects_numpy_backend(sphere_obj, tmp_path):
    code = "from hlo_denoise import _kernels; print(_kernels.DEFAULT_BACKEND, sorted(_kernels.BACKENDS))"
    env = dict(os.environ, HLO_DENOISE_DISABLE_NUMBA="1")
    res = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=env)
    assert res.stdout.split()[0] == "numpy"
    # same output file either way
    a = _subprocess(["denoise", sphere_obj, "--iterations", 3, "-o", tmp_path / "a.obj"],
                    {"HLO_DENOISE_DISABLE_NUMBA": "1"})
    b = _subprocess(["denoise", sphere_obj, "--iterations", 3, "-o", tmp_path / "b.obj"])
    assert a.returncode == b.returncode == 0
    pa, pb = read_mesh(tmp_path / "a.obj").positions, read_mesh(tmp_path / "b.obj").positions
    np.testing.assert_allclose(pa, pb, atol=1e-12)
