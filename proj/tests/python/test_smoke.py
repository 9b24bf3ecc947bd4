"""Smoke tests for the python bindings."""

import json
import math

import numpy as np
import pytest

import fissflow


def test_triangulate_unit_square():
    points = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    mesh = fissflow.triangulate(points, np.zeros(4))
    assert mesh.n_vertices == 4
    assert mesh.n_triangles == 2
    assert mesh.n_interface_edges == 1
    assert mesh.n_boundary_edges == 4
    assert mesh.triangles.shape == (2, 3)
    assert mesh.vertices.shape == (4, 2)


def test_surface_presets():
    assert fissflow.surface_preset("flat", 0.3, 0.4) == 0.0
    assert fissflow.surface_preset("example1", 0.0, 0.0) == pytest.approx(0.0)
    x, y = 0.25, 0.5
    expected = 0.8 * (math.sin(2 * math.pi * x) * math.exp(-2 * math.pi * y) + y)
    assert fissflow.surface_preset("example1", x, y) == pytest.approx(expected, rel=1e-14)
    with pytest.raises(fissflow.ConfigError):
        fissflow.surface_preset("bogus", 0.0, 0.0)


def test_projection_makes_fields_conservative():
    points = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    mesh = fissflow.triangulate(points, np.zeros(4))
    v0 = np.array([[1.0, 0.0], [-1.0, 0.0]])
    v = fissflow.project_conservative(mesh, v0)
    assert fissflow.conservation_residual(mesh, v) < 1e-10
    # the symmetric average from the worked projection example
    assert v == pytest.approx(np.array([[0.5, 0.5], [-0.5, -0.5]]))


def test_pipeline_run_small():
    cfg = json.loads(fissflow.example_config(1, with_well=False, seed=3))
    cfg["mesh"]["target_elements"] = 60
    out = fissflow.run(json.dumps(cfg), write_outputs=False)

    assert out["n_triangles"] > 0
    assert out["is_forest"] is True
    report = out["report"]
    assert report["U_curv"] >= 0.0
    assert report["U_fric"] >= 0.0
    assert report["U_grav"] < 0.0
    assert report["balance"] == pytest.approx(
        report["U_curv"] + report["U_fric"] + report["U_grav"]
    )
    assert out["v"].shape == (out["n_triangles"], 2)
    assert out["u"].shape == (out["n_triangles"], 3)
    # tangential lift preserves element speeds
    assert np.linalg.norm(out["u"], axis=1) == pytest.approx(
        np.linalg.norm(out["v"], axis=1), abs=1e-12
    )
    psi = out["psi"]
    assert np.all(np.isfinite(psi))
    assert np.all(psi > 0.0)


def test_run_rejects_bad_config():
    with pytest.raises(fissflow.ConfigError):
        fissflow.run("{}")
