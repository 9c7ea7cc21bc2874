from __future__ import annotations

import io
import math
from pathlib import Path

import numpy as np
import pytest

from ncatenoid.errors import AtPuncture, SinkFailure
from ncatenoid.residues import weierstrass_from_solution
from ncatenoid.solver import catenoid_family, named_example
from ncatenoid.surface import (
    SamplingConfig,
    base_point,
    eval_weierstrass,
    export_obj,
    gk_segments,
    integrate_point,
    metric_density,
    plan_path,
    sample_surface,
)

DATA = Path(__file__).parent / "data"
COARSE = SamplingConfig(radial_steps=3, angular_steps=8, grid_steps=6)


def _tet_w():
    return weierstrass_from_solution(named_example("tetrahedral").candidates[0])


def test_gk_integrates_polynomial_exactly():
    val = gk_segments(lambda t: np.stack([t ** 5, np.exp(t), np.exp(1j * t)], -1), [0.0, 1j], [1.0, 2 + 1j])
    assert val[0, 0] == pytest.approx(1 / 6, abs=1e-14)
    assert val[0, 1] == pytest.approx(math.e - 1, abs=1e-13)
    want = ((2 + 1j) ** 6 - (1j) ** 6) / 6
    assert val[1, 0] == pytest.approx(want, abs=1e-12)


def test_evaluation_refuses_punctures():
    w = _tet_w()
    with pytest.raises(AtPuncture):
        eval_weierstrass(w, w.q[0])


def test_path_avoids_punctures():
    w = _tet_w()
    z0 = base_point(w, SamplingConfig())
    target = -z0 + 0.01j
    path = plan_path(w, z0, target)
    assert path[0] == z0 and path[-1] == target
    fine = np.concatenate([np.linspace(a, b, 50) for a, b in zip(path[:-1], path[1:])])
    dmin = min(np.min(np.abs(fine - q)) for q in w.q if np.isfinite(q.real))
    assert dmin > 0.05


def test_integration_is_path_independent_near_puncture():
    w = _tet_w()
    q = w.q[0]
    a = integrate_point(w, q + 1e-2)
    # going once around the puncture changes nothing (zero real period)
    b = integrate_point(w, q + 1e-2 * np.exp(2j * np.pi - 1e-12j))
    assert np.allclose(a, b, atol=1e-9)


def test_catenoid_mesh_matches_closed_form():
    w = catenoid_family().weierstrass(1.0)
    cfg = SamplingConfig()
    m = sample_surface(w, cfg)
    m.validate()
    z0 = base_point(w, cfg)

    def x(z):
        return np.array([(z + 1 / z).real, (1j / z - 1j * z).real, 2 * math.log(abs(z))])

    errs = [np.linalg.norm(v - (x(z) - x(z0))) for v, z in zip(m.vertices, m.domain)]
    assert max(errs) < 1e-9


def test_mesh_labels_and_normals():
    m = sample_surface(_tet_w(), COARSE)
    assert set(np.unique(m.end_labels)) == {-1, 0, 1, 2, 3}
    assert np.allclose(np.linalg.norm(m.gauss_values, axis=1), 1)
    assert len(m.end_meta) == 4
    # metric blows up toward each end
    assert all(e["r_inner"] < e["r_outer"] for e in m.end_meta)


def test_mesh_without_bulk():
    m = sample_surface(_tet_w(), SamplingConfig(radial_steps=3, angular_steps=8, grid_steps=0))
    assert len(m.triangles) > 0


def test_metric_density_positive_off_branch_points():
    w = _tet_w()
    assert metric_density(w, 0.3 + 0.1j) > 0


def test_obj_golden():
    buf = io.BytesIO()
    export_obj(sample_surface(_tet_w(), COARSE), buf)
    golden = (DATA / "tetrahedral_coarse.obj").read_bytes()
    assert buf.getvalue() == golden


def test_obj_sink_failure():
    class Broken:
        def write(self, _):
            raise OSError("disk full")

    with pytest.raises(SinkFailure):
        export_obj(sample_surface(_tet_w(), COARSE), Broken())
