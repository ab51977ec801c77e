import math

import numpy as np
import pytest

import shrinker

FOUR_OVER_E = 4 / math.e


def test_sphere_area():
    s = shrinker.generate("sphere", 5, radius=2.0)
    assert abs(shrinker.gaussian_area(s)["value"] - FOUR_OVER_E) < 1e-4


def test_plane_with_tail():
    p = shrinker.generate("plane_disk", 3, radius=12.0)
    assert p.has_tail
    assert abs(shrinker.gaussian_area(p)["value"] - 1.0) < 1e-6


def test_arrays_round_trip():
    s = shrinker.generate("sphere", 2)
    v, f = s.vertices, s.faces
    assert v.shape == (s.num_vertices, 3)
    assert f.shape == (s.num_faces, 3)
    copy = shrinker.TriMesh(v, f)
    assert np.array_equal(copy.vertices, v)
    assert shrinker.gaussian_area(copy)["value"] == shrinker.gaussian_area(s)["value"]


def test_scaling_identity():
    m = shrinker.generate("ellipsoid", 3)
    t, s = np.array([0.3, -0.1, 0.4]), 1.7
    lhs = shrinker.gaussian_area(shrinker.translate_dilate(m, t, s))["value"]
    rhs = shrinker.f_density(m, t, 1 / s**2)
    assert abs(lhs - rhs) <= 1e-8 * shrinker.gaussian_area(m)["value"]


def test_entropy_and_spectrum():
    s = shrinker.generate("sphere", 3, radius=1.0)
    e = shrinker.entropy(s)
    assert abs(e["lambda_"] - FOUR_OVER_E) < 2e-3
    assert abs(e["t0"] - 0.25) < 0.25 * 2e-2
    sp = shrinker.stability_spectrum(shrinker.generate("sphere", 3), 9)
    assert sp["index"] == 4


def test_degree_by_genus():
    for kind, expected in [("sphere", 1), ("torus", 0), ("double_torus", -1)]:
        m = shrinker.generate(kind, 2)
        assert shrinker.gauss_degree(m)["degree"] == expected == 1 - m.genus()


def test_width_families():
    assert abs(shrinker.width("plane")["max_area"] - 1.0) < 1e-6
    w = shrinker.width("sphere", tau_points=201)
    assert abs(w["max_area"] - FOUR_OVER_E) < 1e-3


def test_errors_carry_codes():
    with pytest.raises(shrinker.ShrinkerError) as info:
        shrinker.gauss_degree(shrinker.generate("plane_disk", 2))
    assert info.value.code == "E_PRECONDITION"
    with pytest.raises(shrinker.ShrinkerError):
        shrinker.generate("klein_bottle", 2)
    with pytest.raises(TypeError):
        shrinker.generate("sphere", 2, colour=1)


def test_criterion_from_python():
    r = shrinker.run_criterion(13)
    assert r["pass_"] and r["id"] == 13
