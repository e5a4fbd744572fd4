import itertools

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import QUARTER, random_lamination

from ads_earthquake.adsgeom import PlaneKind, TimeSide, bilinear
from ads_earthquake.circlemap import PiecewiseMobiusCircleMap, finite_earthquake_boundary, separating_plane
from ads_earthquake.errors import DegenerateFlat
from ads_earthquake.hull import (
    brute_force_hull,
    build_hull,
    classify_faces,
    convex_hull_3d,
    dump_off,
    extract_pleated,
    merge_coplanar,
    sample_arrays,
    sample_graph,
)
from ads_earthquake.mobius import IDENTITY, R_I, Mobius, equals

CUBE = np.array(list(itertools.product([0.0, 1.0], repeat=3)) + [[0.5, 0.5, 0.5]])


def sphere_points(n: int, seed: int = 11) -> np.ndarray:
    v = np.random.default_rng(seed).normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def assert_supporting(hc):
    for face in hc.faces:
        assert np.max(hc.points @ face.normal - face.offset) <= hc.tolerance + 1e-12


class TestQuickHull:
    def test_cube(self):
        hc = convex_hull_3d(CUBE)
        assert len(hc.faces) == 12
        assert 8 not in hc.vertex_ids
        assert_supporting(hc)

    def test_cube_faces_merge_into_squares(self):
        merged = merge_coplanar(convex_hull_3d(CUBE))
        assert merged.merged
        assert len(merged.faces) == 6
        assert all(len(face.vertices) == 4 for face in merged.faces)
        assert max(face.residual for face in merged.faces) < 1e-12
        normals = sorted(tuple(np.round(face.normal, 12)) for face in merged.faces)
        assert normals == sorted(tuple(float(x) for x in row) for row in np.vstack([np.eye(3), -np.eye(3)]))

    def test_noisy_cap_merges_into_one_face(self):
        angles = np.linspace(0.0, 2 * np.pi, 60, endpoint=False)
        rim = np.column_stack([np.cos(angles), np.sin(angles)])
        noise = np.random.default_rng(3).uniform(-1e-11, 1e-11, 60)
        points = np.vstack([np.column_stack([rim, np.zeros(60)]), np.column_stack([rim, 1.0 + noise])])
        hc = convex_hull_3d(points)
        merged = merge_coplanar(hc)
        top = [face for face in merged.faces if face.normal[2] > 0.5]
        assert len(top) == 1
        assert len(top[0].vertices) == 60
        assert top[0].residual <= hc.tolerance
        assert_supporting(merged)

    def test_agrees_with_brute_force(self):
        points = sphere_points(40)
        hc = convex_hull_3d(points)
        assert sorted(tuple(sorted(face.vertices)) for face in hc.faces) == brute_force_hull(points)

    def test_euler_characteristic(self):
        hc = convex_hull_3d(sphere_points(200, seed=12))
        vertices, faces = len(hc.vertex_ids), len(hc.faces)
        assert faces == 2 * vertices - 4
        # each face has three neighbours
        assert len(hc.adjacency()) == 3 * faces // 2

    def test_coplanar_points(self):
        flat = np.column_stack([np.random.default_rng(1).normal(size=(20, 2)), np.zeros(20)])
        with pytest.raises(DegenerateFlat):
            convex_hull_3d(flat)

    def test_too_few_points(self):
        with pytest.raises(DegenerateFlat):
            convex_hull_3d(CUBE[:3])

    def test_brute_force_ignores_duplicates(self):
        points = np.vstack([CUBE, CUBE[:2]])
        faces = brute_force_hull(points)
        assert len(faces) == 6
        assert all(len(face) == 4 for face in faces)


class TestSampling:
    def test_too_few_samples(self, simple_map):
        with pytest.raises(ValueError):
            sample_graph(simple_map, 3)

    def test_breakpoints_are_sampled(self, simple_map):
        xs, ys = sample_arrays(simple_map, 8)
        assert len(xs) == 8
        assert any(abs(v) < 1e-15 for v in xs[:, 1])
        assert any(abs(u) < 1e-15 for u in xs[:, 0])

    def test_samples_lie_on_the_graph(self, simple_map):
        for point in sample_graph(simple_map, 16):
            if point.x.is_infinite:
                assert point.y.is_infinite
            elif point.x.value > 0:
                assert point.y.value == pytest.approx(4 * point.x.value)
            else:
                assert point.y.value == pytest.approx(point.x.value)


class TestGraphHull:
    def test_vertices_lie_on_the_boundary_quadric(self, simple_map):
        hc = build_hull(simple_map, R_I, 64)
        for i in hc.vertex_ids:
            assert hc.coords(i).quadric == pytest.approx(0.0, abs=1e-9)
        assert_supporting(hc)

    def test_single_mobius_is_flat(self):
        f = PiecewiseMobiusCircleMap.global_map(Mobius(2.0, 0.0, 0.0, 0.5))
        with pytest.raises(DegenerateFlat) as info:
            build_hull(f, R_I, 32)
        assert equals(info.value.mobius, f.pieces[0])

    def test_merged_faces_match_the_oracle(self, simple_map):
        merged = merge_coplanar(build_hull(simple_map, R_I, 12))
        oracle = brute_force_hull(merged.points)
        assert len(merged.faces) == len(oracle)
        for face in merged.faces:
            assert any(set(face.vertices) <= set(candidate) for candidate in oracle)

    def test_random_maps_match_the_oracle(self, rng):
        f, _ = finite_earthquake_boundary(random_lamination(rng, 3))
        merged = merge_coplanar(build_hull(f, separating_plane(f), 14))
        oracle = brute_force_hull(merged.points)
        assert len(merged.faces) == len(oracle)


class TestClassification:
    def test_simple_map_past_side_has_two_faces(self, simple_map):
        merged = merge_coplanar(build_hull(simple_map, R_I, 128))
        classification = classify_faces(merged)
        assert len(classification.past) == 2
        assert classification.future
        duals = [classification.planes[i].dual for i in classification.past]
        assert any(equals(d, IDENTITY, tol=1e-7) for d in duals)
        assert any(equals(d, QUARTER, tol=1e-7) for d in duals)

    def test_planes_are_spacelike(self, simple_map):
        merged = merge_coplanar(build_hull(simple_map, R_I, 128))
        classification = classify_faces(merged)
        for i in classification.past + classification.future:
            assert classification.planes[i].kind is PlaneKind.SPACELIKE
        assert len(classification.planes) == len(merged.faces)

    def test_pleated_past_surface(self, simple_map):
        merged = merge_coplanar(build_hull(simple_map, R_I, 128))
        ps = extract_pleated(merged, classify_faces(merged), TimeSide.PAST, simple_map)
        assert ps.side is TimeSide.PAST
        assert len(ps.faces) == 2
        assert len(ps.ridges) == 1
        ridge = ps.ridges[0]
        assert sorted(round(p.x.angle, 9) for p in ridge.endpoints) == pytest.approx([0.0, np.pi])
        for face_index in ridge.faces:
            dual = ps.faces[face_index].dual
            for point in ridge.endpoints:
                assert abs(bilinear(point.matrix, dual.matrix)) < 1e-6
        assert ps.ridges_of(0) == [ridge]

    def test_future_surface_is_ruled(self, simple_map):
        merged = merge_coplanar(build_hull(simple_map, R_I, 64))
        ps = extract_pleated(merged, classify_faces(merged), TimeSide.FUTURE, simple_map)
        assert len(ps.faces) > 2
        assert len(ps.ridges) >= len(ps.faces) - 1
        for face in ps.faces:
            angles = [p.x.angle for p in face.ideal_vertices]
            assert angles == sorted(angles)


def test_dump_off(simple_map, tmp_path):
    merged = merge_coplanar(build_hull(simple_map, R_I, 16))
    path = dump_off(merged, tmp_path / "hull.off")
    lines = path.read_text().splitlines()
    assert lines[0] == "OFF"
    vertices, faces, edges = (int(x) for x in lines[1].split())
    assert (vertices, faces, edges) == (len(merged.vertex_ids), len(merged.faces), 0)
    assert len(lines) == 2 + vertices + faces
    first = np.array([float(x) for x in lines[2].split()])
    assert_allclose(first, merged.points[merged.vertex_ids[0]])


@pytest.mark.slow
def test_random_clouds_match_the_oracle():
    rng = np.random.default_rng(30)
    for _ in range(100):
        points = rng.normal(size=(30, 3))
        merged = merge_coplanar(convex_hull_3d(points))
        assert sorted(tuple(sorted(face.vertices)) for face in merged.faces) == brute_force_hull(points)
