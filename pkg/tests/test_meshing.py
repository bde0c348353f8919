import math

import numpy as np
import pytest

from bjorling.curves import make_circle
from bjorling.meshing import (
    SurfaceMesh,
    clip_halfspace,
    export_csv,
    export_obj,
    export_ply,
    load_obj,
    mesh_area,
    sample_mesh,
)
from bjorling.schwarz import StripTooWide

from conftest import epi


def unit_quad():
    return SurfaceMesh(
        vertices=np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0],
                           [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]]),
        faces=[(0, 1, 2, 3)],
        attributes={"density": np.array([1.0, 2.0, 3.0, 4.0])},
    )


def test_sample_mesh_counts_and_tags():
    mesh = sample_mesh(make_circle(), (0, 2 * math.pi), (-1.0, 1.0), 64, 17)
    assert len(mesh.vertices) == 64 * 17
    assert len(mesh.faces) == 63 * 16
    assert set(mesh.attributes) == {"t", "s", "density", "abs_g"}
    assert len(mesh.tags["geodesic_row"]) == 64
    # catenoid density on the geodesic row is speed^2 = 1
    row = mesh.tags["geodesic_row"]
    assert np.allclose(mesh.attributes["density"][row], 1.0, atol=1e-12)
    assert np.allclose(mesh.attributes["abs_g"][row], 1.0, atol=1e-12)


def test_sample_mesh_epitrochoid_geodesic_row_matches_curve():
    curve = epi(2, 0.5)
    mesh = sample_mesh(curve, (0, 2 * math.pi), (-0.1, 0.1), 48, 9)
    row = mesh.tags["geodesic_row"]
    pts = mesh.vertices[row]
    t = mesh.attributes["t"][row]
    expect = curve.point3d(t)
    assert np.max(np.abs(pts - expect)) < 1e-9
    # 3-lobed closed outline
    assert abs(pts[0, 0] - 2.5) < 1e-9


def test_sample_mesh_propagates_strip_clamp():
    with pytest.raises(StripTooWide):
        sample_mesh(epi(2, 0.5), (0, 2 * math.pi), (-1.0, 1.0), 16, 5)


def test_clip_keeps_positive_side():
    mesh = unit_quad()
    clipped = clip_halfspace(mesh, (1.0, 0.0, 0.0), 0.5)
    assert all(v[0] >= 0.5 - 1e-12 for v in clipped.vertices)
    assert mesh_area(clipped) <= mesh_area(mesh) + 1e-12
    assert abs(mesh_area(clipped) - 0.5) < 1e-12
    # interpolated attribute on the cut edge
    assert np.min(clipped.attributes["density"]) >= 1.0


def test_clip_offset_beyond_bbox_is_identity_or_empty():
    mesh = unit_quad()
    same = clip_halfspace(mesh, (0.0, 0.0, 1.0), -5.0)
    assert len(same.faces) == 1 and len(same.vertices) == 4
    empty = clip_halfspace(mesh, (0.0, 0.0, 1.0), 5.0)
    assert len(empty.faces) == 0


def test_clip_catenoid_half():
    mesh = sample_mesh(make_circle(), (0, 2 * math.pi), (-1.0, 1.0), 32, 9)
    half = clip_halfspace(mesh, (0.0, 0.0, 1.0), 0.0)
    assert all(v[2] >= -1e-12 for v in half.vertices)
    assert 0 < len(half.faces) < len(mesh.faces)
    assert mesh_area(half) <= mesh_area(mesh)


def test_obj_roundtrip(tmp_path):
    mesh = unit_quad()
    path = tmp_path / "quad.obj"
    export_obj(mesh, path)
    text = path.read_text()
    assert text.count("\nf ") + text.startswith("f ") == 1
    assert len([l for l in text.splitlines() if l.startswith("v ")]) == 4
    back = load_obj(path)
    assert np.max(np.abs(back.vertices - mesh.vertices)) < 1e-12
    assert back.faces == [(0, 1, 2, 3)]


def test_obj_roundtrip_full_precision(tmp_path):
    mesh = sample_mesh(epi(3, 0.6), (0.0, 2.0), (-0.05, 0.05), 9, 5)
    path = tmp_path / "patch.obj"
    export_obj(mesh, path)
    back = load_obj(path)
    assert np.max(np.abs(back.vertices - mesh.vertices)) < 1e-12


def test_empty_mesh_exports(tmp_path):
    empty = SurfaceMesh(vertices=np.zeros((0, 3)), faces=[], attributes={})
    export_obj(empty, tmp_path / "empty.obj")
    export_ply(empty, tmp_path / "empty.ply")
    export_csv(empty, tmp_path / "empty.csv")
    assert (tmp_path / "empty.obj").read_text() == ""
    assert (tmp_path / "empty.csv").read_bytes() == b"x,y,z\r\n"
    assert b"element vertex 0" in (tmp_path / "empty.ply").read_bytes()


def test_ply_structure(tmp_path):
    mesh = unit_quad()
    path = tmp_path / "quad.ply"
    export_ply(mesh, path)
    blob = path.read_bytes()
    header_end = blob.index(b"end_header\n") + len(b"end_header\n")
    header = blob[:header_end].decode()
    assert "format binary_little_endian 1.0" in header
    assert "property float64 density" in header
    body = blob[header_end:]
    # 4 vertices * 4 float64 + 2 fan triangles * (1 + 12) bytes
    assert len(body) == 4 * 4 * 8 + 2 * 13
    first_vertex = np.frombuffer(body[:32], dtype="<f8")
    assert np.allclose(first_vertex, [0.0, 0.0, 0.0, 1.0])


def test_exports_deterministic(tmp_path):
    mesh = sample_mesh(epi(2, 0.5), (0.0, 1.5), (-0.08, 0.08), 12, 7)
    a_obj, b_obj = tmp_path / "a.obj", tmp_path / "b.obj"
    export_obj(mesh, a_obj)
    export_obj(mesh, b_obj)
    assert a_obj.read_bytes() == b_obj.read_bytes()
    a_ply, b_ply = tmp_path / "a.ply", tmp_path / "b.ply"
    export_ply(mesh, a_ply)
    export_ply(mesh, b_ply)
    assert a_ply.read_bytes() == b_ply.read_bytes()
    a_csv, b_csv = tmp_path / "a.csv", tmp_path / "b.csv"
    export_csv(mesh, a_csv)
    export_csv(mesh, b_csv)
    assert a_csv.read_bytes() == b_csv.read_bytes()


def test_csv_header_and_rows(tmp_path):
    mesh = unit_quad()
    path = tmp_path / "quad.csv"
    export_csv(mesh, path)
    lines = path.read_bytes().decode().split("\r\n")
    assert lines[0] == "x,y,z,density"
    assert len([l for l in lines if l]) == 5


def test_io_failure_surfaces_path(tmp_path):
    mesh = unit_quad()
    with pytest.raises(OSError) as err:
        export_obj(mesh, tmp_path / "missing_dir" / "x.obj")
    assert "missing_dir" in str(err.value)
