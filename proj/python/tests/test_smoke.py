import json
import math

import numpy as np
import pytest

import sparseloc


def test_eigen_matches_numpy():
    rng = np.random.default_rng(0)
    for _ in range(50):
        a = rng.uniform(-10, 10, (3, 3))
        s = (a + a.T) / 2
        values, vectors = sparseloc.sym_eigen3(s)
        np.testing.assert_allclose(values, np.linalg.eigvalsh(s)[::-1], atol=1e-9)
        np.testing.assert_allclose(s @ vectors, vectors * np.array(values), atol=1e-9)
        np.testing.assert_allclose(sparseloc.char_poly_roots3(s), values, atol=1e-8)


def test_svd_bridge():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(3, 40))
    x -= x.mean(axis=1, keepdims=True)
    sigma, _ = sparseloc.svd_right3(x)
    cov_values, _ = sparseloc.sym_eigen3(x @ x.T / 39)
    np.testing.assert_allclose(np.square(sigma) / 39, cov_values, rtol=1e-9)


def test_projection_examples():
    rig = sparseloc.CameraRig(fov_y=math.pi / 2, aspect=1.0, near=1.0, far=100.0)
    ndc, index = sparseloc.project_cloud(
        np.array([[0, 0, -1], [0, 0, -100], [1, 0, -1], [0, 0, 5]], dtype=float), rig
    )
    assert list(index) == [0, 1, 2]
    np.testing.assert_allclose(ndc[0], [0, 0, -1], atol=1e-12)
    np.testing.assert_allclose(ndc[1], [0, 0, 1], atol=1e-12)
    assert ndc[2][0] == pytest.approx(1.0)


def test_normalize_box():
    assert sparseloc.normalize_box(0, 0, 640, 480, 640, 480) == (-1.0, -1.0, 1.0, 1.0)
    assert sparseloc.normalize_box(0, 0, 320, 240, 640, 480) == (-1.0, 0.0, 0.0, 1.0)
    with pytest.raises(sparseloc.SparselocError):
        sparseloc.normalize_box(10, 0, 5, 10, 640, 480)


def test_filter_and_pose():
    rig = sparseloc.CameraRig.look_at([0, 0, 20], [0, 0, 0])
    pts = np.array([[x, 0.1 * x, 0.0] for x in np.linspace(-3, 3, 40)])
    ids = sparseloc.filter_in_box(pts, rig, (-1, -1, 1, 1))
    assert ids == list(range(40))
    pose = sparseloc.estimate_pose(pts[ids])
    major = pose["axes"][0]
    assert abs(major @ np.array([1, 0.1, 0]) / np.linalg.norm([1, 0.1, 0])) == pytest.approx(1.0)
    svd = sparseloc.estimate_pose(pts[ids], route="svd")
    np.testing.assert_allclose(svd["axes"], pose["axes"], atol=1e-9)
    with pytest.raises(sparseloc.SparselocError):
        sparseloc.estimate_pose(pts[:10])


def test_target_cloud_is_directional():
    spec = json.loads(sparseloc.default_scene_json())
    spec["noise_sigma"] = 0.0
    cloud = sparseloc.gen_target_cloud(json.dumps(spec))
    assert cloud.shape == (spec["target"]["n_points"], 3)
    pose = sparseloc.estimate_pose(cloud)
    truth = np.array(spec["target"]["rotation"]).reshape(3, 3)[:, 0]
    assert abs(pose["axes"][0] @ truth) == pytest.approx(1.0, abs=1e-9)


def test_run_locate_simulated(tmp_path):
    scene = tmp_path / "scene.json"
    scene.write_text(sparseloc.default_scene_json())
    first = sparseloc.run_locate(simulate=str(scene))
    second = sparseloc.run_locate(simulate=str(scene), metrics=str(tmp_path / "m.json"))
    assert first["exit_code"] == 0
    assert first["pose_json"] == second["pose_json"]
    pose = json.loads(first["pose_json"])
    assert pose["isotropy_flag"] is False
    metrics = json.loads((tmp_path / "m.json").read_text())
    counts = [f["accumulated"] for f in metrics["frames"]]
    assert counts == sorted(counts)


def test_run_locate_bad_camera(tmp_path):
    (tmp_path / "cloud.csv").write_text("id,x,y,z\n0,0,0,-5\n")
    (tmp_path / "cams.json").write_text("{}")
    (tmp_path / "det.json").write_text("[]")
    r = sparseloc.run_locate(
        cloud=str(tmp_path / "cloud.csv"),
        cameras=str(tmp_path / "cams.json"),
        detections=str(tmp_path / "det.json"),
    )
    assert r["exit_code"] == 2
    assert "cams.json" in r["message"]
