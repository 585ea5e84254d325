import math

import pytest

import f1grasp


def test_suite_loads():
    objects = f1grasp.load_suite()
    assert len(objects) == 25
    assert objects[0]["name"] == "coin"


def test_hand_config():
    hand = f1grasp.hand_config("f1")
    assert hand["max_aperture_mm"] == pytest.approx(130.5)
    q = f1grasp.aperture_inverse("f1", 0.08)
    assert f1grasp.unloaded_aperture("f1", q) == pytest.approx(0.08, abs=1e-6)


def test_primitive_translation():
    dx, dz = f1grasp.primitive_translation("f1", 0.08)
    assert dx == pytest.approx(0.04, abs=1e-9)
    assert dz == pytest.approx(0.0, abs=1e-12)


def test_lift_test():
    square = [(-0.01, 0.0), (0.01, 0.0), (0.01, 0.02), (-0.01, 0.02)]
    squeeze = [(-0.01, 0.01, 1.0, 0.0, 2.0), (0.01, 0.01, -1.0, 0.0, 2.0)]
    assert f1grasp.lift_test(square, squeeze, 0.05, 0.6)
    assert not f1grasp.lift_test(square, squeeze, 0.05, 0.0)


def test_run_suite_deterministic():
    a = f1grasp.run_suite(objects=["coin"], trials=2, seed=4, alignment_deg=10.0)
    b = f1grasp.run_suite(objects=["coin"], trials=2, seed=4, alignment_deg=10.0)
    assert a == b
    assert a["objects"][0]["successes"] == 2
    assert math.isfinite(a["grippers"][0]["median_peak_table_force"])


def test_run_trial():
    r = f1grasp.run_trial("washer", gripper="baseline", alignment_deg=10.0)
    assert r["success"] is False


def test_validation_errors():
    with pytest.raises(f1grasp.ValidationError):
        f1grasp.run_suite(grippers=["claw"], trials=1)
    with pytest.raises(ValueError):
        f1grasp.run_trial("anvil")
