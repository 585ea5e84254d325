"""Planar quasi-static grasp simulator for the F1 hand and a symmetric baseline gripper."""

import json
from pathlib import Path

from . import _core
from ._core import ValidationError, aperture_inverse, lift_test, primitive_translation, unloaded_aperture

__all__ = [
    "ValidationError",
    "aperture_inverse",
    "default_suite",
    "hand_config",
    "lift_test",
    "load_suite",
    "primitive_translation",
    "run_suite",
    "run_trial",
    "unloaded_aperture",
]


def default_suite() -> str:
    here = Path(__file__).resolve().parent
    for candidate in (here / "data", here.parents[1] / "data"):
        if (candidate / "objects.json").is_file():
            return str(candidate / "objects.json")
    raise FileNotFoundError("bundled object suite not found")


def load_suite(path: str | None = None) -> list[dict]:
    return json.loads(_core.load_suite(path or default_suite()))["objects"]


def hand_config(variant: str = "f1") -> dict:
    return json.loads(_core.hand_config(variant))


def run_suite(
    grippers=("f1",),
    objects=(),
    mode: str = "primitive",
    trials: int = 20,
    seed: int = 0,
    alignment_deg: float = 45.0,
    sigma_center: float = 0.0,
    threads: int = 0,
    suite: str | None = None,
) -> dict:
    """Batch report as a dict; same layout as `grasp-sim run --out report.json`."""
    return json.loads(
        _core.run_suite(
            suite or default_suite(),
            list(grippers),
            list(objects),
            mode,
            trials,
            seed,
            alignment_deg,
            sigma_center,
            threads,
        )
    )


def run_trial(
    object: str,
    gripper: str = "f1",
    index: int = 0,
    mode: str = "primitive",
    seed: int = 0,
    alignment_deg: float = 45.0,
    sigma_center: float = 0.0,
    suite: str | None = None,
) -> dict:
    return json.loads(
        _core.run_trial(suite or default_suite(), gripper, object, mode, index, seed, alignment_deg, sigma_center)
    )
