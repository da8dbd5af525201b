"""Full-scale learnability acceptance: train on 450 synthetic notes, extract
the 100 held-out notes through the served wire protocol, require strict F1 of
at least 0.80 for SpatialTrigger and 0.70 for Figure and Ground.

Slow (minutes on CPU) and needs both console scripts on PATH, so it is
deselected by default; run with `pytest -m learnability`.
"""
from __future__ import annotations

import importlib.util
import shutil
import sys
from pathlib import Path

import pytest

SCRIPT = Path(__file__).resolve().parent.parent / "scripts" / "learnability_smoke.py"


def _load_script():
    spec = importlib.util.spec_from_file_location("learnability_smoke", SCRIPT)
    module = importlib.util.module_from_spec(spec)
    sys.modules["learnability_smoke"] = module
    spec.loader.exec_module(module)
    return module


@pytest.mark.learnability
def test_learnability_smoke(tmp_path):
    if shutil.which("eyeframes") is None or shutil.which("mrc-backend") is None:
        pytest.skip("needs the eyeframes and mrc-backend console scripts installed")
    smoke = _load_script()
    scores = smoke.main(workdir=str(tmp_path / "run"))
    assert scores["SpatialTrigger"] >= 0.80
    assert scores["Figure"] >= 0.70
    assert scores["Ground"] >= 0.70
