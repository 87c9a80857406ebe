import json
import xml.etree.ElementTree as ET

import pytest

from hoeg.recipes import RECIPES, run_recipe


def test_recipe_names():
    assert sorted(RECIPES) == ["forsaken_F", "forsaken_Falpha", "mforsaken", "x2y_F", "x2y_Falpha"]


def test_unknown_recipe_is_lookup_error(tmp_path):
    with pytest.raises(KeyError):
        run_recipe("nope", str(tmp_path))


def test_forsaken_cycle_recipe_outputs(tmp_path):
    verdict = run_recipe("forsaken_F", str(tmp_path))
    assert verdict["ok"] is True
    assert verdict["cycles"] == [True, True]
    for name in ("forsaken_F_p1_trajectories.svg", "forsaken_F_p2_trajectories.svg",
                 "forsaken_F_min_opnorm.svg"):
        ET.parse(tmp_path / name)  # well-formed XML
    saved = json.loads((tmp_path / "forsaken_F_verdict.json").read_text())
    assert saved == {"recipe": "forsaken_F", **verdict} or saved == verdict
