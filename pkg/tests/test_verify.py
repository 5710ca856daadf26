from pathlib import Path

import pytest

from r0fde import verify
from r0fde.specfile import load_spec

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


class TestGridConverges:
    def test_halving(self):
        assert verify.grid_converges(1e-4, 4e-5)
        assert not verify.grid_converges(1e-4, 6e-5)

    def test_floor(self):
        assert verify.grid_converges(3e-13, 3e-13)
        assert not verify.grid_converges(1e-9, 9e-10)
        assert verify.grid_converges(1e-6, 1e-6, floor=1e-5)


class TestSuites:
    def test_aliases(self):
        assert verify.run("theorem2.1", seed=1)["results"][0]["suite"] == "sign-equivalence"
        assert verify.run("lemma2.2", seed=1)["results"][0]["suite"] == "vhat-inverse"

    def test_r0_sign_random(self):
        out = verify.r0_sign_suite(seed=4, count=20)
        assert out["passed"] and len(out["details"]) == 20

    def test_spectral_map_default_systems(self):
        out = verify.spectral_map_suite(n=64)
        assert out["passed"]
        assert {d["system"] for d in out["details"]} == {"u'=-2u+u(t-1)", "u'=-u+u(t-1)", "u'=-u+2u(t-1)"}

    @pytest.mark.parametrize("name", ["r0_below.json", "r0_above.json"])
    def test_threshold_on_configs(self, name):
        out = verify.threshold_suite(load_spec(CONFIGS / name), count=3)
        assert out["passed"]

    def test_tick_r0_sign_includes_closed_form(self):
        out = verify.r0_sign_suite(load_spec(CONFIGS / "r0_above.json"))
        assert out["details"][0]["r0_closed_form"] == pytest.approx(1.5)

    def test_scalar_system(self):
        L = verify.scalar_system(-1.0, 2.0, tau=0.5)
        assert L.delays == (0.5,)
