"""Tests for realization and pipeline configuration."""
import pytest
import voluptuous as vol

from custom_components.hetnet_realize.cli import build_parser
from custom_components.hetnet_realize.common.config import PipelineConfig
from custom_components.hetnet_realize.common.config import RealizationConfig
from custom_components.hetnet_realize.const import DEFAULT_EPS
from custom_components.hetnet_realize.const import DEFAULT_MAX_PAGES
from custom_components.hetnet_realize.const import MODE_ALMOST_COMPLETE


def test_defaults_round_trip():
    cfg = RealizationConfig.from_dict()
    assert cfg == RealizationConfig()
    assert RealizationConfig.from_dict(cfg.as_dict()) == cfg
    assert cfg.eps == DEFAULT_EPS


def test_step_defaults_to_spacing_fraction():
    cfg = RealizationConfig.from_dict({"spacing": 2.0})
    assert cfg.step == pytest.approx(2e-3)
    assert cfg.with_overrides(rk_step=0.01).step == 0.01


def test_values_are_coerced():
    cfg = RealizationConfig.from_dict({"eps": "0.22", "pair_alphas": [-3, -1]})
    assert cfg.eps == 0.22
    assert cfg.pair_alphas == (-3.0, -1.0)


@pytest.mark.parametrize(
    "overrides",
    [
        {"kappa": 0.3},
        {"eps": 0.3},
        {"tube_radius": 0.2},
        {"spacing": -1.0},
        {"pair_alphas": [-1.0]},
        {"basin_rays": 4},
        {"unknown": 1},
    ],
)
def test_invalid_overrides(overrides):
    with pytest.raises(vol.Invalid):
        RealizationConfig.from_dict(overrides)


def test_pipeline_seed_reaches_realization():
    cfg = PipelineConfig.from_dict({"input": "net.json", "seed": 7, "mode": MODE_ALMOST_COMPLETE})
    assert cfg.realization.seed == 7
    assert cfg.mode == MODE_ALMOST_COMPLETE


def test_pipeline_rejects_unknown_solver():
    with pytest.raises(vol.Invalid):
        PipelineConfig.from_dict({"input": "net.json", "solver": "annealing"})


def test_page_limit_defaults_to_solver_bound():
    assert PipelineConfig.from_dict({"input": "figure2"}).pages_max == DEFAULT_MAX_PAGES
    assert PipelineConfig(input="figure2").pages_max == DEFAULT_MAX_PAGES
    args = build_parser().parse_args(["embed", "--generator", "figure2"])
    assert args.pages_max == DEFAULT_MAX_PAGES
