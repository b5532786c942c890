"""Tests for subcommand helpers."""

import math

import pytest

from horocover.checks import verdict
from horocover.errors import ConfigError
from horocover.harness import ExperimentConfig
from horocover.harness.commands import (
    COMMANDS,
    STREAM_CLT,
    CommandResult,
    derived_seed,
    list_commands,
    load_sigma,
    sample_points,
    second_observable,
)
from horocover.twist import BaseBump, CoverObservable


@pytest.fixture
def config(config_text):
    return ExperimentConfig.from_text(config_text)


class TestHelpers:
    """Tests for shared subcommand helpers."""

    def test_registry(self):
        assert list_commands() == list(COMMANDS)
        assert {"validate-geometry", "estimate-sigma", "theorem-a", "ulam-spectrum"} <= set(list_commands())

    def test_sample_points(self, config):
        cover = config.cover()
        points = sample_points(config, cover)
        assert len(points) == config.points
        assert all(p.deck == (0,) for p in points)
        again = sample_points(config, cover)
        assert all(a.base.is_close(b.base, atol=0.0) for a, b in zip(points, again, strict=True))

    def test_derived_seed(self):
        assert derived_seed(5, STREAM_CLT, 0) == derived_seed(5, STREAM_CLT, 0)
        assert derived_seed(5, STREAM_CLT, 0) != derived_seed(5, STREAM_CLT, 1)
        assert derived_seed(5, STREAM_CLT, 0) >= 0

    def test_missing_sigma(self, config, tmp_path):
        with pytest.raises(ConfigError, match="run estimate-sigma first"):
            load_sigma(config, tmp_path / "theorem-a")

    def test_second_observable(self):
        wide = CoverObservable.single(BaseBump(0j, 0.5), 1)
        assert second_observable(wide).bump.fiber_width == math.pi / 2
        narrow = CoverObservable.single(BaseBump(0j, 0.5, fiber_width=1.0), 1)
        assert second_observable(narrow).bump.fiber_width == math.pi

    def test_failed_verdicts(self):
        result = CommandResult(
            verdicts=[verdict("a", True, "ok"), verdict("b", False, "bad"), verdict("c", True, "ok")]
        )
        assert [v.name for v in result.failed] == ["b"]
