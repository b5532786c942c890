"""Tests for CSV tables and manifests."""

import pandas as pd
import pytest

from horocover.errors import ConfigError
from horocover.harness import check_resume, manifest_entries, read_manifest, read_table, write_manifest, write_table


class TestTables:
    """Tests for CSV output."""

    def test_full_precision(self, tmp_path):
        path = write_table(pd.DataFrame({"x": [0.1, 1 / 3], "n": [1, 2]}), tmp_path / "sub" / "t.csv")
        lines = path.read_text().splitlines()
        assert lines[0] == "x,n"
        assert lines[1] == "0.10000000000000001,1"
        pd.testing.assert_frame_equal(read_table(path), pd.DataFrame({"x": [0.1, 1 / 3], "n": [1, 2]}))

    def test_byte_identical_rewrites(self, tmp_path):
        table = pd.DataFrame({"x": [1e-300, 2.5e10]})
        first = write_table(table, tmp_path / "a.csv").read_bytes()
        assert write_table(table, tmp_path / "b.csv").read_bytes() == first


class TestManifest:
    """Tests for manifests and resume checks."""

    def test_round_trip_keeps_order(self, tmp_path):
        path = write_manifest(tmp_path / "manifest.txt", {"b": 1, "a": "x = y"})
        assert list(read_manifest(path)) == ["b", "a"]
        assert read_manifest(path)["a"] == "x = y"

    def test_entries(self):
        entries = manifest_entries("winding-orbit", "abc", 7, 1.23456, {"threads": 2})
        assert list(entries)[:4] == ["subcommand", "config_hash", "seed", "csv_schema"]
        assert entries["wall_time"] == "1.235"
        assert entries["threads"] == 2
        assert "version_numpy" in entries

    def test_resume(self, tmp_path):
        check_resume(tmp_path / "fresh", "abc")
        write_manifest(tmp_path / "manifest.txt", {"config_hash": "abc"})
        check_resume(tmp_path, "abc")
        with pytest.raises(ConfigError, match="written by config"):
            check_resume(tmp_path, "def")
