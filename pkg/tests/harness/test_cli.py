"""End-to-end tests for the command line."""

import pytest

from horocover.harness import read_manifest, read_table, write_table
from horocover.harness.cli import EXIT_INVALID, EXIT_OK, main, run
from horocover.spectral import CovarianceMatrix

pytestmark = pytest.mark.integration


@pytest.fixture
def results(config_file):
    return config_file.parent / "results"


def write_sigma(results, matrix=((1.0,),)):
    write_table(CovarianceMatrix([list(row) for row in matrix], 1000, 20.0).to_frame(), results / "estimate-sigma" / "sigma.csv")


class TestRun:
    """Tests for single subcommand runs."""

    def test_validate_geometry(self, config_file, results):
        assert run("validate-geometry", config_file) == EXIT_OK
        directory = results / "validate-geometry"
        assert len(read_table(directory / "generators.csv")) == 8
        checks = read_table(directory / "checks.csv")
        assert list(checks.columns) == ["check", "passed", "severity", "message"]
        assert checks["passed"].all()
        manifest = read_manifest(directory / "manifest.txt")
        assert manifest["subcommand"] == "validate-geometry"
        assert manifest["seed"] == "5"
        assert manifest["threads"] == "1"

    def test_winding_orbit(self, config_file, results):
        assert run("winding-orbit", config_file) == EXIT_OK
        orbit = read_table(results / "winding-orbit" / "orbit.csv")
        assert len(orbit) == 11
        assert list(orbit["t"])[-1] == 10.0

    def test_out_overrides_config(self, config_file, tmp_path):
        assert run("winding-orbit", config_file, out=tmp_path / "elsewhere") == EXIT_OK
        assert (tmp_path / "elsewhere" / "winding-orbit" / "orbit.csv").is_file()

    def test_rerun_is_byte_identical(self, config_file, results, tmp_path):
        assert run("winding-orbit", config_file) == EXIT_OK
        assert run("winding-orbit", config_file, out=tmp_path / "again", threads=2) == EXIT_OK
        first = (results / "winding-orbit" / "orbit.csv").read_bytes()
        assert (tmp_path / "again" / "winding-orbit" / "orbit.csv").read_bytes() == first

    def test_unknown_subcommand(self, config_file):
        assert run("theorem-d", config_file) == EXIT_INVALID

    def test_missing_config(self, tmp_path):
        assert run("validate-geometry", tmp_path / "absent.conf") == EXIT_INVALID

    def test_missing_sigma(self, config_file):
        assert run("clt-test", config_file) == EXIT_INVALID

    def test_config_hash_mismatch(self, config_file, config_text, results):
        assert run("winding-orbit", config_file) == EXIT_OK
        changed = config_file.with_name("changed.conf")
        changed.write_text(config_text.replace("seed = 5", "seed = 6") + f"output = {results}\n")
        assert run("winding-orbit", changed) == EXIT_INVALID

    def test_theorems_reject_variable_curvature(self, config_file, config_text, results):
        sampler = config_file.with_name("sampler.conf")
        sampler.write_text(config_text + "curvature = sinusoidal\n" + f"output = {results}\n")
        write_sigma(results)
        assert run("theorem-c", sampler) == EXIT_INVALID

    def test_invalid_threads(self, config_file):
        assert run("winding-orbit", config_file, threads=0) == EXIT_INVALID

    @pytest.mark.slow
    def test_reconstruct_check(self, config_file, results):
        assert run("reconstruct-check", config_file) == EXIT_OK
        table = read_table(results / "reconstruct-check" / "reconstruction.csv")
        assert len(table) == 2

    @pytest.mark.slow
    def test_estimate_sigma_then_clt(self, config_file, results):
        run("estimate-sigma", config_file)
        sigma = CovarianceMatrix.from_frame(read_table(results / "estimate-sigma" / "sigma.csv"))
        assert sigma.dimension == 1
        assert sigma.matrix[0, 0] > 0
        assert run("clt-test", config_file) in (EXIT_OK, EXIT_INVALID)
        assert len(read_table(results / "clt-test" / "clt.csv")) == 2


class TestMain:
    """Tests for argument parsing."""

    def test_main(self, config_file):
        assert main(["winding-orbit", "--config", str(config_file), "-v"]) == EXIT_OK

    def test_bad_subcommand_exits(self, config_file):
        with pytest.raises(SystemExit) as excinfo:
            main(["theorem-d", "--config", str(config_file)])
        assert excinfo.value.code == 2

    def test_config_required(self):
        with pytest.raises(SystemExit):
            main(["winding-orbit"])
