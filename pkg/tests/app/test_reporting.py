# pylint: disable=missing-function-docstring, missing-module-docstring
import csv
import json
import logging
import os

import numpy as np
from pytest import LogCaptureFixture, approx, mark, raises

from src.app.reporting import (
    AnalyzeOptions,
    AppSettings,
    ProblemFile,
    emit_curves,
    emit_report,
    load_problem_file,
    load_settings,
    parse_problem,
    resolve_problem_path,
    run_analyze,
    verify_gaussian,
)
from src.classes.custom_exceptions import DimensionMismatchError, IoError, ParseError, SingularSpaceNontrivialError
from src.classes.symplectic_core import davies_symbol, harmonic_symbol, heat_symbol, kfp_symbol
from src.helpers.consts import ALPHA_CSV_HEADER, BOUNDS_CSV_HEADER
from tests.config.consts import CATALOG_FILES, DAVIES_GAMMA, FAKE, KFP_Q_IM, KFP_Q_RE, TEST_CONFIG


def read_csv(path: str) -> list:
    with open(path, encoding="utf-8") as file_handle:
        return list(csv.reader(file_handle))


class TestProblemFiles:
    """Test class for problem file ingestion"""

    @mark.parametrize("name, path", list(CATALOG_FILES.items()))
    def test_passes_catalog_files_parse(self, name: str, path: str):
        problem = load_problem_file(path)

        assert problem.name == name
        assert load_problem_file(name).to_dict() == problem.to_dict()

    def test_passes_kfp_coefficients(self):
        sym = parse_problem(CATALOG_FILES["kfp"])

        assert np.allclose(sym.Q, KFP_Q_RE + 1j * KFP_Q_IM)
        assert np.allclose(sym.Q, kfp_symbol().Q)

    def test_passes_existing_path_wins_over_catalog_name(self, tmp_path):
        path = tmp_path / "harmonic"
        path.write_text("{}")

        assert resolve_problem_path(str(path)) == str(path)

    def test_fails_malformed_json(self, tmp_path, caplog: LogCaptureFixture):
        caplog.set_level(logging.CRITICAL)
        path = tmp_path / "broken.json"
        path.write_text('{"n": 1,\n "Q_re": [[1, 0]')

        with raises(ParseError) as err:
            load_problem_file(str(path))

        assert err.value.context["line"] == 2
        assert "is not valid JSON" in caplog.text

    def test_fails_missing_file(self, caplog: LogCaptureFixture):
        caplog.set_level(logging.CRITICAL)

        with raises(ParseError):
            load_problem_file(f"{FAKE.pystr()}.json")

        assert "Cannot read problem file" in caplog.text

    @mark.parametrize(
        "payload, key",
        [
            ({"n": "1", "Q_re": [[1]], "Q_im": [[0]]}, "n"),
            ({"n": 1, "Q_im": [[0, 0], [0, 0]]}, "Q_re"),
            ({"n": 1, "Q_re": [[1, 0], [0, 1]], "Q_im": [0, 0]}, "Q_im"),
            ({"n": 1, "Q_re": [[1, 0], [0, 1]], "Q_im": [["a", 0], [0, 0]]}, "Q_im"),
        ],
    )
    def test_fails_bad_fields(self, payload: dict, key: str, tmp_path, caplog: LogCaptureFixture):
        caplog.set_level(logging.CRITICAL)
        path = tmp_path / "problem.json"
        path.write_text(json.dumps(payload))

        with raises(ParseError) as err:
            load_problem_file(str(path))

        assert err.value.context["field"] == key
        assert err.value.exit_code == 4

    @mark.parametrize(
        "payload, key",
        [
            ({"n": 1, "Q_re": [[1, 0], [0, 1]], "Q_im": [[0.5]]}, "Q_im"),
            ({"n": 1, "Q_re": [[1, 0], [0, 1]], "Q_im": [[0, 0, 0], [0, 0, 0], [0, 0, 0]]}, "Q_im"),
            ({"n": 2, "Q_re": [[1, 0], [0, 1]], "Q_im": [[0, 0], [0, 0]]}, "Q_re"),
        ],
    )
    def test_fails_wrong_matrix_size(self, payload: dict, key: str, tmp_path, caplog: LogCaptureFixture):
        caplog.set_level(logging.CRITICAL)
        path = tmp_path / "problem.json"
        path.write_text(json.dumps(payload))

        with raises(DimensionMismatchError) as err:
            load_problem_file(str(path))

        assert err.value.context["field"] == key
        assert err.value.context["expected"] == [2 * payload["n"], 2 * payload["n"]]
        assert err.value.exit_code == 2
        assert f"Field {key} of" in caplog.text

    def test_fails_non_square_matrix(self, tmp_path, caplog: LogCaptureFixture):
        caplog.set_level(logging.CRITICAL)
        path = tmp_path / "problem.json"
        path.write_text(json.dumps({"n": 1, "Q_re": [[1, 0, 0], [0, 1, 0]], "Q_im": [[0, 0], [0, 0]]}))

        with raises(ParseError) as err:
            load_problem_file(str(path))

        assert err.value.context["field"] == "Q_re"
        assert err.value.context["shape"] == [2, 3]
        assert "is not square" in caplog.text

    def test_fails_mismatched_parts_built_in_code(self, caplog: LogCaptureFixture):
        caplog.set_level(logging.CRITICAL)
        problem = ProblemFile(name=FAKE.pystr(), n=1, Q_re=[[1, 0], [0, 1]], Q_im=[[0.5]])

        with raises(DimensionMismatchError):
            problem.to_symbol()

        assert "Q_re has shape (2, 2) but Q_im has shape (1, 1)" in caplog.text


class TestRunAnalyze:
    """Test class for the analysis pipeline"""

    def test_passes_settings_from_config(self):
        settings = load_settings(TEST_CONFIG)

        assert settings.oracle.modes_1d == 128
        assert settings.grids.e_max_factor == 10.0

    def test_passes_harmonic(self, caplog: LogCaptureFixture):
        caplog.set_level(logging.INFO)

        report = run_analyze(harmonic_symbol(), name="harmonic")

        assert report.status == "PASSED"
        assert report.singular.k0 == 0
        assert report.rho == approx(1.0)
        assert report.gamma == approx(1.0)
        assert report.elliptic
        assert "Analysis of harmonic finished with status PASSED" in caplog.text

    def test_passes_davies(self):
        report = run_analyze(davies_symbol(), name="davies")

        assert report.status == "PASSED"
        assert report.gamma == approx(DAVIES_GAMMA)
        assert report.singular.k0 == 1
        assert report.to_dict()["singular_space"]["k0"] == 1

    @mark.parametrize("builder", [harmonic_symbol, davies_symbol, kfp_symbol])
    def test_passes_propagation_identities_are_checked(self, builder):
        report = run_analyze(builder(), name=builder.__name__)

        for name in ("bergman_pullback", "weighted_norm_ratio", "flow_graph", "alpha_limit"):
            value, tolerance = report.checks[name]
            assert value <= tolerance
        assert report.status == "PASSED"
        assert "check weighted_norm_ratio" in report.summary_text()

    def test_passes_structure_only_stops_early(self):
        report = run_analyze(heat_symbol(), AnalyzeOptions(structure_only=True), name="heat")

        assert report.status == "STRUCTURE_ONLY"
        assert report.lattice is None
        assert report.to_dict()["singular_space"]["k0"] == "undefined"
        assert "status: STRUCTURE_ONLY" in report.summary_text()

    def test_passes_structure_only_lists_lattice(self):
        report = run_analyze(harmonic_symbol(), AnalyzeOptions(structure_only=True, e_max=5.0))

        assert report.status == "STRUCTURE_ONLY"
        assert np.allclose(report.lattice.points, [1, 3, 5])
        assert report.to_dict()["lattice"]["e_max"] == 5.0

    def test_fails_heat_without_structure_only(self, caplog: LogCaptureFixture):
        caplog.set_level(logging.CRITICAL)

        with raises(SingularSpaceNontrivialError) as err:
            run_analyze(heat_symbol(), name="heat")

        assert err.value.exit_code == 2

    def test_passes_failed_check_changes_status(self):
        report = run_analyze(harmonic_symbol(), AnalyzeOptions(structure_only=True))

        report.add_check("made_up", 1.0, 0.5)

        assert report.failed_checks == ["made_up"]
        assert report.status == "FAILED"


class TestEmission:
    """Test class for curve and report files"""

    def test_passes_curves_have_headers(self, tmp_path):
        report = run_analyze(davies_symbol(), name="davies")
        t_grid = np.linspace(0.1, 2.0, 5)

        files = emit_curves(report, str(tmp_path), [(2.0, 2.0), (1.0, np.inf)], t_grid)

        assert [os.path.basename(path) for path in files] == [
            "davies_alpha.csv",
            "davies_bounds_2_2.csv",
            "davies_bounds_1_inf.csv",
        ]
        assert read_csv(files[0])[0] == list(ALPHA_CSV_HEADER)
        bounds = read_csv(files[1])
        assert bounds[0] == list(BOUNDS_CSV_HEADER)
        assert len(bounds) == 6
        for row in bounds[1:]:
            assert float(row[4]) <= float(row[2])

    def test_passes_curves_are_deterministic(self, tmp_path):
        t_grid = np.linspace(0.1, 2.0, 5)
        first = emit_curves(run_analyze(harmonic_symbol(), name="harmonic"), str(tmp_path / "a"), [(2.0, 2.0)], t_grid)
        second = emit_curves(run_analyze(harmonic_symbol(), name="harmonic"), str(tmp_path / "b"), [(2.0, 2.0)], t_grid)

        for left, right in zip(first, second):
            assert read_csv(left) == read_csv(right)

    def test_passes_report_json(self, tmp_path):
        report = run_analyze(harmonic_symbol(), name="harmonic")

        path = emit_report(report, str(tmp_path))

        with open(path, encoding="utf-8") as file_handle:
            payload = json.load(file_handle)
        assert payload["status"] == "PASSED"
        assert payload["gamma"] == approx(1.0)
        assert os.path.basename(path) == "harmonic_report.json"

    def test_passes_verify_gaussian_is_ordered(self, tmp_path):
        report = run_analyze(kfp_symbol(), name="kfp")

        files, ordered = verify_gaussian(report, str(tmp_path), [(2.0, 2.0), (2.0, np.inf)], np.linspace(0.2, 3.0, 5))

        assert ordered
        assert len(files) == 2
        assert report.checks["lower_below_upper"] == (0.0, 0.0)

    def test_fails_empty_grid(self, tmp_path, caplog: LogCaptureFixture):
        caplog.set_level(logging.CRITICAL)
        report = run_analyze(harmonic_symbol(), name="harmonic")

        with raises(IoError) as err:
            emit_curves(report, str(tmp_path), [(2.0, 2.0)], [])

        assert err.value.context["reason"] == "EmptyGrid"
        assert "empty time grid" in caplog.text

    def test_fails_curves_without_propagation(self, tmp_path, caplog: LogCaptureFixture):
        caplog.set_level(logging.CRITICAL)
        report = run_analyze(heat_symbol(), AnalyzeOptions(structure_only=True), AppSettings(), name="heat")

        with raises(SingularSpaceNontrivialError):
            emit_curves(report, str(tmp_path), [(2.0, 2.0)], [1.0])
