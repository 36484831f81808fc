"""
Problem ingestion, the analysis pipeline and report and curve emission
"""

import json
import logging
import os
from dataclasses import dataclass, field

import numpy as np

from src.classes.common_classes import DEFAULT_TOLERANCES, Tolerances, ToleranceStore
from src.classes.custom_exceptions import DimensionMismatchError, IoError, ParseError, QuadSemiError
from src.classes.gaussian_calculus import GroundState, ground_state, sharpness_lower_bound
from src.classes.gaussian_integrals import BARGMANN_SIDE, GaussianFunction
from src.classes.normal_form import NormalForm, build_normal_form
from src.classes.oracle_numerics import corner_norm, decay_fit, discretize, semigroup_matrix
from src.classes.propagator_weights import (
    WeightFamily,
    alpha,
    alpha_curve,
    bergman_form,
    eikonal_residual,
    flow_graph_residual,
    fundamental_identity_residual,
    pullback_form,
    transport_residual,
    upper_bound_curve,
    weighted_norm_ratio,
)
from src.classes.singular_space import SingularSpaceReport, require_trivial, singular_space
from src.classes.spectral_analysis import (
    SpectrumLattice,
    eigenstructure,
    ground_energy,
    spectrum_lattice,
)
from src.classes.symplectic_core import (
    HamiltonStructure,
    QuadraticSymbol,
    hamilton_matrix,
    is_elliptic,
    make_symbol,
    sphere_minimum,
)
from src.helpers.consts import (
    ALPHA_CSV_HEADER,
    BOUNDS_CSV_HEADER,
    CATALOG_DIR,
    CATALOG_NAMES,
    CONFIG_FILENAME,
    LATTICE_CSV_HEADER,
    ORACLE_CSV_HEADER,
    SHARPNESS_CSV_HEADER,
)
from src.helpers.py_functions import (
    GridSettings,
    OracleSettings,
    ReportingSettings,
    format_number,
    read_grid_settings,
    read_oracle_settings,
    read_reporting_settings,
    write_json,
    write_results_to_csv,
)

ORACLE_CORNERS = ((1.0, 1.0), (1.0, np.inf), (2.0, 2.0), (2.0, np.inf), (np.inf, np.inf))
ORACLE_SAMPLES = 9
ORACLE_RATE_TOLERANCE = 0.02
PROBE_COUNT = 5


@dataclass(frozen=True)
class AppSettings:
    """
    Every setting the command line surface reads from config.ini
    """

    tolerances: Tolerances = DEFAULT_TOLERANCES
    grids: GridSettings = GridSettings()
    oracle: OracleSettings = OracleSettings()
    reporting: ReportingSettings = ReportingSettings()


def load_settings(config_dir: str = CONFIG_FILENAME) -> AppSettings:
    """
    Reads all sections of the config, tolerances scaled by QUADSEMI_TOL
    """
    return AppSettings(
        tolerances=ToleranceStore(config_dir).tolerances,
        grids=read_grid_settings(config_dir),
        oracle=read_oracle_settings(config_dir),
        reporting=read_reporting_settings(config_dir),
    )


@dataclass(frozen=True)
class ProblemFile:
    """
    Contents of a problem JSON file
    """

    name: str
    n: int
    Q_re: list
    Q_im: list
    parameters: dict = field(default_factory=dict)
    description: str = ""

    def coefficient_matrix(self) -> np.ndarray:
        """
        Q_re + i Q_im as a complex array
        """
        Q_re = np.asarray(self.Q_re, dtype=float)
        Q_im = np.asarray(self.Q_im, dtype=float)
        if Q_re.shape != Q_im.shape:
            logging.critical(f"Q_re has shape {Q_re.shape} but Q_im has shape {Q_im.shape}")
            raise DimensionMismatchError(
                "Q_re and Q_im must have the same shape", field="Q_im", shape=list(Q_im.shape)
            )
        return Q_re + 1j * Q_im

    def to_symbol(self, tolerances: Tolerances = DEFAULT_TOLERANCES) -> QuadraticSymbol:
        """
        Validated symbol, symmetrized on the way
        """
        return make_symbol(self.n, self.coefficient_matrix(), tolerances)

    def to_dict(self) -> dict:
        """
        JSON form, identical in layout to the files in the catalog
        """
        payload = {"name": self.name, "n": self.n, "Q_re": self.Q_re, "Q_im": self.Q_im}
        if self.description:
            payload["description"] = self.description
        if self.parameters:
            payload["parameters"] = self.parameters
        return payload


def catalog_path(name: str) -> str:
    """
    Path of a built-in problem file
    """
    return os.path.join(CATALOG_DIR, f"{name}.json")


def resolve_problem_path(path_or_name: str) -> str:
    """
    Accepts a file path or the name of a built-in problem
    """
    if not os.path.exists(path_or_name) and path_or_name in CATALOG_NAMES:
        return catalog_path(path_or_name)
    return path_or_name


def _matrix_field(payload: dict, key: str, path: str, n: int) -> list:
    """
    Reads one coefficient field as a real 2n x 2n matrix
    :param key: Q_re or Q_im
    :param n: Half dimension declared by the file
    """
    if key not in payload:
        logging.critical(f"Problem file {path} is missing field {key}")
        raise ParseError(f"Problem file {path} is missing field {key}", path=path, field=key)
    value = payload[key]
    try:
        matrix = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as err:
        logging.critical(f"Field {key} of {path} is not a numeric matrix")
        raise ParseError(f"Field {key} of {path} is not a numeric matrix", path=path, field=key) from err
    if matrix.ndim != 2:
        logging.critical(f"Field {key} of {path} is not a rectangular matrix")
        raise ParseError(f"Field {key} of {path} is not a rectangular matrix", path=path, field=key)
    if matrix.shape[0] != matrix.shape[1]:
        logging.critical(f"Field {key} of {path} is not square, got shape {matrix.shape}")
        raise ParseError(
            f"Field {key} of {path} is not square", path=path, field=key, shape=list(matrix.shape)
        )
    if matrix.shape != (2 * n, 2 * n):
        logging.critical(f"Field {key} of {path} has shape {matrix.shape}, expected {(2 * n, 2 * n)}")
        raise DimensionMismatchError(
            f"Field {key} of {path} must be {2 * n} x {2 * n}",
            path=path,
            field=key,
            shape=list(matrix.shape),
            expected=[2 * n, 2 * n],
        )
    return matrix.tolist()


def load_problem_file(path: str) -> ProblemFile:
    """
    Reads and shape-checks a problem file
    :param path: JSON file or catalog name
    """
    path = resolve_problem_path(path)
    try:
        with open(path, "r") as file_instance:
            payload = json.load(file_instance)
    except json.JSONDecodeError as err:
        logging.critical(f"Problem file {path} is not valid JSON: {err.msg}")
        raise ParseError(
            f"Problem file {path} is not valid JSON: {err.msg}", path=path, line=err.lineno, column=err.colno
        ) from err
    except OSError as err:
        logging.critical(f"Cannot read problem file {path}")
        raise ParseError(f"Cannot read problem file {path}", path=path) from err

    if not isinstance(payload, dict):
        logging.critical(f"Problem file {path} must hold a JSON object")
        raise ParseError(f"Problem file {path} must hold a JSON object", path=path)
    n = payload.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        logging.critical(f"Field n of {path} must be a positive integer")
        raise ParseError(f"Field n of {path} must be a positive integer", path=path, field="n")
    return ProblemFile(
        name=str(payload.get("name", os.path.splitext(os.path.basename(path))[0])),
        n=n,
        Q_re=_matrix_field(payload, "Q_re", path, n),
        Q_im=_matrix_field(payload, "Q_im", path, n),
        parameters=dict(payload.get("parameters", {})),
        description=str(payload.get("description", "")),
    )


def parse_problem(path: str, tolerances: Tolerances = DEFAULT_TOLERANCES) -> QuadraticSymbol:
    """
    :return: Validated symbol from a problem file
    """
    return load_problem_file(path).to_symbol(tolerances)


@dataclass(frozen=True)
class AnalyzeOptions:
    """
    Switches of the analyze command
    """

    structure_only: bool = False
    e_max: float = None
    seed: int = 0


@dataclass(eq=False)
class AnalysisReport:
    """
    Everything computed for one symbol plus the residual checks and written files
    """

    name: str
    symbol: QuadraticSymbol
    elliptic: bool
    sphere_min: float
    singular: SingularSpaceReport
    structure: HamiltonStructure = None
    rho: complex = None
    gamma: float = None
    lattice: SpectrumLattice = None
    normal_form: NormalForm = None
    family: WeightFamily = None
    state: GroundState = None
    checks: dict = field(default_factory=dict)
    curve_files: list = field(default_factory=list)

    @property
    def propagation_ready(self) -> bool:
        """
        True when the normal form and weight family exist
        """
        return self.family is not None

    @property
    def failed_checks(self) -> list:
        """
        Names of residual checks above their tolerance
        """
        return [name for name, (value, tolerance) in self.checks.items() if not value <= tolerance]

    @property
    def status(self) -> str:
        """
        PASSED, FAILED or STRUCTURE_ONLY
        """
        if self.failed_checks:
            return "FAILED"
        return "PASSED" if self.propagation_ready else "STRUCTURE_ONLY"

    def add_check(self, name: str, value: float, tolerance: float) -> None:
        """
        Records a residual and its tolerance, logging failures
        """
        self.checks[name] = (float(value), float(tolerance))
        if not value <= tolerance:
            logging.error(f"Check {name} failed: {value:.3e} > {tolerance:.3e}")

    def to_dict(self) -> dict:
        """
        JSON form of the report
        """
        payload = {
            "name": self.name,
            "status": self.status,
            "symbol": self.symbol.to_dict(),
            "elliptic": self.elliptic,
            "sphere_minimum": self.sphere_min,
            "singular_space": self.singular.to_dict(),
            "checks": {name: {"value": value, "tolerance": tol} for name, (value, tol) in self.checks.items()},
            "curve_files": list(self.curve_files),
        }
        if self.structure is not None and self.structure.is_filled:
            payload["eigenvalues"] = [[c.value.real, c.value.imag, c.multiplicity] for c in self.structure.clusters]
        if self.rho is not None:
            payload["rho"] = [self.rho.real, self.rho.imag]
            payload["gamma"] = self.gamma
        if self.lattice is not None:
            payload["lattice"] = {"e_max": self.lattice.e_max, "points": self.lattice.to_rows()}
        return payload

    def to_json(self) -> str:
        """
        Sorted, indented JSON text
        """
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def summary_text(self) -> str:
        """
        Human readable multi-line summary
        """
        lines = [
            f"problem: {self.name} (n={self.symbol.n})",
            f"status: {self.status}",
            f"elliptic: {self.elliptic} (min |q| on the unit sphere {self.sphere_min:.6g})",
            f"singular space: dim {self.singular.dim}, k0 {self.singular.to_dict()['k0']}, "
            f"partial dims {self.singular.partial_dims}",
        ]
        if self.structure is not None and self.structure.is_filled:
            spectrum = ", ".join(f"{c.value:.10g} (x{c.multiplicity})" for c in self.structure.clusters)
            lines.append(f"Spec(F): {spectrum}")
        if self.rho is not None:
            lines.append(f"rho: {self.rho:.12g}")
            lines.append(f"gamma: {self.gamma:.12g}")
        if self.lattice is not None:
            lines.append(f"spectrum up to Re <= {self.lattice.e_max:.6g}:")
            lines.append(",".join(LATTICE_CSV_HEADER))
            for row in self.lattice.to_rows():
                lines.append(",".join(format_number(value) for value in row))
        for name, (value, tolerance) in self.checks.items():
            verdict = "ok" if value <= tolerance else "FAILED"
            lines.append(f"check {name}: {value:.3e} (tolerance {tolerance:.1e}) {verdict}")
        return "\n".join(lines)


def _residual_checks(report: AnalysisReport, tolerances: Tolerances, grids: GridSettings, seed: int) -> None:
    """
    Records every structural and propagation residual of a finished analysis on the report
    :param seed: Seed for the random probe points and times
    """
    H = report.structure
    nf = report.normal_form
    tf = report.family
    rng = np.random.default_rng(seed)

    report.add_check("lagrangian", H.diagnostics["lagrangian_residual"], tolerances.structure * 100)
    report.add_check("positivity", max(-H.diagnostics["positivity_plus"], H.diagnostics["positivity_minus"]), 0.0)
    report.add_check("normal_form", nf.diagnostics["normal_form_residual"], tolerances.structure)
    report.add_check("symplectic", nf.diagnostics["symplectic_residual"], tolerances.structure * 100)
    report.add_check("egorov", nf.diagnostics["egorov_residual"], tolerances.structure * 100)
    report.add_check("isospectral", nf.diagnostics["isospectral_residual"], tolerances.cluster * 100)
    report.add_check("graph", nf.diagnostics["graph_residual"], tolerances.structure * 100)
    state_scale = np.linalg.norm(nf.symbol.Q) * (1 + np.linalg.norm(report.state.u0.A)) ** 2
    report.add_check("ground_state", report.state.residual, tolerances.structure * max(1.0, state_scale))

    n = nf.n
    eikonal = 0.0
    fundamental = 0.0
    bergman = 0.0
    norm_ratio = 0.0
    flow_graph = 0.0
    for t in rng.uniform(0.1, 2.0, PROBE_COUNT):
        z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        w = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        eikonal = max(eikonal, eikonal_residual(tf, z, w.conj(), t, tolerances))
        fundamental = max(fundamental, fundamental_identity_residual(tf, z, w, t))
        u = GaussianFunction(BARGMANN_SIDE, np.zeros((n, n)), w, 0j)
        bergman = max(bergman, bergman_form(tf, t, u, tolerances).coefficient_distance(pullback_form(tf, t, u)))
        expected = np.exp(report.gamma * t)
        norm_ratio = max(norm_ratio, abs(weighted_norm_ratio(tf, t, u, tolerances) - expected) / expected)
        flow_graph = max(flow_graph, flow_graph_residual(tf, t, seed=seed))
    report.add_check("eikonal", eikonal, tolerances.contraction)
    report.add_check("transport", max(transport_residual(tf, t) for t in (0.5, 1.0, 2.0)), tolerances.contraction)
    report.add_check("fundamental_estimate", fundamental, tolerances.gaussian)
    report.add_check("bergman_pullback", bergman, tolerances.gaussian * 10)
    report.add_check("weighted_norm_ratio", norm_ratio, tolerances.gaussian * 10)
    report.add_check("flow_graph", flow_graph, tolerances.contraction)

    curve = alpha_curve(tf, grids.default_grid(), tolerances)
    report.add_check("alpha_monotone", 0.0 if curve.is_monotone else 1.0, 0.0)
    report.add_check(
        "alpha_limit", abs(alpha(tf, curve.t_infinity, tolerances) - curve.alpha_infinity), tolerances.contraction
    )


def run_analyze(
    sym: QuadraticSymbol,
    options: AnalyzeOptions = AnalyzeOptions(),
    settings: AppSettings = AppSettings(),
    name: str = "problem",
) -> AnalysisReport:
    """
    Runs structure, spectrum, normal form and weight checks, stopping after the
    structure when the singular space is nontrivial and structure_only is set
    """
    tolerances = settings.tolerances
    logging.info(f"Analyzing {name}")
    H = hamilton_matrix(sym)
    report = AnalysisReport(
        name=name,
        symbol=sym,
        elliptic=is_elliptic(sym, tolerances),
        sphere_min=sphere_minimum(sym, seed=options.seed),
        singular=singular_space(H, tolerances),
        structure=H,
    )
    if not report.singular.is_trivial:
        if options.structure_only:
            logging.info("Singular space is nontrivial, skipping spectral and propagation sections")
            return report
        require_trivial(report.singular)

    report.structure = eigenstructure(H, tolerances)
    report.rho, report.gamma = ground_energy(report.structure)
    e_max = options.e_max if options.e_max is not None else settings.grids.e_max_factor * report.gamma
    report.lattice = spectrum_lattice(report.structure, e_max, settings.grids.max_lattice_points)
    if options.structure_only:
        return report

    report.normal_form = build_normal_form(report.structure, tolerances, seed=options.seed)
    report.family = WeightFamily(report.normal_form, tolerances)
    report.state = ground_state(report.structure, tolerances)
    _residual_checks(report, tolerances, settings.grids, options.seed)
    logging.info(f"Analysis of {name} finished with status {report.status}")
    return report


def _pq_label(p: float, q: float) -> str:
    """
    File name fragment for an exponent pair, for example 1_inf
    """

    def label(value: float) -> str:
        return "inf" if np.isinf(value) else format(value, "g")

    return f"{label(p)}_{label(q)}"


def _require_grid(t_grid) -> np.ndarray:
    """
    :return: The grid as a float array, refusing an empty one
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size == 0:
        logging.critical("Cannot emit curves on an empty time grid")
        raise IoError("Cannot emit curves on an empty time grid", reason="EmptyGrid")
    return t_grid


def _require_propagation(report: AnalysisReport) -> None:
    """
    Refuses reports that stopped before the normal form was built
    """
    if not report.propagation_ready:
        require_trivial(report.singular)
        raise QuadSemiError(f"Report for {report.name} was built with structure only")


def emit_curves(
    report: AnalysisReport,
    out_dir: str,
    pq_pairs,
    t_grid,
    settings: AppSettings = AppSettings(),
) -> list:
    """
    Writes alpha.csv and one bounds_<p>_<q>.csv per exponent pair
    :return: Paths written
    """
    t_grid = _require_grid(t_grid)
    _require_propagation(report)
    tolerances = settings.tolerances
    mode = settings.reporting.csv_mode
    curve = alpha_curve(report.family, t_grid, tolerances)
    files = [
        write_results_to_csv(os.path.join(out_dir, f"{report.name}_alpha.csv"), ALPHA_CSV_HEADER, curve.to_rows(), mode)
    ]
    for p, q in pq_pairs:
        bound = upper_bound_curve(
            report.family,
            report.gamma,
            report.singular.k0,
            p,
            q,
            t_grid,
            epsilon=settings.grids.large_time_epsilon,
            short_time_stop=settings.grids.short_time_stop,
            tolerances=tolerances,
        )
        lower = sharpness_lower_bound(report.normal_form, report.family, p, q, t_grid, report.state, tolerances)
        path = os.path.join(out_dir, f"{report.name}_bounds_{_pq_label(p, q)}.csv")
        files.append(write_results_to_csv(path, BOUNDS_CSV_HEADER, bound.to_rows(lower.values), mode))
    report.curve_files.extend(files)
    return files


def emit_report(report: AnalysisReport, out_dir: str) -> str:
    """
    Writes the JSON report next to the curves
    """
    return write_json(os.path.join(out_dir, f"{report.name}_report.json"), report.to_dict())


def verify_gaussian(
    report: AnalysisReport, out_dir: str, pq_pairs, t_grid, settings: AppSettings = AppSettings()
) -> tuple:
    """
    Compares the ground state lower bound with the upper envelope for each pair
    :return: (paths written, True when lower <= upper everywhere)
    """
    t_grid = _require_grid(t_grid)
    _require_propagation(report)
    tolerances = settings.tolerances
    files = []
    ordered = True
    for p, q in pq_pairs:
        bound = upper_bound_curve(
            report.family, report.gamma, report.singular.k0, p, q, t_grid, tolerances=tolerances
        )
        lower = sharpness_lower_bound(report.normal_form, report.family, p, q, t_grid, report.state, tolerances)
        ratio = lower.values / bound.envelope
        if np.any(lower.values > bound.envelope):
            logging.error(f"Lower bound exceeds the upper envelope for (p, q) = ({p}, {q})")
            ordered = False
        rows = list(zip(t_grid, lower.values, bound.envelope, ratio))
        path = os.path.join(out_dir, f"{report.name}_sharpness_{_pq_label(p, q)}.csv")
        files.append(write_results_to_csv(path, SHARPNESS_CSV_HEADER, rows, settings.reporting.csv_mode))
    report.add_check("lower_below_upper", 0.0 if ordered else 1.0, 0.0)
    report.curve_files.extend(files)
    return files, ordered


def verify_oracle(report: AnalysisReport, out_dir: str, settings: AppSettings = AppSettings()) -> tuple:
    """
    Corner norms of the discretized semigroup on the fit window, with the predicted
    envelope and the ground state lower bound at each sample
    :return: (path written, fitted (2, 2) decay slope)
    """
    _require_propagation(report)
    tolerances = settings.tolerances
    oracle = settings.oracle
    t_grid = np.linspace(oracle.fit_window_start, oracle.fit_window_stop, ORACLE_SAMPLES)
    disc = discretize(report.symbol, oracle.modes(report.symbol.n))
    kernels = [semigroup_matrix(disc, t) for t in t_grid]
    rows = []
    two_norms = []
    for p, q in ORACLE_CORNERS:
        bound = upper_bound_curve(
            report.family, report.gamma, report.singular.k0, p, q, t_grid, tolerances=tolerances
        )
        lower = sharpness_lower_bound(report.normal_form, report.family, p, q, t_grid, report.state, tolerances)
        for index, kernel in enumerate(kernels):
            norm = corner_norm(kernel, p, q)
            if (p, q) == (2.0, 2.0):
                two_norms.append(norm)
            rows.append((t_grid[index], _pq_label(p, q), norm, bound.envelope[index], lower.values[index]))
    slope = decay_fit(t_grid, two_norms, oracle.fit_window)
    logging.info(f"Oracle (2, 2) decay slope {slope:.6f}, expected {-report.gamma:.6f}")
    report.add_check("oracle_decay_rate", abs(slope + report.gamma) / report.gamma, ORACLE_RATE_TOLERANCE)
    path = write_results_to_csv(
        os.path.join(out_dir, f"{report.name}_oracle.csv"), ORACLE_CSV_HEADER, rows, settings.reporting.csv_mode
    )
    report.curve_files.append(path)
    return path, slope
