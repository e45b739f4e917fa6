import logging
import math
from concurrent.futures import ThreadPoolExecutor
from contextlib import ExitStack
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Iterable, TypeVar

from . import bcft, cft2d, gaussian_oracle, vertex_model
from .enums import BoundaryKind, CellStatus, CheckStatus
from .errors import ConfigError, FidelitySeriesError, OracleMismatchError
from .fidelity import extract_g, fidelity_series, stability
from .models import (
    FidelitySeries,
    GFactorEstimate,
    OracleCheck,
    RunConfig,
    VertexLattice,
    XxzPairDescriptor,
)
from .output import CsvSink, write_csv, write_json

logger = logging.getLogger(__name__)

ESTIMATE_COLUMNS = [
    "delta1", "delta2", "bc", "theta", "g", "ln_g", "stderr_ln_g",
    "f", "c1", "max_abs_residual", "l_min", "l_max",
]
POINT_COLUMNS = [
    "delta1", "delta2", "bc", "theta", "L",
    "fidelity", "energy1", "energy2", "residual1", "residual2",
]
BCFT_COLUMNS = ["delta1", "delta2", "lam1", "lam2", "g"]
MASSIVE_COLUMNS = ["delta2", "k", "g"]
SURFACE_COLUMNS = ["c", "c_prime", "g", "status"]
ORACLE_COLUMNS = ["check", "value", "expected", "abs_error", "tol", "status"]
GAUSSIAN_COLUMNS = ["lam1", "lam2", "L", "fidelity", "closed_form"]
VERTEX_COLUMNS = ["L1", "L2", "c", "c_prime", "fidelity"]

# reference point of the factorised instanton sum check
INSTANTON_CHECK_LAM = 0.08
INSTANTON_CHECK_ASPECT = 1.0
DUALITY_CHECK_EXPONENTS = [0.2, 0.5, 1.0, 3.0]
VERTEX_CHECK_WEIGHTS = (Fraction(4, 5), Fraction(6, 5))

T = TypeVar("T")
R = TypeVar("R")


def _ordered_map(func: Callable[[T], R], items: Iterable[T], workers: int) -> list[R]:
    """Maps over a bounded thread pool; results keep the order of `items`."""
    items = list(items)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(func, items))
    return [func(item) for item in items]


def _theta_for(bc: BoundaryKind, theta: float) -> float:
    return 0.0 if bc == BoundaryKind.PERIODIC else theta


def _check_critical(name: str, values: Iterable[float]) -> None:
    bad = [value for value in values if not -1.0 < value <= 1.0]
    if bad:
        raise ConfigError(f"{name} outside the critical region (-1, 1]: {bad}")


def _estimate_row(pair: XxzPairDescriptor, estimate: GFactorEstimate) -> list[Any]:
    return [
        pair.delta1,
        pair.delta2,
        pair.bc,
        pair.theta,
        estimate.g,
        estimate.ln_g,
        estimate.stderr_ln_g,
        estimate.f,
        estimate.c1,
        estimate.max_abs_residual,
        estimate.l_min,
        estimate.l_max,
    ]


def _point_rows(series: FidelitySeries) -> list[list[Any]]:
    pair = series.descriptor
    return [
        [
            pair.delta1,
            pair.delta2,
            pair.bc,
            pair.theta,
            point.size,
            point.fidelity,
            point.energy1,
            point.energy2,
            point.residual1,
            point.residual2,
        ]
        for point in series.points
    ]


def _run_series(
    config: RunConfig,
    pair: XxzPairDescriptor,
    sizes: list[int],
    points_sink: CsvSink,
) -> GFactorEstimate:
    try:
        series = fidelity_series(
            pair,
            sizes,
            tol=config.tol,
            max_iter=config.max_iter,
            seed=config.seed,
            workers=config.workers,
        )
    except FidelitySeriesError as e:
        if e.partial is not None:
            points_sink.write_all(_point_rows(e.partial))
        raise
    points_sink.write_all(_point_rows(series))
    return extract_g(series)


def run_fig1(config: RunConfig) -> list[Path]:
    """g versus delta2 at fixed delta1: ED, BCFT, toroidal and the massive inset."""
    _check_critical("delta1", [config.delta1])
    _check_critical("delta2_grid", config.delta2_grid)
    _check_critical("massive_delta2_grid", config.massive_delta2_grid)

    out = Path(config.out_dir)
    digest = config.digest()
    sizes = config.effective_sizes()
    toroidal_sizes = config.effective_sizes(config.toroidal_sizes)
    theta = _theta_for(config.bc, config.theta)

    lam1 = bcft.lambda_of_delta(config.delta1).lam
    bcft_rows = [
        [config.delta1, delta2, lam1, bcft.lambda_of_delta(delta2).lam, g]
        for delta2, g in bcft.g_curve(config.delta1, config.delta2_grid)
    ]
    massive_bcft_rows = [list(row) for row in bcft.g_massive_curve(config.massive_delta2_grid)]
    written = [
        write_csv(out / "fig1_bcft.csv", "fig1", digest, BCFT_COLUMNS, bcft_rows),
        write_csv(
            out / "fig1_massive_bcft.csv", "fig1", digest, MASSIVE_COLUMNS, massive_bcft_rows
        ),
    ]

    paths = {
        name: out / f"{name}.csv"
        for name in ("fig1_points", "fig1_ed", "fig1_toroidal", "fig1_massive_ed")
    }
    with ExitStack() as stack:
        points = stack.enter_context(
            CsvSink(paths["fig1_points"], "fig1", digest, POINT_COLUMNS)
        )
        ed = stack.enter_context(CsvSink(paths["fig1_ed"], "fig1", digest, ESTIMATE_COLUMNS))
        toroidal = stack.enter_context(
            CsvSink(paths["fig1_toroidal"], "fig1", digest, ESTIMATE_COLUMNS)
        )
        massive = stack.enter_context(
            CsvSink(paths["fig1_massive_ed"], "fig1", digest, MASSIVE_COLUMNS)
        )

        for delta2 in config.delta2_grid:
            pair = XxzPairDescriptor(
                delta1=config.delta1, delta2=delta2, bc=config.bc, theta=theta
            )
            ed.write(_estimate_row(pair, _run_series(config, pair, sizes, points)))

        for delta2 in config.delta2_grid:
            pair = XxzPairDescriptor(
                delta1=config.delta1,
                delta2=delta2,
                bc=BoundaryKind.TOROIDAL,
                theta=config.theta,
            )
            toroidal.write(
                _estimate_row(pair, _run_series(config, pair, toroidal_sizes, points))
            )

        for delta2 in config.massive_delta2_grid:
            pair = XxzPairDescriptor(delta1=config.massive_delta1, delta2=delta2)
            estimate = _run_series(config, pair, sizes, points)
            massive.write([delta2, bcft.lambda_of_delta(delta2).k, estimate.g])

    written.extend(paths.values())
    logger.info("fig1 done: %d files in %s", len(written), out)
    return written


def _surface_cell(cell: tuple[float, float, float]) -> list[Any]:
    c, c_prime, aspect = cell
    try:
        return [c, c_prime, cft2d.g_eight_vertex(c, c_prime, aspect), CellStatus.OK]
    except ValueError as e:
        logger.warning("Skipping (c, c')=(%g, %g): %s", c, c_prime, e)
        return [c, c_prime, None, CellStatus.OUTSIDE_REGION]


def run_fig2(config: RunConfig) -> list[Path]:
    """Torus g-factor of the quantum eight-vertex model over the (c, c') grid."""
    cells = [(c, c_prime, config.aspect) for c in config.c_grid for c_prime in config.c_grid]
    rows = _ordered_map(_surface_cell, cells, config.workers)
    path = write_csv(
        Path(config.out_dir) / "fig2_surface.csv",
        "fig2",
        config.digest(),
        SURFACE_COLUMNS,
        rows,
    )
    return [path]


def _check(name: str, value: float, expected: float, tol: float) -> OracleCheck:
    error = abs(value - expected)
    status = CheckStatus.PASS if error <= tol else CheckStatus.FAIL
    if status == CheckStatus.FAIL:
        logger.warning("Oracle check %s failed: |%.17g - %.17g| > %g", name, value, expected, tol)
    return OracleCheck(
        name=name, value=value, expected=expected, abs_error=error, tol=tol, status=status
    )


def _gaussian_checks(config: RunConfig) -> tuple[list[OracleCheck], list[list[Any]]]:
    checks: list[OracleCheck] = []
    rows: list[list[Any]] = []
    tol = config.oracle_tol

    for lam1, lam2 in config.gaussian_pairs:
        label = f"{lam1:g}:{lam2:g}"
        series = gaussian_oracle.gaussian_series(lam1, lam2, config.gaussian_sizes)
        for size, fidelity in zip(series.sizes, series.fidelities):
            closed_form = gaussian_oracle.mode_product_overlap(lam1, lam2, size)
            rows.append([lam1, lam2, size, fidelity, closed_form])
            checks.append(
                _check(f"gaussian_overlap[{label},L={size}]", fidelity, closed_form, tol)
            )

        estimate = extract_g(series)
        expected = bcft.g_critical(lam1, lam2)
        checks.append(_check(f"gaussian_ln_g[{label}]", estimate.ln_g, math.log(expected), tol))
        checks.append(_check(f"gaussian_f[{label}]", estimate.f, math.log(expected), tol))

        lam_n, lam_d = bcft.fold(lam1, lam2)
        folded = bcft.g_neumann(lam_n) * bcft.g_dirichlet(lam_d)
        checks.append(_check(f"folding[{label}]", folded, expected, tol))

    return checks, rows


def _instanton_checks(config: RunConfig) -> list[OracleCheck]:
    tol = config.oracle_tol
    q = cft2d.nome(INSTANTON_CHECK_ASPECT)
    checks = [
        _check(
            f"instanton_factorised[lam={INSTANTON_CHECK_LAM:g}]",
            cft2d.instanton_sum(INSTANTON_CHECK_LAM, q),
            cft2d.instanton_double_sum(INSTANTON_CHECK_LAM, q),
            tol,
        )
    ]
    for t in DUALITY_CHECK_EXPONENTS:
        direct = cft2d.theta_sum(t)
        dual = math.sqrt(math.pi / t) * cft2d.theta_sum(math.pi**2 / t)
        checks.append(_check(f"theta_duality[t={t:g}]", direct, dual, tol))
    return checks


def _vertex_checks(config: RunConfig) -> list[OracleCheck]:
    checks = []
    c, c_prime = VERTEX_CHECK_WEIGHTS
    for l1, l2 in config.vertex_sizes:
        lattice = VertexLattice(l1=l1, l2=l2)
        name = f"vertex_enumeration[{l1}x{l2}]"
        if l1 * l2 > vertex_model.MAX_ENUMERATION_SITES:
            checks.append(
                OracleCheck(
                    name=name,
                    value=math.nan,
                    expected=0.0,
                    abs_error=math.nan,
                    tol=0.0,
                    status=CheckStatus.SKIPPED,
                )
            )
            continue

        transfer = vertex_model.z2d_polynomial(lattice)
        counted = vertex_model.enumerate_c_counts(lattice)
        width = max(len(transfer), len(counted))
        transfer += [0] * (width - len(transfer))
        counted += [0] * (width - len(counted))
        mismatch = sum(abs(a - b) for a, b in zip(transfer, counted))
        # integer coefficients must agree exactly
        checks.append(_check(name, float(mismatch), 0.0, 0.0))

        exact = float(vertex_model.fidelity_squared_exact(lattice, c, c_prime))
        approximate = vertex_model.lattice_fidelity(lattice, float(c), float(c_prime)) ** 2
        checks.append(
            _check(f"vertex_fidelity[{l1}x{l2}]", approximate, exact, config.oracle_tol)
        )
    return checks


def run_oracle(config: RunConfig) -> list[OracleCheck]:
    """Runs the Gaussian, theta-series and six-vertex checks and writes the report.

    Raises OracleMismatchError after writing when any check fails.
    """
    out = Path(config.out_dir)
    digest = config.digest()

    gaussian, gaussian_rows = _gaussian_checks(config)
    checks = gaussian + _instanton_checks(config) + _vertex_checks(config)

    write_csv(out / "gaussian_series.csv", "oracle", digest, GAUSSIAN_COLUMNS, gaussian_rows)
    write_csv(
        out / "oracle_report.csv",
        "oracle",
        digest,
        ORACLE_COLUMNS,
        (
            [check.name, check.value, check.expected, check.abs_error, check.tol, check.status]
            for check in checks
        ),
    )

    failed = [check.name for check in checks if check.status == CheckStatus.FAIL]
    logger.info("Oracle: %d checks, %d failed", len(checks), len(failed))
    if failed:
        raise OracleMismatchError(failed)
    return checks


def run_sweep(config: RunConfig, delta2: float) -> tuple[GFactorEstimate, Path]:
    """One series at (config.delta1, delta2) with fit and stability report."""
    out = Path(config.out_dir)
    theta = _theta_for(config.bc, config.theta)
    pair = XxzPairDescriptor(delta1=config.delta1, delta2=delta2, bc=config.bc, theta=theta)
    sizes = config.effective_sizes(
        config.toroidal_sizes if config.bc == BoundaryKind.TOROIDAL else None
    )

    with CsvSink(out / "sweep_points.csv", "sweep", config.digest(), POINT_COLUMNS) as points:
        try:
            series = fidelity_series(
                pair,
                sizes,
                tol=config.tol,
                max_iter=config.max_iter,
                seed=config.seed,
                workers=config.workers,
            )
        except FidelitySeriesError as e:
            if e.partial is not None:
                points.write_all(_point_rows(e.partial))
            raise
        points.write_all(_point_rows(series))

    estimate = extract_g(series)
    payload: dict[str, Any] = {
        "config_digest": config.digest(),
        "descriptor": pair.model_dump(mode="json"),
        "estimate": estimate.model_dump(mode="json"),
    }
    if len(series.points) > 4:
        payload["stability"] = stability(series).model_dump(mode="json")
    else:
        logger.warning("Stability report needs at least 5 sizes, got %d", len(series.points))

    path = write_json(out / "sweep_fit.json", payload)
    return estimate, path


def run_vertex_exact(config: RunConfig, c: float, c_prime: float) -> list[list[Any]]:
    """Exact torus fidelity of the six-vertex states at every configured lattice size."""
    rows = []
    for l1, l2 in config.vertex_sizes:
        lattice = VertexLattice(l1=l1, l2=l2)
        rows.append([l1, l2, c, c_prime, vertex_model.lattice_fidelity(lattice, c, c_prime)])
    write_csv(
        Path(config.out_dir) / "vertex_exact.csv",
        "vertex-exact",
        config.digest(),
        VERTEX_COLUMNS,
        rows,
    )
    return rows
