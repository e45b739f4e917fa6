import argparse
import logging
import sys
from pathlib import Path
from typing import Any

from rich import box
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

from . import bcft, cft2d, core
from .config import load_config
from .enums import BoundaryKind, CheckStatus, ExitCode
from .errors import GFactorError
from .models import GFactorEstimate, OracleCheck, RunConfig

console = Console()
error_console = Console(stderr=True)

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value run config (default: user or project run.conf)")
    common.add_argument("--out", dest="out_dir", help="Output directory for result files")
    common.add_argument("--lmax", type=int, help="Largest chain length to diagonalise")
    common.add_argument("--workers", type=int, help="Worker threads for independent solves")
    common.add_argument("--seed", type=int, help="Seed of the Lanczos start vectors")
    common.add_argument("--tol", type=float, help="Lanczos residual tolerance")
    common.add_argument("-v", "--verbose", action="store_true", help="Debug logging")

    parser = argparse.ArgumentParser(
        prog="gfid",
        description="Universal g-factor in ground-state fidelities: ED, BCFT and oracles.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser("fig1", parents=[common], help="XXZ g versus delta2 with BCFT curves")
    commands.add_parser("fig2", parents=[common], help="Eight-vertex torus g over the (c, c') grid")
    commands.add_parser("oracle", parents=[common], help="Gaussian, theta and six-vertex checks")

    predict = commands.add_parser("predict", parents=[common], help="Closed-form BCFT values")
    predict.add_argument("deltas", nargs=2, type=float, metavar=("DELTA1", "DELTA2"))

    eta = commands.add_parser("eta", parents=[common], help="Dedekind eta of q = exp(-2 pi aspect)")
    eta.add_argument("--aspect", type=float, default=1.0, help="Torus aspect ratio L1 / L2")

    instanton = commands.add_parser("instanton", parents=[common], help="Instanton sum I(lam)")
    instanton.add_argument("lam", type=float)
    instanton.add_argument("--aspect", type=float, default=1.0, help="Torus aspect ratio L1 / L2")

    vertex = commands.add_parser(
        "vertex-exact", parents=[common], help="Exact six-vertex torus fidelity"
    )
    vertex.add_argument("c", type=float)
    vertex.add_argument("c_prime", type=float)

    sweep = commands.add_parser("sweep", parents=[common], help="One XXZ series with fit")
    sweep.add_argument("delta2", type=float)
    sweep.add_argument("--delta1", type=float)
    sweep.add_argument("--bc", choices=[kind.value for kind in BoundaryKind])
    sweep.add_argument("--theta", type=float)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _setup_logging(args.verbose)

    overrides: dict[str, Any] = {
        key: getattr(args, key, None)
        for key in ("out_dir", "lmax", "workers", "seed", "tol", "delta1", "bc", "theta")
    }

    try:
        config = load_config(args.config, overrides)
        logger.debug("Config digest %s", config.digest())
        _dispatch(args, config)
    except GFactorError as e:
        _print_error(type(e).__name__, str(e))
        return int(e.exit_code)
    except ValueError as e:
        _print_error("Invalid input", str(e))
        return int(ExitCode.CONFIG_ERROR)

    return int(ExitCode.SUCCESS)


def _setup_logging(verbose: bool) -> None:
    package_logger = logging.getLogger("gfactor_fidelity")
    package_logger.handlers = [RichHandler(console=error_console, show_path=False)]
    package_logger.setLevel(logging.DEBUG if verbose else logging.INFO)


def _dispatch(args: argparse.Namespace, config: RunConfig) -> None:
    if args.command == "fig1":
        _print_files(core.run_fig1(config))
    elif args.command == "fig2":
        _print_files(core.run_fig2(config))
    elif args.command == "oracle":
        _print_checks(core.run_oracle(config))
    elif args.command == "predict":
        _print_prediction(*args.deltas)
    elif args.command == "eta":
        q = cft2d.nome(args.aspect)
        _print_values(
            f"Dedekind eta at aspect {args.aspect:g}",
            {
                "q": q,
                "eta(q)": cft2d.dedekind_eta(q),
                "ln eta(q)": cft2d.log_dedekind_eta(q),
                "product terms": cft2d.eta_truncation_order(q),
            },
        )
    elif args.command == "instanton":
        q = cft2d.nome(args.aspect)
        _print_values(
            f"Instanton sum at lam={args.lam:g}, aspect {args.aspect:g}",
            {"q": q, "I(lam)": cft2d.instanton_sum(args.lam, q)},
        )
    elif args.command == "vertex-exact":
        table = Table(title="Six-vertex torus fidelity", box=box.ROUNDED)
        for column in core.VERTEX_COLUMNS:
            table.add_column(column)
        for row in core.run_vertex_exact(config, args.c, args.c_prime):
            table.add_row(*(_format(value) for value in row))
        console.print(table)
    elif args.command == "sweep":
        estimate, path = core.run_sweep(config, args.delta2)
        _print_estimate(estimate)
        _print_files([path])


def _print_prediction(delta1: float, delta2: float) -> None:
    coupling1 = bcft.lambda_of_delta(delta1)
    coupling2 = bcft.lambda_of_delta(delta2)
    lam_n, lam_d = bcft.fold(coupling1.lam, coupling2.lam)
    _print_values(
        f"BCFT predictions for delta=({delta1:g}, {delta2:g})",
        {
            "lam1": coupling1.lam,
            "lam2": coupling2.lam,
            "K1": coupling1.k,
            "K2": coupling2.k,
            "g (critical-critical)": bcft.g_critical(coupling1.lam, coupling2.lam),
            "lam_N": lam_n,
            "lam_D": lam_d,
            "g_N(lam_N) g_D(lam_D)": bcft.g_neumann(lam_n) * bcft.g_dirichlet(lam_d),
            "interface coupling": bcft.interface_coupling(coupling1.lam, coupling2.lam),
            "g (Neel side against delta2)": bcft.g_critical_massive(coupling2.k),
            "g (toroidal)": bcft.g_antiperiodic(),
        },
    )


def _format(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _print_values(title: str, values: dict[str, Any]) -> None:
    table = Table(title=title, box=box.ROUNDED)
    table.add_column("Quantity", style="bold white")
    table.add_column("Value")
    for name, value in values.items():
        table.add_row(name, _format(value))
    console.print(table)


def _print_estimate(estimate: GFactorEstimate) -> None:
    _print_values(
        f"Fit over L={estimate.l_min}..{estimate.l_max} ({estimate.n_points} points)",
        {
            "g": estimate.g,
            "ln g": estimate.ln_g,
            "stderr ln g": estimate.stderr_ln_g,
            "f": estimate.f,
            "c1": estimate.c1,
            "max |residual|": estimate.max_abs_residual,
        },
    )


def _print_checks(checks: list[OracleCheck]) -> None:
    table = Table(title="Oracle checks", box=box.ROUNDED)
    table.add_column("#", style="dim")
    table.add_column("Status")
    table.add_column("Check", style="bold white")
    table.add_column("Error", style="dim")

    for i, check in enumerate(checks, 1):
        table.add_row(
            str(i), _get_status_display(check.status), check.name, f"{check.abs_error:.3g}"
        )

    console.print(table)


def _print_files(paths: list[Path]) -> None:
    for path in paths:
        console.print(f"[green]wrote[/green] [dim]{path}[/dim]")


def _print_error(title: str, message: str) -> None:
    error_console.print(Panel(message, title=title, border_style="red"))


def _get_status_display(status: CheckStatus) -> Text:
    """Retrieves the UI configuration for a given check status."""
    icon, style = CHECK_STATUS_STYLES[status]
    return Text(f"{icon} {status.value}", style=style)


CHECK_STATUS_STYLES = {
    CheckStatus.PASS: ("🟢", "green bold"),
    CheckStatus.FAIL: ("🔴", "red bold"),
    CheckStatus.SKIPPED: ("⚪", "dim"),
}


if __name__ == "__main__":
    sys.exit(main())
