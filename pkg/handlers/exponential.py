import time

import click

from config import Config
from handlers import command_boundary
from utils.logger import setup_logger

logger = setup_logger(__name__)


@click.command("qexp")
@click.option("--space", "space_name", required=True, help="Space preset name.")
@click.option("--degree", type=click.IntRange(min=0), default=None, help="Truncation degree (default QSPACE_QEXP_DEGREE).")
@click.option("--dual", is_flag=True, help="Solve the right eigenvalue equation instead.")
@click.option("--hatted", is_flag=True, help="Use the hatted derivatives.")
@click.option("--check", is_flag=True, help="Also verify the residual and the q = 1 limit.")
@command_boundary
def qexp_command(space_name, degree, dual, hatted, check):
    """Solves for the q-exponential and prints one `(x | p) : coeff` line per term."""
    from phasespace import DerivKind
    from qexp import matches_classical, residual, solve_qexp, solve_qexp_dual
    from spaces import load_space

    space = load_space(space_name)
    degree = Config.QEXP_DEGREE if degree is None else degree
    kind = DerivKind(hatted, "right" if dual else "left")
    started = time.monotonic()
    series = (solve_qexp_dual if dual else solve_qexp)(space, kind, degree)
    logger.debug(f"{space.name} q-exponential through degree {degree} took {time.monotonic() - started:.2f}s")

    for line in series.dump():
        click.echo(line)

    if check:
        leftover = residual(series)
        click.echo(f"# residual: {'0' if not leftover else len(leftover)}")
        click.echo(f"# classical limit: {'ok' if matches_classical(series) else 'differs'}")
