import sys

import click

from handlers import command_boundary
from utils.logger import setup_logger

logger = setup_logger(__name__)


@click.command("verify")
@click.option("--suite", required=True, help="algebra, conjugation, phasespace, qexp, grassmann, lattice or all.")
@click.option("--q", "q_value", type=click.FloatRange(min=1.0, min_open=True), default=None, help="Numeric q for float checks (default QSPACE_Q).")
@click.option("--seed", type=int, default=None, help="Seed (default QSPACE_SEED).")
@click.option("--window", type=click.IntRange(min=0), default=None, help="Lattice half-width (default QSPACE_WINDOW).")
@click.option("--json", "json_path", type=click.Path(dir_okay=False, writable=True), default=None, help="Write the report here.")
@command_boundary
def verify_command(suite, q_value, seed, window, json_path):
    """Runs a verification suite; exits 1 when a check fails."""
    from suites import run_suite

    report = run_suite(suite, q_value, seed, window)
    text = report.to_json()
    if json_path:
        with open(json_path, "w", encoding="utf-8") as handle:
            handle.write(text)
        logger.info(f"Report written to {json_path}")

    for check in report.checks:
        if check.status == "fail":
            click.echo(f"FAIL {check.id} [{check.paper_ref}]: {check.anchor} ({check.witness})")
        elif check.status == "finding":
            click.echo(f"NOTE {check.id} [{check.paper_ref}]: {check.anchor} ({check.witness})")
    counts = ", ".join(f"{n} {status}" for status, n in sorted(report.counts().items()))
    click.echo(f"{report.suite}: {len(report.checks)} checks ({counts})")

    if report.failed:
        sys.exit(1)
