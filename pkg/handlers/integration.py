import click

from handlers import command_boundary
from utils.helpers import format_value
from utils.logger import setup_logger

logger = setup_logger(__name__)


@click.command("integrate")
@click.option("--spec", "spec_path", required=True, type=click.Path(exists=True, dir_okay=False), help="Lattice spec JSON.")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False), help="Samples CSV.")
@click.option("--combined", type=click.Choice(["1", "2"]), default=None, help="Report the combined integral instead.")
@command_boundary
def integrate_command(spec_path, input_path, combined):
    """
    Jackson-integrates lattice samples. The window is printed with the result:
    sums are truncated to it.
    """
    from lattice import combined_integral, integrate, load_lattice_spec, read_csv

    spec = load_lattice_spec(spec_path)
    with open(input_path, newline="", encoding="utf-8") as handle:
        f = read_csv(spec, handle)
    logger.info(f"Read {len(f.samples)} nonzero samples from {input_path}")

    value = combined_integral(f, int(combined)) if combined else integrate(f)
    click.echo(format_value(value))
    click.echo(f"# window: {list(spec.window)}, sectors: {len(spec.sectors)}")
