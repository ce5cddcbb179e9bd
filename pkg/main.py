import sys

import click

from config import Config
from utils.logger import set_level, setup_logger
from handlers.exponential import qexp_command
from handlers.forms import grassmann_group
from handlers.integration import integrate_command
from handlers.ordering import normal_order_command, star_command
from handlers.verification import verify_command

# Set up logging
logger = setup_logger(__name__)


@click.group("qspace")
@click.option("--log-level", default=None, type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"], case_sensitive=False))
def cli(log_level):
    """q-deformed quantum spaces: normal ordering, q-exponentials, Grassmann forms and lattice integration."""
    if log_level:
        set_level(log_level.upper())

    # Validate configuration
    try:
        Config.validate()
    except ValueError as e:
        logger.critical(f"Configuration Error: {e}")
        sys.exit(2)


cli.add_command(normal_order_command)
cli.add_command(star_command)
cli.add_command(qexp_command)
cli.add_command(grassmann_group)
cli.add_command(integrate_command)
cli.add_command(verify_command)


def main():
    cli()


if __name__ == '__main__':
    main()
