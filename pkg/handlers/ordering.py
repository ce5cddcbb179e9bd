import click

from handlers import command_boundary
from utils.logger import setup_logger

logger = setup_logger(__name__)


@click.command("normal-order")
@click.option("--space", "space_name", required=True, help="Space preset name.")
@click.argument("expr")
@command_boundary
def normal_order_command(space_name, expr):
    """
    Evaluates EXPR in the space and prints its normal form.
    Coordinates, momenta, derivatives and Grassmann symbols are all accepted.
    """
    from grammar import evaluate, parse
    from spaces import load_space

    space = load_space(space_name)
    value = evaluate(parse(expr, space), space)
    logger.debug(f"normal-order {expr!r} in {space.name}")
    click.echo(value.render())


@click.command("star")
@click.option("--space", "space_name", required=True, help="Space preset name.")
@click.argument("f")
@click.argument("g")
@command_boundary
def star_command(space_name, f, g):
    """Prints the star product of two commutative coefficient functions."""
    from grammar import evaluate_coefficients, parse
    from ncalg import star_product
    from spaces import load_space

    space = load_space(space_name)
    left = evaluate_coefficients(parse(f, space), space)
    right = evaluate_coefficients(parse(g, space), space)
    click.echo(star_product(left, right).render())
