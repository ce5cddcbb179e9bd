import click

from handlers import command_boundary
from utils.logger import setup_logger

logger = setup_logger(__name__)


def _coefficient(word, primed_side: bool) -> str:
    name = "f" if not primed_side else "g"
    if not word:
        return f"{name}'"
    return f"{name}_{{{','.join(word)}}}"


def format_term(term, primed: bool) -> str:
    f_text = _coefficient(term.f_word, False)
    g_text = _coefficient(term.g_word, True)
    if primed:
        g_text = f"conj({g_text})"
    else:
        f_text = f"conj({f_text})"
    line = f"{term.coeff.render()} * {f_text} * {g_text}"
    if term.flag:
        line += f"    # {term.flag}"
    return line


@click.group("grassmann")
def grassmann_group():
    """Sesquilinear forms of the Grassmann sector."""


@grassmann_group.command("form")
@click.option("--space", "space_name", required=True, help="Space preset name.")
@click.option("--variant", type=click.Choice(["L", "Lbar", "R", "Rbar"]), required=True)
@click.option("--primed", is_flag=True, help="Use the primed form (conjugate on the right).")
@click.option("--f", "f_expr", default=None, help="Left supernumber, e.g. 'theta1 + 2*theta2'.")
@click.option("--g", "g_expr", default=None, help="Right supernumber.")
@click.option("--gram", is_flag=True, help="Print the Gram determinant instead of the table.")
@command_boundary
def form_command(space_name, variant, primed, f_expr, g_expr, gram):
    """
    Prints the coefficient table of a form, or its value on --f and --g.
    """
    from grammar import evaluate, parse
    from grassmann import Supernumber, gram_determinant, load_grassmann_space, sesquilinear
    from scalar import QScalar
    from spaces import load_space

    space = load_space(space_name)
    gspace = load_grassmann_space(space.name)

    if gram:
        click.echo(gram_determinant(gspace, variant, primed).render())
        return

    if f_expr is None and g_expr is None:
        for term in gspace.tables[(variant, primed)]:
            click.echo(format_term(term, primed))
        return

    if f_expr is None or g_expr is None:
        raise click.UsageError("--f and --g go together")

    def supernumber(text):
        value = evaluate(parse(text, space), space)
        if isinstance(value, QScalar):
            return Supernumber.constant(gspace, value)
        if not isinstance(value, Supernumber):
            raise click.UsageError(f"{text!r} is not a Grassmann expression")
        return value

    value = sesquilinear(gspace, variant, primed, supernumber(f_expr), supernumber(g_expr))
    logger.debug(f"<{f_expr}, {g_expr}>_{variant}{chr(39) if primed else ''} in {space.name}")
    click.echo(value.render())
