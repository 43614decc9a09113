import click

from pathlasso.config import Config

__version__ = '1.0.0'


def create_cli(config_class=Config):
    """Command-line application factory."""

    @click.group(context_settings={'help_option_names': ['-h', '--help']})
    @click.version_option(__version__, prog_name='pathlasso')
    @click.pass_context
    def cli(ctx):
        """Pathway selection in high-dimensional mediation models."""
        ctx.ensure_object(dict)
        ctx.obj['config'] = config_class

    # Register commands
    from pathlasso.commands import simulate, fit, cv, compare, refit
    cli.add_command(simulate.simulate)
    cli.add_command(fit.fit)
    cli.add_command(fit.path)
    cli.add_command(cv.cv)
    cli.add_command(compare.compare)
    cli.add_command(refit.refit)

    return cli
