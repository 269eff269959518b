import logging

import click

# Import commands
from routes.analyze import analyze
from routes.power import power
from routes.verify import verify

# Import configuration
from config import config

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'


def create_app(config_name='default'):
    """Application factory function."""
    app_config = config[config_name]

    # Configure logging once for the whole process
    logging.basicConfig(level=getattr(logging, str(app_config.LOG_LEVEL).upper(), logging.INFO),
                        format=LOG_FORMAT)

    @click.group(name=app_config.APP_NAME, help=app_config.APP_DESCRIPTION)
    @click.pass_context
    def app(ctx):
        ctx.obj = app_config

    app.add_command(analyze)
    app.add_command(power)
    app.add_command(verify)
    return app


if __name__ == '__main__':
    create_app()()
