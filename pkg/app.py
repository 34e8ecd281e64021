from flask import Flask
from flask.cli import FlaskGroup

from config import Config
from extensions import cache_store, init_logging
from commands import register_commands


def create_app(test_config=None):
    app = Flask(__name__)
    app.config.from_object(Config)
    if test_config:
        app.config.update(test_config)

    # Initialize extensions
    init_logging(app)
    cache_store.init_app(app)

    # Register command blueprints
    register_commands(app)

    return app


cli = FlaskGroup(create_app=create_app, add_default_commands=False,
                 add_version_option=False, load_dotenv=False,
                 help='Experiments on boundary representations of hyperbolic groups.')

if __name__ == '__main__':
    cli()
