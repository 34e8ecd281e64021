from .representation import representation_bp
from .measure import measure_bp
from .orbits import orbits_bp
from .cache import cache_bp
from .selftest import selftest_bp

def register_commands(app):
    app.register_blueprint(representation_bp)
    app.register_blueprint(measure_bp)
    app.register_blueprint(orbits_bp)
    app.register_blueprint(cache_bp)
    app.register_blueprint(selftest_bp)
