import hashlib
import logging
import os

from hyperrep.errors import DomainError
from hyperrep.plane import OrbitCache, build_group, build_orbit_cache

logger = logging.getLogger('hyperrep.cache')


class CacheStore:
    """Orbit caches as versioned BSON files under one directory."""

    def __init__(self, directory=None):
        self.directory = directory

    def init_app(self, app):
        self.directory = app.config['CACHE_DIR']
        app.extensions['orbit_cache'] = self

    def key(self, preset, tolerance):
        name = build_group(preset).name
        digest = hashlib.sha256(('%s|%r' % (name, tolerance)).encode()).hexdigest()
        return '%s-%s.bson' % (name, digest[:12])

    def path(self, preset, tolerance):
        if not self.directory:
            raise DomainError('no cache directory configured')
        return os.path.join(self.directory, self.key(preset, tolerance))

    def load(self, preset, t_max, tolerance):
        path = self.path(preset, tolerance)
        if not os.path.exists(path):
            return None
        with open(path, 'rb') as fh:
            cache = OrbitCache.from_bson(fh.read())
        if not cache.matches(build_group(preset).name, t_max, tolerance):
            logger.info('cache %s covers t <= %.3g, need %.3g', path,
                        cache.t_max, t_max)
            return None
        return cache

    def build(self, preset, t_max, tolerance, threads=1):
        cache = build_orbit_cache(build_group(preset), t_max, tolerance,
                                  threads=threads)
        os.makedirs(self.directory, exist_ok=True)
        path = self.path(preset, tolerance)
        tmp = path + '.tmp'
        with open(tmp, 'wb') as fh:
            fh.write(cache.to_bson())
        os.replace(tmp, path)
        logger.info('wrote %d orbit points to %s', len(cache), path)
        return cache

    def get(self, preset, t_max, tolerance, threads=1):
        return (self.load(preset, t_max, tolerance)
                or self.build(preset, t_max, tolerance, threads))

    def entries(self):
        if not self.directory or not os.path.isdir(self.directory):
            return []
        return sorted(f for f in os.listdir(self.directory) if f.endswith('.bson'))

    def clear(self):
        removed = 0
        for name in self.entries():
            os.remove(os.path.join(self.directory, name))
            removed += 1
        return removed


cache_store = CacheStore()


def init_logging(app):
    level = getattr(logging, str(app.config['LOG_LEVEL']).upper(), logging.WARNING)
    logging.basicConfig(level=level,
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s')
    logging.getLogger('hyperrep').setLevel(level)
    app.logger.setLevel(level)
