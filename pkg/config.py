import math
import os


class Config:
    CACHE_DIR = os.environ.get('HYPERREP_CACHE_DIR',
                               os.path.expanduser('~/.cache/hyperrep'))
    LOG_LEVEL = os.environ.get('HYPERREP_LOG_LEVEL', 'WARNING')
    THREADS = int(os.environ.get('HYPERREP_THREADS', 1))
    DEPTH_BUDGET = int(os.environ.get('HYPERREP_DEPTH_BUDGET', 16))
    PLANE_DELTA = float(os.environ.get('HYPERREP_PLANE_DELTA', math.log(2)))
    ALGEBRAIC_TOL = float(os.environ.get('HYPERREP_ALGEBRAIC_TOL', 1e-9))
    GEOMETRIC_TOL = float(os.environ.get('HYPERREP_GEOMETRIC_TOL', 1e-6))
    SEED = int(os.environ.get('HYPERREP_SEED', 0))
    # wall-clock columns stay zero unless set, so outputs are reproducible
    TIMING = os.environ.get('HYPERREP_TIMING', '') == '1'
