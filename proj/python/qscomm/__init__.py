"""Stochastic two-species quorum-sensing channel: simulation and information metrics.

The heavy lifting lives in the C++ extension ``qscomm._core``; this package
adds small dict/JSON conveniences on top. Configurations are plain dicts
mirroring the CLI's JSON schema.
"""

import json as _json

from . import _core
from ._core import (  # noqa: F401
    ConfigError,
    IoError,
    NumericalError,
    __version__,
    binned_mi,
    default_bode_freqs,
    ksg_mi,
    ksg_mi_with_ci,
    transfer_entropy,
)


def _as_json(config):
    return config if isinstance(config, str) else _json.dumps(config)


def default_config():
    """Bundled baseline configuration as a dict."""
    return _json.loads(_core.default_config_json())


def config_hash(config):
    return _core.config_hash(_as_json(config))


def scenario_config(config, scenario):
    """Configuration for a named scenario, derived from ``config``."""
    return _json.loads(_core.scenario_config_json(_as_json(config), scenario))


def simulate(config):
    """Integrate the SDE system; returns a dict of numpy series."""
    return _core.simulate(_as_json(config))


def run_replicates(config, n_reps, n_threads=1):
    return _core.run_replicates(_as_json(config), n_reps, n_threads)


def noise_decomposition(config, n_reps=5, species=0, start_frac=0.1, end_frac=1.0, n_threads=1):
    return _core.noise_decomposition(_as_json(config), n_reps, species, start_frac, end_frac,
                                     n_threads)


def analyze(config, analyses=("mi", "cross", "te", "noise"), n_reps=5, n_threads=1):
    """Run the requested analyses; returns the results bundle as a dict."""
    return _json.loads(_core.analyze(_as_json(config), list(analyses), n_reps, n_threads))


def bode_sweep(config, freqs, amplitude=0.0, n_cycles=5, n_replicates=2, n_threads=1):
    return _core.bode_sweep(_as_json(config), list(freqs), amplitude, n_cycles, n_replicates,
                            n_threads)


def elasticity(config, param, epsilon=0.2, n_reps=3, n_threads=1):
    return _core.elasticity(_as_json(config), param, epsilon, n_reps, n_threads)
