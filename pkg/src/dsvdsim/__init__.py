"""Decentralized SVD simulation library.

Rank-one-update based decentralized eigen/singular value decompositions
over consensus networks, power-method baselines with exact communication
cost accounting, and two applications: sensor localization via low-rank
matrix completion and passive radar detection.
"""

from . import consensus, graph, secular  # noqa: F401

__all__ = ["graph", "consensus", "secular", "dsvd", "apps", "cli"]
__version__ = "0.1.0"


def __getattr__(name):
    # dsvd/apps/cli pull in the compiled kernels; import them lazily
    if name in ("dsvd", "apps", "cli"):
        import importlib

        return importlib.import_module(f".{name}", __name__)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
