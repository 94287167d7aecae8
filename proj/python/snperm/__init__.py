"""Seriation via convex relaxations over sorting-network polytopes.

Thin re-export of the compiled extension. Installed wheels carry the module
inside the package; in-tree builds put it on PYTHONPATH next to the build
directory.
"""

try:
    from ._snperm import *  # noqa: F401,F403
    from ._snperm import __version__  # noqa: F401
except ImportError:  # pragma: no cover - in-tree layout
    from _snperm import *  # noqa: F401,F403
    from _snperm import __version__  # noqa: F401
