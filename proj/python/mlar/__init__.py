"""Python bindings for the mlar recruitment pipeline core."""

try:
    from ._mlar import *  # noqa: F401,F403
    from ._mlar import __version__  # noqa: F401
except ImportError:  # development tree: module built next to the package
    from _mlar import *  # noqa: F401,F403
    from _mlar import __version__  # noqa: F401
