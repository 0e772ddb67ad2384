try:
    from ._qndspin import *  # noqa: F401,F403  (installed package layout)
except ImportError:
    from _qndspin import *  # noqa: F401,F403  (in-tree build directory)
