"""Cell-free ISAC mode selection and beamforming (C++ core)."""

import json as _json

from ._cfisac import *  # noqa: F401,F403
from ._cfisac import run_trial as _run_trial


def trial(config, method, seed):
    """run_trial with the record decoded into a dict."""
    return _json.loads(_run_trial(config, method, seed))
