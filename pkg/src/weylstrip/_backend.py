"""Select the compiled kernels when available, else the numpy fallback.

Set ``WEYLSTRIP_BACKEND=python`` to force the fallback.
"""

import os

if os.environ.get("WEYLSTRIP_BACKEND", "").lower() == "python":
    from . import _pykernels as kernels
else:
    try:
        from . import _ckernels as kernels
    except ImportError:
        from . import _pykernels as kernels

NAME = "cython" if kernels.__name__.endswith("_ckernels") else "python"

interp_multilinear = kernels.interp_multilinear
moyal00_sampled = kernels.moyal00_sampled
growth_pair_scan = kernels.growth_pair_scan
