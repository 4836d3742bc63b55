"""Hot-kernel dispatch: compiled extension when built, pure Python otherwise."""

from . import _bnb_py

try:
    from . import _bnb as _compiled
    HAVE_COMPILED = True
except ImportError:
    _compiled = None
    HAVE_COMPILED = False


def solve_component(weights, det_masks, syndrome, force=None, cap=None):
    """Minimum-weight parity cover of one connected component.

    force: "python" or "compiled" pins the implementation (benchmarks and
    cross-checks); default picks the compiled core when it applies.
    cap: optional weight bound; when the optimum cannot beat it the call
    returns (None, inf) early instead of finishing the search.
    """
    impl = force or ("compiled" if HAVE_COMPILED else "python")
    if impl == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled core not built")
        if all(dm < (1 << 128) for dm in det_masks) and syndrome < (1 << 128):
            return _compiled.solve_component(weights, det_masks, syndrome,
                                             cap)
        if force == "compiled":
            raise ValueError("compiled core limited to 128 detectors")
    return _bnb_py.solve_component(weights, det_masks, syndrome, cap)
