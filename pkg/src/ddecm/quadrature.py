"""Adaptive Simpson quadrature for complex-valued integrands.

Used by the argument-principle root counter and, in the test suite, as the
independent oracle against which every closed-form integral is checked.
"""

from __future__ import annotations

from typing import Callable

from .errors import QuadratureError


def adaptive_simpson(
    f: Callable[[float], complex],
    a: float,
    b: float,
    tol: float = 1e-12,
    max_depth: int = 50,
) -> complex:
    """Integrate ``f`` over ``[a, b]`` to absolute tolerance ``tol``."""
    if b < a:
        return -adaptive_simpson(f, b, a, tol, max_depth)
    if a == b:
        return 0j
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    # rounding-noise scale of the whole integral; per-level tolerances are
    # clamped here so the refinement cannot chase digits that do not exist
    floor = 1e-16 * (abs(whole) + (b - a) * (abs(fa) + 4.0 * abs(fm) + abs(fb)) / 6.0)
    return _recurse(f, a, b, fa, fm, fb, whole, tol, max_depth, floor)


def _recurse(f, a, b, fa, fm, fb, whole, tol, depth, floor):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if abs(delta) <= 15.0 * max(tol, floor) or abs(delta) <= 1e-15 * (abs(left) + abs(right)):
        return left + right + delta / 15.0
    if depth <= 0:
        raise QuadratureError(
            f"adaptive Simpson did not converge on [{a}, {b}] (residual {abs(delta):.3e})"
        )
    half = max(0.5 * tol, floor)
    return _recurse(f, a, m, fa, flm, fm, left, half, depth - 1, floor) + _recurse(
        f, m, b, fm, frm, fb, right, half, depth - 1, floor
    )
