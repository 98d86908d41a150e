"""Non-metric duality: complement map, regressive join, wedge meet, polarity.

The complement map ``j_map`` sends each basis blade to its complementary
blade using only reordering signs, never the metric, so it survives
degenerate signatures.  Signs are chosen per complementary pair (b, c):
the lower-grade member b gets ``outer(b, j_map(b)) = +I`` and its partner
reuses the same sign, which makes the map a strict involution,
``j_map(j_map(x)) = x``.  With an involutive map the shuffle identity
``j_map(meet(x, y)) = join(j_map(x), j_map(y))`` holds with no stray
signs at any grade.

``join`` is the regressive product ``j_map(outer(j_map(x), j_map(y)))``.
In a dual algebra the native wedge intersects flats, so ``meet`` is just
``outer`` there; ``join`` then spans.  ``polarity`` multiplies by the
pseudoscalar and is not invertible when the metric is degenerate.
"""

from __future__ import annotations

import numpy as np

from .algebra import Algebra, GAError, Multivector, popcount, reorder_sign


def _tables(alg: Algebra) -> tuple[np.ndarray, np.ndarray]:
    cached = getattr(alg, "_dual_tables", None)
    if cached is not None:
        return cached
    full = alg.size - 1
    partner = np.zeros(alg.size, dtype=np.int32)
    sign = np.zeros(alg.size, dtype=np.int8)
    for pos, mask in enumerate(alg.mask_of):
        comp = full ^ mask
        partner[pos] = alg.pos_of[comp]
        ga, gc = popcount(mask), popcount(comp)
        if ga < gc or (ga == gc and mask < comp):
            sign[pos] = reorder_sign(mask, comp)
        else:
            sign[pos] = reorder_sign(comp, mask)
    alg._dual_tables = (partner, sign)
    return alg._dual_tables


def j_map(x: Multivector) -> Multivector:
    """Grade-reversing complement; metric-free and involutive."""
    partner, sign = _tables(x.algebra)
    out = np.zeros(x.algebra.size)
    out[partner] = sign * x.coeffs
    return Multivector(x.algebra, out)


def join(x: Multivector, y: Multivector) -> Multivector:
    """Regressive product: the span of two flats in a dual algebra."""
    x._peer(y)
    return j_map(j_map(x).outer(j_map(y)))


def meet(x: Multivector, y: Multivector) -> Multivector:
    """Intersection of flats; only meaningful where wedge means meet."""
    x._peer(y)
    if x.algebra.signature.orientation != "dual":
        raise GAError("meet is the native wedge of dual algebras only")
    return x.outer(y)


def polarity(x: Multivector) -> Multivector:
    """Metric polarity x -> x * I; collapses ideal content when r > 0."""
    return x.gp(x.algebra.pseudoscalar())
