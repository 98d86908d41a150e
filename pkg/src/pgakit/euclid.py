"""Euclidean flats in the plane-based model.

1-vectors are hyperplanes (``a*x + b*y + c*z + d = 0`` maps to
``d*e0 + a*e1 + b*e2 + c*e3``), points are their top-grade meets, and the
degenerate direction ``e0`` carries everything ideal.  A point built by
``point()`` always has weight +1 on the euclidean volume blade, which
is what makes polarity send it to the ideal hyperplane unscaled.

Distances are deliberately computed twice, through the regressive join
and through the grade-2 slice of the geometric product, and the two
routes are required to agree before a value is returned.
"""

from __future__ import annotations

import math

import numpy as np

from .algebra import Algebra, GAError, Multivector
from .duality import join, meet

CROSS_CHECK_TOL = 1e-12
INCIDENCE_TOL = 1e-9
NORMALIZED_TOL = 1e-9
JUNK_TOL = 1e-12


def significant_grades(x: "Multivector") -> tuple:
    """Grades present after dropping versor-sandwich rounding residue."""
    return x.grades_present(tol=JUNK_TOL * max(1.0, x.norm()))


class GeometryError(GAError):
    """Domain failure: ideal input, degenerate construction, bad weights."""


def _require_dual(alg: Algebra):
    if alg.signature.orientation != "dual" or alg.signature.r != 1:
        raise GeometryError("needs a degenerate dual (plane-based) algebra")


def euclidean_dim(alg: Algebra) -> int:
    _require_dual(alg)
    return alg.gens - 1


def _volume_name(alg: Algebra) -> str:
    return "e" + "".join(str(i) for i in range(1, alg.gens))


def plane(alg: Algebra, *coeffs: float) -> Multivector:
    """Hyperplane from n normal components plus offset, normal first."""
    n = euclidean_dim(alg)
    if len(coeffs) != n + 1:
        raise GeometryError(f"expected {n + 1} coefficients, got {len(coeffs)}")
    *normal, off = (float(c) for c in coeffs)
    if not any(normal):
        raise GeometryError("hyperplane normal must be nonzero")
    c = np.zeros(alg.size)
    c[alg.pos_of_name("e0")] = off
    for i, a in enumerate(normal, start=1):
        c[alg.pos_of_name(f"e{i}")] = a
    return Multivector(alg, c)


def point(alg: Algebra, *coords: float) -> Multivector:
    """Weight-one point as the meet of the n axis-aligned planes through it."""
    n = euclidean_dim(alg)
    if len(coords) != n:
        raise GeometryError(f"expected {n} coordinates, got {len(coords)}")
    mv = None
    for i, c in enumerate(coords, start=1):
        factor = alg.blade(f"e{i}") - alg.blade("e0", float(c))
        mv = factor if mv is None else mv ^ factor
    return mv


def origin(alg: Algebra) -> Multivector:
    return point(alg, *([0.0] * euclidean_dim(alg)))


def ideal_plane(alg: Algebra) -> Multivector:
    _require_dual(alg)
    return alg.blade("e0")


def line_from_points(p: Multivector, q: Multivector) -> Multivector:
    return join(p, q)


def line_from_planes(a: Multivector, b: Multivector) -> Multivector:
    return meet(a, b)


def weight(x: Multivector) -> float:
    """Coefficient on the euclidean volume blade; +-1 on normalized points."""
    return x[_volume_name(x.algebra)]


def euclidean_norm(x: Multivector) -> float:
    return math.sqrt(abs(x.gp(x.reverse()).scalar_part()))


def ideal_norm(x: Multivector) -> float:
    """Euclidean size of the e0-carrying complement part."""
    _require_dual(x.algebra)
    part = x.coeffs[_ideal_mask(x.algebra)]
    return math.sqrt(float(part @ part))


def _ideal_mask(alg: Algebra) -> np.ndarray:
    cached = getattr(alg, "_ideal_positions", None)
    if cached is None:
        cached = np.array([bool(m & 1) for m in alg.mask_of])
        alg._ideal_positions = cached
    return cached


def is_ideal(x: Multivector, tol: float = NORMALIZED_TOL) -> bool:
    return euclidean_norm(x) <= tol * max(1.0, x.norm())


def normalize(x: Multivector) -> Multivector:
    """Scale to unit euclidean norm, or unit ideal norm for ideal input.

    Top-grade elements with nonzero weight divide by the signed weight,
    so points come out with weight exactly +1.
    """
    alg = x.algebra
    n = euclidean_dim(alg)
    en = euclidean_norm(x)
    if en > 0.0:
        w = weight(x)
        if significant_grades(x) == (n,) and w != 0.0:
            return x / w
        return x / en
    inorm = ideal_norm(x)
    if inorm > 0.0:
        return x / inorm
    raise GeometryError("cannot normalize a zero multivector")


def point_coords(p: Multivector) -> np.ndarray:
    """Cartesian coordinates of a (not necessarily unit-weight) point."""
    w = weight(p)
    if abs(w) <= NORMALIZED_TOL * max(1.0, p.norm()):
        raise GeometryError("ideal point has no cartesian coordinates")
    return _coord_table(p.algebra) @ p.coeffs / w


def ideal_direction(p: Multivector) -> np.ndarray:
    """Direction vector packed in an ideal point (a weight-zero point)."""
    return _coord_table(p.algebra) @ p.coeffs


def _coord_table(alg: Algebra) -> np.ndarray:
    cached = getattr(alg, "_coord_rows", None)
    if cached is not None:
        return cached
    n = euclidean_dim(alg)
    base = origin(alg)
    rows = np.zeros((n, alg.size))
    for i in range(n):
        unit = [0.0] * n
        unit[i] = 1.0
        diff = point(alg, *unit) - base  # single +-1 entry on one ideal blade
        rows[i] = diff.coeffs
    alg._coord_rows = rows
    return rows


def direction(flat: Multivector) -> np.ndarray:
    """Direction of a line: its ideal point, extracted as a vector."""
    return ideal_direction(meet(flat, ideal_plane(flat.algebra)))


def _check_point(p: Multivector, n: int, who: str):
    if significant_grades(p) != (n,):
        raise GeometryError(f"{who} is not a point (grade {n} expected)")
    if abs(weight(p) - 1.0) > NORMALIZED_TOL:
        raise GeometryError(f"{who} must be normalized to weight +1")


def distance(p: Multivector, q: Multivector) -> float:
    """Euclidean distance between normalized points, computed two ways.

    The regressive join's euclidean norm and the ideal norm of the
    grade-2 part of the geometric product must agree; disagreement means
    the algebra is broken, so it raises rather than returning either.
    """
    p._peer(q)
    n = euclidean_dim(p.algebra)
    _check_point(p, n, "p")
    _check_point(q, n, "q")
    via_join = euclidean_norm(join(p, q))
    via_gp = ideal_norm(p.gp(q).grade(2))
    if abs(via_join - via_gp) > CROSS_CHECK_TOL * max(1.0, via_join):
        raise GAError(
            f"distance routes disagree: join={via_join!r} gp={via_gp!r}"
        )
    return via_join


def angle(u: Multivector, v: Multivector) -> float:
    """Angle between normalized 1-vectors (hyperplanes), in [0, pi]."""
    u._peer(v)
    for name, x in (("u", u), ("v", v)):
        if significant_grades(x) != (1,):
            raise GeometryError(f"{name} is not a 1-vector")
        if abs(euclidean_norm(x) - 1.0) > NORMALIZED_TOL:
            raise GeometryError(f"{name} must have unit euclidean norm")
    c = u.gp(v).scalar_part()
    return math.acos(min(1.0, max(-1.0, c)))


def incident(x: Multivector, y: Multivector, tol: float = INCIDENCE_TOL) -> bool:
    """Incidence test; the residual tolerance scales with both weights."""
    x._peer(y)
    d = x.algebra.gens
    gx, gy = sum(significant_grades(x)), sum(significant_grades(y))
    prod = x.outer(y) if gx + gy <= d else join(x, y)
    return prod.norm() <= tol * max(1e-30, x.norm() * y.norm())


def perpendicular_through_point(line: Multivector, p: Multivector) -> Multivector:
    """Drop a perpendicular from p onto a line: ((line | p) ^ line) & p.

    The contraction builds the orthogonal hyperplane through p, the wedge
    meets it with the line to get the foot, and the join connects the
    foot back to p.  Degenerates when p already lies on the line.
    """
    line._peer(p)
    foot = (line | p) ^ line
    result = join(foot, p)
    if result.norm() <= INCIDENCE_TOL * max(1e-30, line.norm() * p.norm()):
        raise GeometryError("construction degenerates: point lies on the line")
    return result


def flat_kind(x: Multivector) -> str:
    n = euclidean_dim(x.algebra)
    grades = significant_grades(x)
    if grades == (1,):
        return "plane" if n == 3 else "line"
    if grades == (2,):
        return "line" if n == 3 else "point"
    if grades == (3,) and n == 3:
        return "point"
    return "mixed"
