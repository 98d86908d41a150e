"""Versors: reflections, motors, the bivector exponential, and its inverse.

A motor is an even versor of the degenerate dual algebra.  Every motor
is exp of a bivector, and every bivector splits into commuting euclidean
and ideal parts along the same axis; exp and log here work through that
split in closed form, no series.

The biquaternion half of this module is deliberately independent: it
multiplies pairs of quaternions with the hand-written Hamilton product
and never touches the multivector tables, so the isomorphism tests
actually compare two implementations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import Algebra, GAError, Multivector
from .duality import join
from .euclid import (
    GeometryError,
    _require_dual,
    euclidean_norm,
    normalize,
    point,
)

VERSOR_TOL = 1e-9
SMALL_ANGLE = 1e-12


class MultivaluedLogError(GeometryError):
    """log of a full-turn motor: the axis is not recoverable."""


def _parity(g: Multivector) -> int:
    """0 for even, 1 for odd, error for mixed or zero."""
    grades = g.grades_present()
    if not grades:
        raise GeometryError("zero multivector is not a versor")
    parities = {k % 2 for k in grades}
    if len(parities) != 1:
        raise GeometryError("mixed-grade multivector is not a versor")
    return parities.pop()


def normalize_versor(g: Multivector) -> Multivector:
    s = g.gp(g.reverse()).scalar_part()
    if abs(s) < 1e-30:
        raise GeometryError("cannot normalize a null versor")
    return g / math.sqrt(abs(s))


def reflect(mirror: Multivector, x: Multivector) -> Multivector:
    """Reflection in a unit hyperplane, the two-sided product a x a."""
    if mirror.grades_present() != (1,):
        raise GeometryError("mirror must be a 1-vector")
    if abs(euclidean_norm(mirror) - 1.0) > VERSOR_TOL:
        raise GeometryError("mirror must have unit euclidean norm")
    return mirror.gp(x).gp(mirror)


def sandwich(g: Multivector, x: Multivector) -> Multivector:
    """Apply a normalized versor: g x g~, with x grade-involuted if g is odd.

    The involution on the odd branch keeps orientations covariant, so a
    single reflection already maps oriented flats the same way two of
    them composed do.
    """
    g._peer(x)
    if abs(g.gp(g.reverse()).scalar_part() - 1.0) > VERSOR_TOL:
        raise GeometryError("sandwich needs a normalized versor")
    operand = x.involute() if _parity(g) else x
    return g.gp(operand).gp(g.reverse())


def _top_name(alg: Algebra) -> str:
    return alg.names[-1]


def exp_bivector(b: Multivector) -> Multivector:
    """Closed-form exponential of a bivector in the dual algebra.

    Splits b = alpha*u + beta*u*I with u a unit euclidean axis, then
    exp(b) = (cos(alpha) + sin(alpha) u)(1 + beta u I).  A purely ideal
    argument short-circuits to the exact translator 1 + b.
    """
    alg = b.algebra
    _require_dual(alg)
    if b.is_zero():
        return alg.scalar(1.0)
    if b.grades_present() != (2,):
        raise GeometryError("exp is defined here for bivectors only")
    sq = b.gp(b)
    s = sq.scalar_part()
    if s > 1e-12 * max(1.0, b.norm() ** 2):
        raise GAError("bivector square has positive scalar part")
    alpha = math.sqrt(max(0.0, -s))
    if alpha < SMALL_ANGLE:
        return alg.scalar(1.0) + b
    pseudo = sq[_top_name(alg)]
    beta = -pseudo / (2.0 * alpha)
    axis_ideal = b.gp(alg.pseudoscalar()) / alpha
    axis = (b - axis_ideal * beta) / alpha
    rotation = alg.scalar(math.cos(alpha)) + axis * math.sin(alpha)
    translation = alg.scalar(1.0) + axis_ideal * beta
    return rotation.gp(translation)


def log_versor(g: Multivector) -> Multivector:
    """Principal bivector logarithm of a normalized motor.

    Inverse of exp_bivector on its principal branch; the euclidean
    rotation half-angle lands in (0, pi).  Raises MultivaluedLogError
    when the motor is a full turn and the axis has cancelled out.
    """
    alg = g.algebra
    _require_dual(alg)
    if _parity(g) != 0:
        raise GeometryError("log needs an even versor")
    if abs(g.gp(g.reverse()).scalar_part() - 1.0) > VERSOR_TOL:
        raise GeometryError("log needs a normalized versor")
    w = g.scalar_part()
    b2 = g.grade(2)
    sin_alpha = euclidean_norm(b2)
    top = _top_name(alg)
    if sin_alpha < VERSOR_TOL:
        if w < 0.0:
            raise MultivaluedLogError("full-turn motor: axis is undetermined")
        if abs(g[top]) > VERSOR_TOL:
            raise GeometryError("not a motor: stray volume-grade component")
        return b2 / w
    alpha = math.atan2(sin_alpha, w)
    beta = -g[top] / sin_alpha
    axis_ideal = b2.gp(alg.pseudoscalar()) / sin_alpha
    axis = (b2 - axis_ideal * (beta * w)) / sin_alpha
    return axis * alpha + axis_ideal * beta


def screw_split(b: Multivector) -> tuple[Multivector, Multivector]:
    """Commuting (euclidean, ideal) parts of a bivector, summing to b."""
    alg = b.algebra
    _require_dual(alg)
    if not b.is_zero() and b.grades_present() != (2,):
        raise GeometryError("screw split is defined for bivectors only")
    s = b.gp(b).scalar_part()
    alpha = math.sqrt(max(0.0, -s))
    if alpha < SMALL_ANGLE:
        return alg.zero(), b
    pseudo = b.gp(b)[_top_name(alg)]
    beta = -pseudo / (2.0 * alpha)
    ideal_part = b.gp(alg.pseudoscalar()) * (beta / alpha)
    return b - ideal_part, ideal_part


def axis_line(alg: Algebra, center, axis) -> Multivector:
    """Unit line through center, oriented so exp(t*L) screws along +axis."""
    u = np.asarray(axis, dtype=float)
    nu = float(np.linalg.norm(u))
    if nu == 0.0:
        raise GeometryError("axis direction must be nonzero")
    u = u / nu
    c = np.asarray(center, dtype=float)
    return normalize(join(point(alg, *(c + u)), point(alg, *c)))


def screw_generator(line: Multivector, angle: float, displacement: float) -> Multivector:
    """Bivector whose exp rotates by angle about the unit line and slides
    displacement along it, both right-handed with the line's direction."""
    half = 0.5 * float(angle)
    gen = line * half
    if displacement:
        gen = gen - line.gp(line.algebra.pseudoscalar()) * (0.5 * float(displacement))
    return gen


def motor_from_screw(alg: Algebra, center, axis, angle: float,
                     displacement: float = 0.0) -> Multivector:
    return exp_bivector(screw_generator(axis_line(alg, center, axis),
                                        angle, displacement))


def rotation_about(alg: Algebra, axis, angle: float, center=None) -> Multivector:
    """Motor for a right-handed rotation about an axis line in 3D."""
    if alg.gens != 4:
        raise GeometryError("axis rotations need the 3D dual algebra")
    if center is None:
        center = [0.0, 0.0, 0.0]
    return motor_from_screw(alg, center, axis, angle, 0.0)


def rotation_about_point(p: Multivector, angle: float) -> Multivector:
    """2D motor turning counterclockwise by angle about a point."""
    if p.algebra.gens != 3:
        raise GeometryError("point rotations live in the 2D dual algebra")
    return exp_bivector(normalize(p) * (-0.5 * float(angle)))


def translator(alg: Algebra, offset) -> Multivector:
    """Exact motor translating by the given vector: 1 - (1/2) sum t_i e0i."""
    _require_dual(alg)
    t = np.asarray(offset, dtype=float)
    if t.shape != (alg.gens - 1,):
        raise GeometryError(f"expected {alg.gens - 1} components")
    out = alg.scalar(1.0)
    for i, ti in enumerate(t, start=1):
        if ti:
            out = out - alg.blade(f"e0{i}", 0.5 * float(ti))
    return out


def _quat_mul(a, b):
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return (
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    )


@dataclass(frozen=True)
class Biquaternion:
    """Quaternion pair q + eps*p with eps*eps = 0 and eps central."""

    real: tuple
    dual: tuple

    @staticmethod
    def from_parts(real, dual) -> "Biquaternion":
        return Biquaternion(tuple(float(c) for c in real),
                            tuple(float(c) for c in dual))

    @staticmethod
    def unit(label: str) -> "Biquaternion":
        real, dual = [0.0] * 4, [0.0] * 4
        dualpart = label.startswith("eps")
        core = label[3:] if dualpart else label
        idx = {"": 0, "1": 0, "i": 1, "j": 2, "k": 3}[core]
        (dual if dualpart else real)[idx] = 1.0
        return Biquaternion.from_parts(real, dual)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return self.scale(float(other))
        if not isinstance(other, Biquaternion):
            return NotImplemented
        return Biquaternion(
            _quat_mul(self.real, other.real),
            tuple(x + y for x, y in zip(_quat_mul(self.real, other.dual),
                                        _quat_mul(self.dual, other.real))),
        )

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return self.scale(float(other))
        return NotImplemented

    def scale(self, c: float) -> "Biquaternion":
        return Biquaternion(tuple(c * x for x in self.real),
                            tuple(c * x for x in self.dual))

    def __add__(self, other):
        return Biquaternion(tuple(x + y for x, y in zip(self.real, other.real)),
                            tuple(x + y for x, y in zip(self.dual, other.dual)))

    def __sub__(self, other):
        return self + other.scale(-1.0)

    def conjugate(self) -> "Biquaternion":
        def conj(q):
            return (q[0], -q[1], -q[2], -q[3])
        return Biquaternion(conj(self.real), conj(self.dual))

    def close_to(self, other, tol: float = 1e-12) -> bool:
        return all(
            abs(x - y) <= tol
            for x, y in zip(self.real + self.dual, other.real + other.dual)
        )

    def __str__(self):
        def q_text(q):
            w, x, y, z = (float(c) for c in q)
            parts = [repr(w)]
            for c, unit in ((x, "i"), (y, "j"), (z, "k")):
                sign = " - " if c < 0 else " + "
                parts.append(f"{sign}{repr(abs(c))}{unit}")
            return "".join(parts)
        return f"({q_text(self.real)}) + ε({q_text(self.dual)})"


BQ_BASIS = ("1", "i", "j", "k", "eps", "epsi", "epsj", "epsk")

# even-subalgebra blade carried by each biquaternion unit, with the sign
# that makes the correspondence multiplicative both ways
_BQ_BLADES = (
    ("1", 1.0), ("e23", 1.0), ("e13", 1.0), ("e12", 1.0),
    ("e0123", -1.0), ("e01", 1.0), ("e02", -1.0), ("e03", 1.0),
)


def to_biquaternion(g: Multivector) -> Biquaternion:
    """Even element of the 3D dual algebra as a biquaternion."""
    alg = g.algebra
    _require_dual(alg)
    if alg.gens != 4:
        raise GeometryError("biquaternions pair with the 3D dual algebra")
    if any(k % 2 for k in g.grades_present()):
        raise GeometryError("only even multivectors map to biquaternions")
    coeffs = [g[name] * sign for name, sign in _BQ_BLADES]
    return Biquaternion.from_parts(coeffs[:4], coeffs[4:])


def from_biquaternion(alg: Algebra, bq: Biquaternion) -> Multivector:
    _require_dual(alg)
    if alg.gens != 4:
        raise GeometryError("biquaternions pair with the 3D dual algebra")
    out = np.zeros(alg.size)
    for (name, sign), c in zip(_BQ_BLADES, bq.real + bq.dual):
        out[alg.pos_of_name(name)] = sign * c
    return Multivector(alg, out)
