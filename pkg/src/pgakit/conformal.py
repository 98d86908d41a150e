"""Null-cone embedding of euclidean space, used as an independent check.

Two extra generators ride along with the euclidean three: e3 squares to
+1 and e4 to -1.  Their null mixtures

    n_o = (e4 - e3) / 2        n_inf = e3 + e4

pair to n_o . n_inf = -1, and a euclidean position x embeds on the
paraboloid cross-section of the null cone:

    up(x) = n_o + x + (1/2) |x|^2 n_inf

The scale convention here is up(x) . up(y) = -(1/2) |x - y|^2, so
distances come back as sqrt(-2 <pq>).  Everything in this module works
from that pairing alone; nothing imports the dual-algebra machinery
except flat_rep, which samples points off a degenerate-model flat to
rebuild it as an outer product here.
"""

from __future__ import annotations

import math

import numpy as np

from .algebra import Algebra, Multivector, cga
from .euclid import GeometryError

NULL_TOL = 1e-12
PAIRING_TOL = 1e-9


def _require_conformal(alg: Algebra):
    sig = alg.signature
    if sig.orientation != "standard" or sig.q != 1 or sig.r != 0:
        raise GeometryError("needs a conformal (p,1,0) algebra")


def _euclid_dim(alg: Algebra) -> int:
    _require_conformal(alg)
    return alg.gens - 2


def n_origin(alg: Algebra) -> Multivector:
    _require_conformal(alg)
    plus, minus = alg.gens - 2, alg.gens - 1
    return (alg.basis_vector(minus) - alg.basis_vector(plus)) * 0.5


def n_infinity(alg: Algebra) -> Multivector:
    _require_conformal(alg)
    plus, minus = alg.gens - 2, alg.gens - 1
    return alg.basis_vector(plus) + alg.basis_vector(minus)


def euclidean_vector(alg: Algebra, coords) -> Multivector:
    n = _euclid_dim(alg)
    c = np.asarray(coords, dtype=float)
    if c.shape != (n,):
        raise GeometryError(f"expected {n} coordinates, got {c.shape}")
    out = np.zeros(alg.size)
    for i, ci in enumerate(c):
        out[alg.pos_of_name(f"e{i}")] = ci
    return Multivector(alg, out)


def up(alg: Algebra, *coords) -> Multivector:
    """Null point for a euclidean position, n_inf pairing normalized to -1."""
    if len(coords) == 1 and np.ndim(coords[0]) == 1:
        coords = tuple(coords[0])
    x = euclidean_vector(alg, coords)
    sq = sum(float(c) ** 2 for c in coords)
    return n_origin(alg) + x + n_infinity(alg) * (0.5 * sq)


def infinity_pairing(p: Multivector) -> float:
    return p.gp(n_infinity(p.algebra)).scalar_part()


def is_null(p: Multivector, tol: float = NULL_TOL) -> bool:
    return abs(p.gp(p).scalar_part()) <= tol * max(1.0, p.norm() ** 2)


def down(p: Multivector) -> np.ndarray:
    """Euclidean coordinates of a (possibly unnormalized) null point."""
    alg = p.algebra
    n = _euclid_dim(alg)
    w = -infinity_pairing(p)
    if abs(w) <= PAIRING_TOL * max(1.0, p.norm()):
        raise GeometryError("point at infinity has no euclidean coordinates")
    return np.array([p[f"e{i}"] / w for i in range(n)])


def cga_distance(p: Multivector, q: Multivector) -> float:
    """Euclidean distance via the inner product of normalized null points."""
    p._peer(q)
    for name, x in (("p", p), ("q", q)):
        if not is_null(x, tol=PAIRING_TOL):
            raise GeometryError(f"{name} is not a null point")
        if abs(infinity_pairing(x) + 1.0) > PAIRING_TOL:
            raise GeometryError(f"{name} must be normalized against n_inf")
    return math.sqrt(max(0.0, -2.0 * p.gp(q).scalar_part()))


def rotor(alg: Algebra, axis, angle: float) -> Multivector:
    """Rotation versor about an axis through the origin, right-handed."""
    u = np.asarray(axis, dtype=float)
    nu = float(np.linalg.norm(u))
    if nu == 0.0:
        raise GeometryError("axis direction must be nonzero")
    n = _euclid_dim(alg)
    if n != 3:
        raise GeometryError("axis rotations need three euclidean generators")
    volume = alg.blade("e012")
    plane = volume.gp(euclidean_vector(alg, u / nu))
    half = 0.5 * float(angle)
    return alg.scalar(math.cos(half)) - plane * math.sin(half)


def translator(alg: Algebra, offset) -> Multivector:
    """Translation versor 1 - (1/2) t n_inf."""
    t = euclidean_vector(alg, offset)
    return alg.scalar(1.0) - t.gp(n_infinity(alg)) * 0.5


def flat_rep(x: Multivector) -> Multivector:
    """Conformal blade of a degenerate-model flat: representative points
    sent through up() and wedged with n_inf.

    The output is determined by the flat only up to scale; the sampling
    (foot of the origin perpendicular, unit steps along the flat) is
    deterministic so repeated calls agree exactly.
    """
    from . import euclid

    alg_in = x.algebra
    n = euclid.euclidean_dim(alg_in)
    if n != 3:
        raise GeometryError("flat_rep bridges the 3D algebras")
    out = cga(3)
    ninf = n_infinity(out)
    if euclid.is_ideal(x):
        raise GeometryError("ideal flats lie outside the embedding")
    kind = euclid.flat_kind(x)
    if kind == "point":
        return up(out, euclid.point_coords(x)) ^ ninf
    if kind == "line":
        foot = (x | euclid.origin(alg_in)) ^ x
        a = euclid.point_coords(foot)
        u = euclid.direction(x)
        u = u / np.linalg.norm(u)
        return up(out, a) ^ up(out, a + u) ^ ninf
    if kind == "plane":
        pl = euclid.normalize(x)
        normal = np.array([pl["e1"], pl["e2"], pl["e3"]])
        base = -pl["e0"] * normal
        seed = np.array([1.0, 0.0, 0.0])
        if abs(normal[0]) > 0.9:
            seed = np.array([0.0, 1.0, 0.0])
        t1 = seed - np.dot(seed, normal) * normal
        t1 /= np.linalg.norm(t1)
        t2 = np.cross(normal, t1)
        return (up(out, base) ^ up(out, base + t1)
                ^ up(out, base + t2) ^ ninf)
    raise GeometryError(f"no conformal representation for a {kind} input")
