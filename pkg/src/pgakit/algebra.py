"""Graded Clifford algebras over small real signatures.

A basis blade is a bitmask: bit ``i`` set means generator ``e_i`` is a
factor.  The product of two blades is the XOR of their masks; its sign is
the parity of the generator transpositions needed to sort the
concatenation, times the metric square of every shared generator.  All
tables are built from integer arithmetic, so only multivector
coefficients are floating point.

Generators are laid out degenerate-first: a signature (p, q, r) squares
to ``[0]*r + [+1]*p + [-1]*q``, which puts the degenerate direction of a
euclidean (n, 0, 1) algebra on ``e0``.

Coefficients are stored densely, ordered by (grade, bitmask).  The text
form ``"1.5*e12 + 2.0*e0"`` round-trips exactly because coefficients are
printed with ``repr``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_GENERATORS = 6
ASSOC_CHECK_LIMIT = 5  # exhaustive triple check is cheap up to 2^5 blades


class GAError(Exception):
    """Base class for everything this package raises on purpose."""


class SignatureError(GAError):
    pass


class AlgebraMismatch(GAError):
    pass


def popcount(x: int) -> int:
    return bin(x).count("1")


def reorder_sign(a: int, b: int) -> int:
    """Sign from sorting the concatenation of two ascending blades.

    Counts, for every generator of ``a``, the generators of ``b`` it has
    to jump over; metric plays no part here.
    """
    a >>= 1
    swaps = 0
    while a:
        swaps += popcount(a & b)
        a >>= 1
    return 1 if swaps % 2 == 0 else -1


@dataclass(frozen=True)
class Signature:
    """Counts of generators squaring to +1, -1 and 0, plus orientation.

    ``orientation`` is bookkeeping only: "dual" marks an algebra whose
    1-vectors are hyperplanes, so the wedge of blades is an intersection
    rather than a span.  No arithmetic ever consults it.
    """

    p: int
    q: int = 0
    r: int = 0
    orientation: str = "standard"

    def __post_init__(self):
        if min(self.p, self.q, self.r) < 0:
            raise SignatureError("generator counts must be nonnegative")
        if self.dim > MAX_GENERATORS:
            raise SignatureError(
                f"{self.dim} generators exceeds the supported maximum of {MAX_GENERATORS}"
            )
        if self.orientation not in ("standard", "dual"):
            raise SignatureError(f"unknown orientation {self.orientation!r}")

    @property
    def dim(self) -> int:
        return self.p + self.q + self.r


class Algebra:
    """Multiplication tables and blade bookkeeping for one signature.

    Do not construct directly; ``build_algebra`` caches one instance per
    signature so multivectors can check identity with ``is``.
    """

    def __init__(self, signature: Signature):
        self.signature = signature
        d = signature.dim
        self.gens = d
        self.size = 1 << d
        self.metric = tuple([0] * signature.r + [1] * signature.p + [-1] * signature.q)

        masks = sorted(range(self.size), key=lambda m: (popcount(m), m))
        self.mask_of = tuple(masks)  # position -> bitmask
        self.pos_of = {m: i for i, m in enumerate(masks)}  # bitmask -> position
        self.grades = np.array([popcount(m) for m in masks], dtype=np.int8)
        self.names = tuple(self._name(m) for m in masks)

        self._build_tables()
        if d <= ASSOC_CHECK_LIMIT:
            self._check_associative()

    # -- construction of the integer tables ------------------------------

    def _name(self, mask: int) -> str:
        if mask == 0:
            return "1"
        return "e" + "".join(str(i) for i in range(self.gens) if mask >> i & 1)

    def _blade_product(self, a: int, b: int) -> tuple[int, int]:
        sign = reorder_sign(a, b)
        for i in range(self.gens):
            if a >> i & 1 and b >> i & 1:
                sign *= self.metric[i]
        return sign, a ^ b

    def _build_tables(self):
        n = self.size
        self.sign = np.zeros((n, n), dtype=np.int8)
        self.result = np.zeros((n, n), dtype=np.int32)
        self.outer_sign = np.zeros((n, n), dtype=np.int8)
        for i, a in enumerate(self.mask_of):
            for j, b in enumerate(self.mask_of):
                s, m = self._blade_product(a, b)
                self.sign[i, j] = s
                self.result[i, j] = self.pos_of[m]
                if a & b == 0:
                    self.outer_sign[i, j] = reorder_sign(a, b)

        k = self.grades.astype(np.int64)
        self.reverse_sign = np.where(k * (k - 1) // 2 % 2, -1, 1).astype(np.int8)
        self.involute_sign = np.where(k % 2, -1, 1).astype(np.int8)
        # positions are grade-sorted, so each grade occupies one slice
        self.grade_slice = []
        start = 0
        for g in range(self.gens + 1):
            count = sum(1 for x in self.grades if x == g)
            self.grade_slice.append(slice(start, start + count))
            start += count
        self._cayley = None  # dense 3D kernel, built on first use

    def _check_associative(self):
        n = self.size
        for i in range(n):
            for j in range(n):
                sij, pij = self.sign[i, j], self.result[i, j]
                for k in range(n):
                    left = sij * self.sign[pij, k]
                    sjk, pjk = self.sign[j, k], self.result[j, k]
                    right = sjk * self.sign[i, pjk]
                    if left != right or self.result[pij, k] != self.result[i, pjk]:
                        raise GAError(
                            f"product table not associative at blades {i},{j},{k}"
                        )

    @property
    def cayley(self) -> np.ndarray:
        """Dense (size, size, size) kernel for the einsum product path."""
        if self._cayley is None:
            c = np.zeros((self.size, self.size, self.size))
            for i in range(self.size):
                for j in range(self.size):
                    c[i, j, self.result[i, j]] = self.sign[i, j]
            self._cayley = c
        return self._cayley

    # -- multivector factories -------------------------------------------

    def zero(self) -> "Multivector":
        return Multivector(self, np.zeros(self.size))

    def scalar(self, value: float) -> "Multivector":
        c = np.zeros(self.size)
        c[0] = value
        return Multivector(self, c)

    def blade(self, name: str, coeff: float = 1.0) -> "Multivector":
        c = np.zeros(self.size)
        c[self.pos_of_name(name)] = coeff
        return Multivector(self, c)

    def basis_vector(self, i: int) -> "Multivector":
        if not 0 <= i < self.gens:
            raise GAError(f"no generator e{i} in a {self.gens}-generator algebra")
        return self.blade(f"e{i}")

    def from_coeffs(self, coeffs) -> "Multivector":
        c = np.asarray(coeffs, dtype=float)
        if c.shape != (self.size,):
            raise GAError(f"expected {self.size} coefficients, got {c.shape}")
        return Multivector(self, c.copy())

    def pseudoscalar(self) -> "Multivector":
        return self.blade(self.names[-1])

    def pos_of_name(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise GAError(f"no blade named {name!r} in this algebra") from None

    def basis_blades(self, grade: int | None = None) -> list[str]:
        if grade is None:
            return list(self.names)
        return [n for n, g in zip(self.names, self.grades) if g == grade]

    # -- text form --------------------------------------------------------

    _TERM = re.compile(
        r"(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)(?:\s*\*\s*(?P<blade>e\d+))?"
        r"|(?P<lone>e\d+))"
    )

    def parse(self, text: str) -> "Multivector":
        """Inverse of ``str(mv)``; also accepts '-' separators and bare blades."""
        c = np.zeros(self.size)
        pos, n = 0, len(text)
        seen = False
        while True:
            while pos < n and text[pos].isspace():
                pos += 1
            if pos >= n:
                break
            sign = 1.0
            if text[pos] in "+-":
                # separator, optionally followed by the term's own sign
                for _ in range(2):
                    if pos < n and text[pos] in "+-":
                        if text[pos] == "-":
                            sign = -sign
                        pos += 1
                        while pos < n and text[pos].isspace():
                            pos += 1
            elif seen:
                raise GAError(f"expected '+' or '-' at column {pos} of {text!r}")
            m = self._TERM.match(text, pos)
            if not m:
                raise GAError(f"cannot parse term at column {pos} of {text!r}")
            if m.group("lone"):
                value, name = sign, m.group("lone")
            elif m.group("blade"):
                value, name = sign * float(m.group("num")), m.group("blade")
            else:
                value, name = sign * float(m.group("num")), None
            if name is None:
                c[0] += value
            else:
                canon, flip = self._canonical_name(name)
                c[self.pos_of_name(canon)] += value * flip
            pos = m.end()
            seen = True
        if not seen:
            raise GAError(f"empty multivector text {text!r}")
        return Multivector(self, c)

    def _canonical_name(self, name: str) -> tuple[str, int]:
        digits = [int(ch) for ch in name[1:]]
        if any(i >= self.gens for i in digits):
            raise GAError(f"blade {name!r} uses generators outside this algebra")
        if len(set(digits)) != len(digits):
            raise GAError(f"blade {name!r} repeats a generator")
        sign = 1
        ds = list(digits)
        for i in range(len(ds)):  # bubble sort, one transposition per swap
            for j in range(len(ds) - 1 - i):
                if ds[j] > ds[j + 1]:
                    ds[j], ds[j + 1] = ds[j + 1], ds[j]
                    sign = -sign
        return "e" + "".join(map(str, ds)), sign

    def __repr__(self):
        s = self.signature
        tag = "dual " if s.orientation == "dual" else ""
        return f"Algebra({tag}{s.p},{s.q},{s.r})"


@lru_cache(maxsize=None)
def build_algebra(signature: Signature) -> Algebra:
    return Algebra(signature)


def pga(n: int) -> Algebra:
    """Euclidean plane-based algebra: 1-vectors are hyperplanes."""
    if n not in (2, 3):
        raise SignatureError("euclidean dimension must be 2 or 3")
    return build_algebra(Signature(n, 0, 1, orientation="dual"))


def cga(n: int = 3) -> Algebra:
    """Conformal algebra over euclidean n-space, point-based."""
    return build_algebra(Signature(n + 1, 1, 0, orientation="standard"))


class Multivector:
    """A dense element of one :class:`Algebra`.

    Operators: ``*`` geometric product, ``^`` outer, ``|`` left
    contraction, ``&`` regressive join, ``~`` reverse.  ``+``/``-`` and
    scalar scaling behave linearly.  Instances are value-like: all
    operations return new objects.
    """

    __slots__ = ("algebra", "coeffs")

    def __init__(self, algebra: Algebra, coeffs: np.ndarray):
        self.algebra = algebra
        self.coeffs = coeffs

    # -- linear structure --------------------------------------------------

    def _peer(self, other) -> "Multivector":
        if not isinstance(other, Multivector):
            raise TypeError(f"expected Multivector, got {type(other).__name__}")
        if other.algebra is not self.algebra:
            raise AlgebraMismatch("operands live in different algebras")
        return other

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = self.algebra.scalar(other)
        return Multivector(self.algebra, self.coeffs + self._peer(other).coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            other = self.algebra.scalar(other)
        return Multivector(self.algebra, self.coeffs - self._peer(other).coeffs)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __neg__(self):
        return Multivector(self.algebra, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Multivector(self.algebra, self.coeffs * float(other))
        return self.gp(self._peer(other))

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return Multivector(self.algebra, self.coeffs * float(other))
        return NotImplemented

    def __truediv__(self, scalar):
        return Multivector(self.algebra, self.coeffs / float(scalar))

    # -- products ----------------------------------------------------------

    def gp(self, other: "Multivector") -> "Multivector":
        """Geometric product via the integer tables.

        Iterates nonzero coefficient pairs in position order, which keeps
        results deterministic run to run.
        """
        other = self._peer(other)
        alg = self.algebra
        out = np.zeros(alg.size)
        a, b = self.coeffs, other.coeffs
        bi = np.flatnonzero(b)
        if bi.size == 0:
            return Multivector(alg, out)
        bv = b[bi]
        for i in np.flatnonzero(a):
            # result masks are distinct for fixed i, so fancy += is safe
            out[alg.result[i, bi]] += a[i] * alg.sign[i, bi] * bv
        return Multivector(alg, out)

    def gp_dense(self, other: "Multivector") -> "Multivector":
        """Same product through the dense einsum kernel (bench path)."""
        other = self._peer(other)
        alg = self.algebra
        return Multivector(
            alg, np.einsum("i,ijk,j->k", self.coeffs, alg.cayley, other.coeffs)
        )

    def outer(self, other: "Multivector") -> "Multivector":
        other = self._peer(other)
        alg = self.algebra
        out = np.zeros(alg.size)
        a, b = self.coeffs, other.coeffs
        bi = np.flatnonzero(b)
        if bi.size == 0:
            return Multivector(alg, out)
        bv = b[bi]
        for i in np.flatnonzero(a):
            out[alg.result[i, bi]] += a[i] * alg.outer_sign[i, bi] * bv
        return Multivector(alg, out)

    def left_contract(self, other: "Multivector") -> "Multivector":
        """Lower-onto-higher inner product: grade k-j part of each blade pair."""
        other = self._peer(other)
        alg = self.algebra
        out = np.zeros(alg.size)
        a, b = self.coeffs, other.coeffs
        ga, gr = alg.grades, alg.result
        bi = np.flatnonzero(b)
        if bi.size == 0:
            return Multivector(alg, out)
        for i in np.flatnonzero(a):
            keep = ga[gr[i, bi]] == ga[bi] - ga[i]
            sel = bi[keep]
            if sel.size:
                out[gr[i, sel]] += a[i] * alg.sign[i, sel] * b[sel]
        return Multivector(alg, out)

    def commutator(self, other: "Multivector") -> "Multivector":
        other = self._peer(other)
        return (self.gp(other) - other.gp(self)) * 0.5

    def __xor__(self, other):
        return self.outer(other)

    def __or__(self, other):
        return self.left_contract(other)

    def __and__(self, other):
        from . import duality

        return duality.join(self, other)

    # -- involutions and grade parts ----------------------------------------

    def reverse(self) -> "Multivector":
        return Multivector(self.algebra, self.coeffs * self.algebra.reverse_sign)

    def __invert__(self):
        return self.reverse()

    def involute(self) -> "Multivector":
        return Multivector(self.algebra, self.coeffs * self.algebra.involute_sign)

    def grade(self, k: int) -> "Multivector":
        if not 0 <= k <= self.algebra.gens:
            raise GAError(f"grade {k} out of range for this algebra")
        out = np.zeros(self.algebra.size)
        sl = self.algebra.grade_slice[k]
        out[sl] = self.coeffs[sl]
        return Multivector(self.algebra, out)

    def grades_present(self, tol: float = 0.0) -> tuple[int, ...]:
        present = []
        for g in range(self.algebra.gens + 1):
            sl = self.algebra.grade_slice[g]
            if np.any(np.abs(self.coeffs[sl]) > tol):
                present.append(g)
        return tuple(present)

    # -- inspection ----------------------------------------------------------

    def scalar_part(self) -> float:
        return float(self.coeffs[0])

    def __getitem__(self, blade_name: str) -> float:
        return float(self.coeffs[self.algebra.pos_of_name(blade_name)])

    def norm(self) -> float:
        """Plain coefficient 2-norm; metric-blind, used for residual checks."""
        return float(np.linalg.norm(self.coeffs))

    def is_zero(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.coeffs) <= tol))

    def close_to(self, other: "Multivector", tol: float = 1e-12) -> bool:
        other = self._peer(other)
        return bool(np.all(np.abs(self.coeffs - other.coeffs) <= tol))

    def __eq__(self, other):
        if not isinstance(other, Multivector):
            return NotImplemented
        return self.algebra is other.algebra and np.array_equal(
            self.coeffs, other.coeffs
        )

    __hash__ = None

    def __str__(self):
        parts = []
        for c, name in zip(self.coeffs, self.algebra.names):
            if c == 0.0:
                continue
            c = float(c)
            sep = " - " if c < 0 and parts else (" + " if parts else "")
            mag = repr(abs(c)) if parts else repr(c)
            parts.append(sep + (mag if name == "1" else f"{mag}*{name}"))
        return "".join(parts) if parts else "0"

    def __repr__(self):
        return f"<{self.algebra!r} {self}>"
