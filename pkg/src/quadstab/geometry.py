"""Intersection theory and line-bundle cohomology on X = P(O + O(a,b)) over P^1 x P^1.

The threefold is fibered over the quadric surface E = P^1 x P^1.  Divisor
classes are written in the basis H (relative O(1) of the fibration), h and k
(pullbacks of the two rulings of E).  The Chow ring is

    h^2 = k^2 = 0,      H^2 = -a*H*h - b*H*k,      deg(H*h*k) = 1,

with all coefficients exact rationals.  The default twist (a, b) = (-1, -1)
is the blow-up of the quadric threefold with one ordinary double point; there
the exceptional divisor class is H - h - k and the canonical class is
-2H - h - k.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Optional

Q = Fraction


class GeometryError(Exception):
    pass


@dataclass(frozen=True)
class GeometryConfig:
    """Twist (a, b) of the bundle O + O(a, b) defining the threefold."""

    a: int = -1
    b: int = -1

    @property
    def twist(self) -> tuple[int, int]:
        return (self.a, self.b)


@dataclass(frozen=True)
class DivisorClass:
    """Integer divisor class nH*H + nh*h + nk*k on the threefold."""

    nH: int = 0
    nh: int = 0
    nk: int = 0

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        return DivisorClass(self.nH + other.nH, self.nh + other.nh, self.nk + other.nk)

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        return DivisorClass(self.nH - other.nH, self.nh - other.nh, self.nk - other.nk)

    def __neg__(self) -> "DivisorClass":
        return DivisorClass(-self.nH, -self.nh, -self.nk)

    def __str__(self) -> str:
        parts = []
        for coeff, sym in ((self.nH, "H"), (self.nh, "h"), (self.nk, "k")):
            if coeff == 0:
                continue
            mag = "" if abs(coeff) == 1 else str(abs(coeff))
            parts.append(("-" if coeff < 0 else ("+" if parts else "")) + mag + sym)
        return "".join(parts) if parts else "0"


ZERO_DIVISOR = DivisorClass(0, 0, 0)


@dataclass(frozen=True)
class SurfaceDivisor:
    """Divisor class of O_E(d, e) on the quadric surface E."""

    d: int = 0
    e: int = 0

    def __add__(self, other: "SurfaceDivisor") -> "SurfaceDivisor":
        return SurfaceDivisor(self.d + other.d, self.e + other.e)

    def __sub__(self, other: "SurfaceDivisor") -> "SurfaceDivisor":
        return SurfaceDivisor(self.d - other.d, self.e - other.e)

    def __neg__(self) -> "SurfaceDivisor":
        return SurfaceDivisor(-self.d, -self.e)

    def __str__(self) -> str:
        return f"({self.d},{self.e})"


@dataclass(frozen=True)
class ChowElement:
    """Graded class c0 + c1 + c2 + c3 with the ring relations already applied.

    c1 is (H, h, k) coefficients, c2 is (H*h, H*k, h*k) coefficients and c3 is
    the coefficient of the point class H*h*k.  The representation is unique.
    """

    c0: Q = Q(0)
    c1: tuple[Q, Q, Q] = (Q(0), Q(0), Q(0))
    c2: tuple[Q, Q, Q] = (Q(0), Q(0), Q(0))
    c3: Q = Q(0)

    def __add__(self, other: "ChowElement") -> "ChowElement":
        return ChowElement(
            self.c0 + other.c0,
            tuple(x + y for x, y in zip(self.c1, other.c1)),
            tuple(x + y for x, y in zip(self.c2, other.c2)),
            self.c3 + other.c3,
        )

    def __sub__(self, other: "ChowElement") -> "ChowElement":
        return self + (-other)

    def __neg__(self) -> "ChowElement":
        return self.scale(-1)

    def scale(self, t) -> "ChowElement":
        t = Q(t)
        return ChowElement(
            self.c0 * t,
            tuple(x * t for x in self.c1),
            tuple(x * t for x in self.c2),
            self.c3 * t,
        )

    def dual(self) -> "ChowElement":
        """Negate the odd-degree parts (the Chern-character dual)."""
        return ChowElement(self.c0, tuple(-x for x in self.c1), self.c2, -self.c3)

    def is_zero(self) -> bool:
        return (
            self.c0 == 0
            and all(x == 0 for x in self.c1)
            and all(x == 0 for x in self.c2)
            and self.c3 == 0
        )

    def as_tuple(self) -> tuple[Q, ...]:
        return (self.c0, *self.c1, *self.c2, self.c3)

    @staticmethod
    def constant(t) -> "ChowElement":
        return ChowElement(c0=Q(t))

    @staticmethod
    def of_divisor(D: DivisorClass) -> "ChowElement":
        return ChowElement(c1=(Q(D.nH), Q(D.nh), Q(D.nk)))

    def __str__(self) -> str:
        return (
            f"{self.c0} + ({self.c1[0]})H+({self.c1[1]})h+({self.c1[2]})k"
            f" + ({self.c2[0]})Hh+({self.c2[1]})Hk+({self.c2[2]})hk + ({self.c3})pt"
        )


ONE = ChowElement.constant(1)


class GradedDims:
    """Finite map degree -> dimension of a graded vector space.

    Zero dimensions are never stored; the empty map is the zero space.
    """

    __slots__ = ("_pairs",)

    def __init__(self, data: Optional[Mapping[int, int]] = None):
        pairs = []
        for deg, dim in sorted((data or {}).items()):
            if dim < 0:
                raise GeometryError(f"negative dimension {dim} in degree {deg}")
            if dim:
                pairs.append((int(deg), int(dim)))
        self._pairs = tuple(pairs)

    @staticmethod
    def zero() -> "GradedDims":
        return GradedDims()

    @staticmethod
    def single(deg: int, dim: int = 1) -> "GradedDims":
        return GradedDims({deg: dim})

    def items(self):
        return self._pairs

    def degrees(self) -> tuple[int, ...]:
        return tuple(deg for deg, _ in self._pairs)

    def get(self, deg: int) -> int:
        for d, v in self._pairs:
            if d == deg:
                return v
        return 0

    def is_zero(self) -> bool:
        return not self._pairs

    def euler(self) -> int:
        return sum(v if d % 2 == 0 else -v for d, v in self._pairs)

    def translate(self, t: int) -> "GradedDims":
        return GradedDims({d + t: v for d, v in self._pairs})

    def dual(self, n: int) -> "GradedDims":
        """Dims of the dual space placed so degree i maps to n - i."""
        return GradedDims({n - d: v for d, v in self._pairs})

    def __add__(self, other: "GradedDims") -> "GradedDims":
        out = {d: v for d, v in self._pairs}
        for d, v in other._pairs:
            out[d] = out.get(d, 0) + v
        return GradedDims(out)

    def __eq__(self, other) -> bool:
        return isinstance(other, GradedDims) and self._pairs == other._pairs

    def __hash__(self) -> int:
        return hash(self._pairs)

    def __str__(self) -> str:
        return "{" + ", ".join(f"{d}: {v}" for d, v in self._pairs) + "}"

    def __repr__(self) -> str:
        return f"GradedDims({dict(self._pairs)})"


def _p1_cohomology(n: int) -> dict[int, int]:
    """Cohomology dimensions of O(n) on P^1."""
    if n >= 0:
        return {0: n + 1}
    if n <= -2:
        return {1: -n - 1}
    return {}


class Geometry:
    """All intersection-theoretic and cohomological operations for one twist."""

    def __init__(self, config: GeometryConfig = GeometryConfig()):
        self.config = config
        self._chern_cache: dict[DivisorClass, ChowElement] = {}
        self._todd: Optional[ChowElement] = None

    # -- Chow ring ---------------------------------------------------------

    def chow_mul(self, x: ChowElement, y: ChowElement) -> ChowElement:
        a, b = self.config.a, self.config.b
        xH, xh, xk = x.c1
        yH, yh, yk = y.c1

        c0 = x.c0 * y.c0

        c1 = (
            x.c0 * yH + xH * y.c0,
            x.c0 * yh + xh * y.c0,
            x.c0 * yk + xk * y.c0,
        )

        # degree-1 x degree-1 products, using H^2 = -a*Hh - b*Hk, h^2 = k^2 = 0
        c2 = (
            x.c0 * y.c2[0] + x.c2[0] * y.c0 + xH * yh + xh * yH - a * xH * yH,
            x.c0 * y.c2[1] + x.c2[1] * y.c0 + xH * yk + xk * yH - b * xH * yH,
            x.c0 * y.c2[2] + x.c2[2] * y.c0 + xh * yk + xk * yh,
        )

        def point_part(u1, v2) -> Q:
            # degree-1 times degree-2, using H*Hh = -b*pt, H*Hk = -a*pt,
            # H*hk = h*Hk = k*Hh = pt and all other products zero.
            uH, uh, uk = u1
            vHh, vHk, vhk = v2
            return uH * (-b * vHh - a * vHk + vhk) + uh * vHk + uk * vHh

        c3 = (
            x.c0 * y.c3
            + x.c3 * y.c0
            + point_part(x.c1, y.c2)
            + point_part(y.c1, x.c2)
        )
        return ChowElement(c0, c1, c2, c3)

    def degree(self, x: ChowElement) -> Q:
        return x.c3

    # -- distinguished classes ----------------------------------------------

    def canonical_class(self) -> DivisorClass:
        a, b = self.config.a, self.config.b
        return DivisorClass(-2, -(a + 2), -(b + 2))

    def exceptional_divisor_class(self) -> DivisorClass:
        a, b = self.config.a, self.config.b
        return DivisorClass(1, a, b)

    def restrict_to_E(self, D: DivisorClass) -> SurfaceDivisor:
        # H restricts trivially to the surface; h, k restrict to the rulings.
        return SurfaceDivisor(D.nh, D.nk)

    # -- characteristic classes ----------------------------------------------

    def chern_character(self, D: DivisorClass) -> ChowElement:
        cached = self._chern_cache.get(D)
        if cached is not None:
            return cached
        d = ChowElement.of_divisor(D)
        d2 = self.chow_mul(d, d)
        d3 = self.chow_mul(d2, d)
        out = ONE + d + d2.scale(Q(1, 2)) + d3.scale(Q(1, 6))
        self._chern_cache[D] = out
        return out

    def todd_class(self) -> ChowElement:
        if self._todd is not None:
            return self._todd
        a, b = self.config.a, self.config.b
        t1 = ChowElement.of_divisor(DivisorClass(2, a, b))
        fh = ChowElement.of_divisor(DivisorClass(0, 2, 0))
        fk = ChowElement.of_divisor(DivisorClass(0, 0, 2))
        # total Chern class of the tangent bundle: (1 + t1)(1 + 2h)(1 + 2k)
        total = self.chow_mul(self.chow_mul(ONE + t1, ONE + fh), ONE + fk)
        c1 = ChowElement(c1=total.c1)
        c2 = ChowElement(c2=total.c2)
        c1sq = self.chow_mul(c1, c1)
        c1c2 = self.chow_mul(c1, c2)
        td = (
            ONE
            + c1.scale(Q(1, 2))
            + (c1sq + c2).scale(Q(1, 12))
            + c1c2.scale(Q(1, 24))
        )
        self._todd = td
        return td

    # -- cohomology ----------------------------------------------------------

    @staticmethod
    def surface_cohomology(s: SurfaceDivisor) -> GradedDims:
        dims: dict[int, int] = {}
        for i, di in _p1_cohomology(s.d).items():
            for j, dj in _p1_cohomology(s.e).items():
                dims[i + j] = dims.get(i + j, 0) + di * dj
        return GradedDims(dims)

    def pushforward_decomposition(
        self, D: DivisorClass
    ) -> tuple[Optional[int], list[SurfaceDivisor]]:
        """Decompose the derived pushforward of O(D) along the P^1-fibration.

        Returns (level, summands): level 0 for an honest pushforward, 1 for a
        first derived functor, None when the pushforward vanishes.
        """
        a, b = self.config.a, self.config.b
        n = D.nH
        if n >= 0:
            return 0, [SurfaceDivisor(D.nh - i * a, D.nk - i * b) for i in range(n + 1)]
        if n == -1:
            return None, []
        return 1, [SurfaceDivisor(D.nh + j * a, D.nk + j * b) for j in range(1, -n)]

    def threefold_cohomology(self, D: DivisorClass) -> GradedDims:
        level, summands = self.pushforward_decomposition(D)
        if level is None:
            return GradedDims.zero()
        out = GradedDims.zero()
        for s in summands:
            out = out + self.surface_cohomology(s)
        return out.translate(level)

    # -- Riemann-Roch ---------------------------------------------------------

    def hrr_euler(self, x: ChowElement, y: ChowElement) -> Q:
        return self.degree(self.chow_mul(self.chow_mul(x.dual(), y), self.todd_class()))


@lru_cache(maxsize=None)
def geometry_for(a: int, b: int) -> Geometry:
    """Shared Geometry instance per twist (cohomology caches are reused)."""
    return Geometry(GeometryConfig(a, b))
