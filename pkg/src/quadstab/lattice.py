"""Numerical K-theory as an integer lattice of rank 8 with the Euler pairing.

K-theory classes are represented by their Chern characters (exact rationals).
A class is valid when it is an integer combination of the eight line bundles
O, O(h), O(k), O(h+k), O(H), O(H+h), O(H+k), O(H+h+k); those coordinates are
the fixed integral basis for all lattice computations.  Sublattices are kept
in Hermite normal form, quotients are computed by Smith normal form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .geometry import (
    ChowElement,
    DivisorClass,
    Geometry,
    SurfaceDivisor,
    Q,
)


class LatticeError(Exception):
    pass


# ---------------------------------------------------------------------------
# exact linear algebra helpers
# ---------------------------------------------------------------------------


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x, nx, y, ny, g, ng = 1, 0, 0, 1, a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    return x, y, g


def rational_inverse(matrix: Sequence[Sequence[Q]]) -> list[list[Q]]:
    """Invert a square matrix over the rationals by Gaussian elimination."""
    n = len(matrix)
    aug = [[Q(v) for v in row] + [Q(1) if i == j else Q(0) for j in range(n)]
           for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise LatticeError("matrix is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def rational_determinant(matrix: Sequence[Sequence[Q]]) -> Q:
    n = len(matrix)
    m = [[Q(v) for v in row] for row in matrix]
    det = Q(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Q(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n):
            if m[r][col] != 0:
                f = m[r][col] * inv
                m[r] = [v - f * w for v, w in zip(m[r], m[col])]
    return det


def solve_rational(matrix: Sequence[Sequence[Q]], rhs: Sequence[Q]) -> Optional[list[Q]]:
    """Solve x * matrix = rhs for a row vector x (matrix rows = generators).

    Returns None when the system has no solution.  The matrix may have more
    columns than rows; all equations are verified against the solution.
    """
    rows = [list(map(Q, r)) for r in matrix]
    m = len(rows)
    if m == 0:
        return [] if all(v == 0 for v in rhs) else None
    n = len(rows[0])
    # Gaussian elimination on the transposed system matrix^T * x^T = rhs^T.
    aug = [[rows[r][c] for r in range(m)] + [Q(rhs[c])] for c in range(n)]
    pivots: list[tuple[int, int]] = []
    row = 0
    for col in range(m):
        pivot = next((r for r in range(row, n) if aug[r][col] != 0), None)
        if pivot is None:
            continue
        aug[row], aug[pivot] = aug[pivot], aug[row]
        inv = 1 / aug[row][col]
        aug[row] = [v * inv for v in aug[row]]
        for r in range(n):
            if r != row and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[row])]
        pivots.append((row, col))
        row += 1
        if row == n:
            break
    for r in range(row, n):
        if aug[r][m] != 0:
            return None
    x = [Q(0)] * m
    for r, c in pivots:
        x[c] = aug[r][m]
    # verify (guards the case row == n with unused equations)
    for c in range(n):
        if sum(x[r] * rows[r][c] for r in range(m)) != rhs[c]:
            return None
    return x


def hnf_with_transform(rows: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[list[int]]]:
    """Row Hermite normal form H of the matrix, with unimodular U, U*M = H'.

    H is returned without its zero rows; U is square of size len(rows) and
    its trailing rows span the left kernel.
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    a = [list(map(int, r)) for r in rows]
    u = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    row = 0
    for col in range(n):
        pivot = None
        for r in range(row, m):
            if a[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            continue
        a[row], a[pivot] = a[pivot], a[row]
        u[row], u[pivot] = u[pivot], u[row]
        for r in range(row + 1, m):
            while a[r][col] != 0:
                if abs(a[row][col]) > abs(a[r][col]):
                    a[row], a[r] = a[r], a[row]
                    u[row], u[r] = u[r], u[row]
                q = a[r][col] // a[row][col]
                a[r] = [v - q * w for v, w in zip(a[r], a[row])]
                u[r] = [v - q * w for v, w in zip(u[r], u[row])]
        if a[row][col] < 0:
            a[row] = [-v for v in a[row]]
            u[row] = [-v for v in u[row]]
        for r in range(row):
            q = a[r][col] // a[row][col]
            if q:
                a[r] = [v - q * w for v, w in zip(a[r], a[row])]
                u[r] = [v - q * w for v, w in zip(u[r], u[row])]
        row += 1
        if row == m:
            break
    return [a[r] for r in range(row)], u


def integer_kernel(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Basis of {x : x * M = 0} for row vectors x over the integers."""
    m = len(rows)
    if m == 0:
        return []
    h, u = hnf_with_transform(rows)
    return [u[r] for r in range(len(h), m)]


def smith_normal_form(
    rows: Sequence[Sequence[int]],
) -> tuple[list[int], list[list[int]], list[list[int]]]:
    """Invariant factors of the matrix plus unimodular U, V with U*M*V diagonal."""
    a = [list(map(int, r)) for r in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    u = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    v = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def addmul_row(dst, src, q):
        a[dst] = [x - q * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x - q * y for x, y in zip(u[dst], u[src])]

    def addmul_col(dst, src, q):
        for row in a:
            row[dst] -= q * row[src]
        for row in v:
            row[dst] -= q * row[src]

    t = 0
    while t < min(m, n):
        pivot = None
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j] != 0 and (best is None or abs(a[i][j]) < best):
                    best = abs(a[i][j])
                    pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, m):
                if a[i][t] % a[t][t] != 0:
                    addmul_row(i, t, a[i][t] // a[t][t])
                    swap_rows(t, i)
                    dirty = True
            for i in range(t + 1, m):
                if a[i][t]:
                    addmul_row(i, t, a[i][t] // a[t][t])
            for j in range(t + 1, n):
                if a[t][j] % a[t][t] != 0:
                    addmul_col(j, t, a[t][j] // a[t][t])
                    swap_cols(t, j)
                    dirty = True
            for j in range(t + 1, n):
                if a[t][j]:
                    addmul_col(j, t, a[t][j] // a[t][t])
        # enforce divisibility d_t | a[i][j] for the trailing block
        stray = None
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if a[i][j] % a[t][t] != 0:
                    stray = i
                    break
            if stray is not None:
                break
        if stray is not None:
            # pull the offending row into the pivot row; the next round of
            # column reduction replaces the pivot by a proper divisor
            addmul_row(t, stray, -1)
            continue
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    invariants = [a[i][i] for i in range(min(m, n)) if a[i][i] != 0]
    return invariants, u, v


# ---------------------------------------------------------------------------
# K-theory classes
# ---------------------------------------------------------------------------

SOD1_DIVISORS: tuple[DivisorClass, ...] = (
    DivisorClass(0, 0, 0),
    DivisorClass(0, 1, 0),
    DivisorClass(0, 0, 1),
    DivisorClass(0, 1, 1),
    DivisorClass(1, 0, 0),
    DivisorClass(1, 1, 0),
    DivisorClass(1, 0, 1),
    DivisorClass(1, 1, 1),
)


@dataclass(frozen=True)
class KClass:
    """A numerical K-theory class represented by its Chern character."""

    chern: ChowElement

    def __add__(self, other: "KClass") -> "KClass":
        return KClass(self.chern + other.chern)

    def __sub__(self, other: "KClass") -> "KClass":
        return KClass(self.chern - other.chern)

    def __neg__(self) -> "KClass":
        return KClass(-self.chern)

    def scale(self, t: int) -> "KClass":
        return KClass(self.chern.scale(t))

    def rank(self) -> Q:
        return self.chern.c0

    def is_zero(self) -> bool:
        return self.chern.is_zero()


class KTheory:
    """Euler-pairing arithmetic over the rank-8 numerical K-theory lattice."""

    def __init__(self, geometry: Geometry):
        self.geometry = geometry
        self._basis_inverse: Optional[list[list[Q]]] = None

    # -- constructors --------------------------------------------------------

    def line_class(self, D: DivisorClass) -> KClass:
        return KClass(self.geometry.chern_character(D))

    def pushforward_class(self, beta: SurfaceDivisor) -> KClass:
        """Class of the surface sheaf O_E(beta) pushed into the threefold."""
        g = self.geometry
        lift = DivisorClass(0, beta.d, beta.e)
        E = g.exceptional_divisor_class()
        return KClass(g.chern_character(lift) - g.chern_character(lift - E))

    def unit(self) -> KClass:
        return self.line_class(DivisorClass(0, 0, 0))

    def tensor_line(self, x: KClass, D: DivisorClass) -> KClass:
        return KClass(self.geometry.chow_mul(x.chern, self.geometry.chern_character(D)))

    # -- pairing and Serre twist ----------------------------------------------

    def euler_pairing(self, x: KClass, y: KClass) -> int:
        value = self.geometry.hrr_euler(x.chern, y.chern)
        if value.denominator != 1:
            raise LatticeError(f"Euler pairing is not an integer: {value}")
        return int(value)

    def serre_class(self, x: KClass) -> KClass:
        omega = self.geometry.chern_character(self.geometry.canonical_class())
        return KClass(-self.geometry.chow_mul(x.chern, omega))

    # -- class-level mutations -------------------------------------------------

    def _require_exceptional(self, e: KClass) -> None:
        chi = self.euler_pairing(e, e)
        if chi != 1:
            raise LatticeError(f"class is not exceptional: chi(e,e) = {chi}")

    def mutate_class_left(self, e: KClass, x: KClass) -> KClass:
        self._require_exceptional(e)
        return x - e.scale(self.euler_pairing(e, x))

    def mutate_class_right(self, x: KClass, e: KClass) -> KClass:
        self._require_exceptional(e)
        return x - e.scale(self.euler_pairing(x, e))

    def gram_matrix(self, classes: Sequence[KClass]) -> list[list[int]]:
        return [[self.euler_pairing(x, y) for y in classes] for x in classes]

    # -- integral coordinates ----------------------------------------------------

    def sod1_classes(self) -> list[KClass]:
        return [self.line_class(D) for D in SOD1_DIVISORS]

    def basis_matrix(self) -> list[list[Q]]:
        return [list(c.chern.as_tuple()) for c in self.sod1_classes()]

    def basis_determinant(self) -> Q:
        return rational_determinant(self.basis_matrix())

    def coordinates(self, x: KClass) -> tuple[int, ...]:
        """Coordinates of the class in the fixed line-bundle basis.

        Raises LatticeError when the class is not an integer combination,
        which is the validity test for K-theory classes.
        """
        if self._basis_inverse is None:
            self._basis_inverse = rational_inverse(
                [list(r) for r in zip(*self.basis_matrix())]
            )
        vec = x.chern.as_tuple()
        coords = [
            sum(self._basis_inverse[j][i] * vec[i] for i in range(8))
            for j in range(8)
        ]
        # column-solve: basis^T * c = vec, so c = (basis^T)^{-1} vec
        out = []
        for c in coords:
            if c.denominator != 1:
                raise LatticeError(f"class has non-integral coordinate {c}")
            out.append(int(c))
        return tuple(out)

    def from_coordinates(self, coords: Sequence[int]) -> KClass:
        total = ChowElement()
        for c, kls in zip(coords, self.sod1_classes()):
            total = total + kls.chern.scale(c)
        return KClass(total)


# ---------------------------------------------------------------------------
# integer lattices
# ---------------------------------------------------------------------------


class IntegerLattice:
    """Sublattice of Z^n given by generator rows, canonicalized by HNF."""

    def __init__(self, ambient_rank: int, generators: Iterable[Sequence[int]] = ()):
        self.ambient_rank = int(ambient_rank)
        gens = [list(map(int, g)) for g in generators]
        for g in gens:
            if len(g) != self.ambient_rank:
                raise LatticeError(
                    f"generator length {len(g)} != ambient rank {self.ambient_rank}"
                )
        hnf, _ = hnf_with_transform(gens) if gens else ([], [])
        self.hnf: tuple[tuple[int, ...], ...] = tuple(tuple(r) for r in hnf)

    @property
    def rank(self) -> int:
        return len(self.hnf)

    def member(self, vec: Sequence[int]) -> bool:
        v = list(map(int, vec))
        if len(v) != self.ambient_rank:
            raise LatticeError("vector length does not match ambient rank")
        for row in self.hnf:
            col = next(i for i, x in enumerate(row) if x)
            if v[col] % row[col] != 0:
                return False
            q = v[col] // row[col]
            v = [x - q * y for x, y in zip(v, row)]
        return all(x == 0 for x in v)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, IntegerLattice)
            and self.ambient_rank == other.ambient_rank
            and self.hnf == other.hnf
        )

    def __hash__(self) -> int:
        return hash((self.ambient_rank, self.hnf))

    def contains_lattice(self, other: "IntegerLattice") -> bool:
        return all(self.member(row) for row in other.hnf)

    def intersection(self, other: "IntegerLattice") -> "IntegerLattice":
        if self.ambient_rank != other.ambient_rank:
            raise LatticeError("ambient ranks differ")
        a = [list(r) for r in self.hnf]
        b = [list(r) for r in other.hnf]
        stacked = a + [[-x for x in row] for row in b]
        kernel = integer_kernel(stacked)
        gens = []
        for coeffs in kernel:
            vec = [0] * self.ambient_rank
            for c, row in zip(coeffs[: len(a)], a):
                vec = [x + c * y for x, y in zip(vec, row)]
            gens.append(vec)
        return IntegerLattice(self.ambient_rank, gens)

    def basis_coordinates(self, vec: Sequence[int]) -> Optional[list[int]]:
        """Integer coordinates of a vector in the HNF basis, or None."""
        sol = solve_rational(
            [list(map(Q, row)) for row in self.hnf], list(map(Q, vec))
        )
        if sol is None or any(c.denominator != 1 for c in sol):
            return None
        return [int(c) for c in sol]

    def __str__(self) -> str:
        rows = ", ".join("[" + ", ".join(map(str, r)) + "]" for r in self.hnf)
        return f"lattice(rank {self.rank} in Z^{self.ambient_rank}: {rows})"


@dataclass(frozen=True)
class LatticeQuotient:
    """Quotient of a lattice by a sublattice, via Smith normal form."""

    source: IntegerLattice
    kernel: IntegerLattice
    rank: int
    torsion: tuple[int, ...]
    projection: tuple[tuple[int, ...], ...]  # source-basis coords -> Z^rank
    lift: tuple[tuple[int, ...], ...]  # rows: source-basis coords per free generator

    def is_free_of_rank_one(self) -> bool:
        return self.rank == 1 and not self.torsion

    def project(self, source_coords: Sequence[int]) -> tuple[int, ...]:
        cols = len(self.projection[0]) if self.projection else 0
        return tuple(
            sum(self.projection[i][j] * source_coords[i] for i in range(len(source_coords)))
            for j in range(cols)
        )


def quotient(source: IntegerLattice, kernel: IntegerLattice) -> LatticeQuotient:
    if not source.contains_lattice(kernel):
        raise LatticeError("kernel is not contained in the source lattice")
    r = source.rank
    rows = []
    for row in kernel.hnf:
        coords = source.basis_coordinates(row)
        if coords is None:
            raise LatticeError("kernel generator is not integral over the source")
        rows.append(coords)
    if not rows:
        invariants: list[int] = []
        v = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
    else:
        invariants, _, v = smith_normal_form(rows)
    s = len(invariants)
    torsion = tuple(d for d in invariants if d > 1)
    projection = tuple(tuple(v[i][j] for j in range(s, r)) for i in range(r))
    v_inv = rational_inverse([[Q(x) for x in row] for row in v])
    lift_rows = []
    for j in range(s, r):
        row = [v_inv[j][i] for i in range(r)]
        if any(c.denominator != 1 for c in row):
            raise LatticeError("non-integral quotient lift")
        lift_rows.append(tuple(int(c) for c in row))
    return LatticeQuotient(
        source=source,
        kernel=kernel,
        rank=r - s,
        torsion=torsion,
        projection=projection,
        lift=tuple(lift_rows),
    )


def lattice_from(ktheory: KTheory, classes: Sequence[KClass]) -> IntegerLattice:
    return IntegerLattice(8, [ktheory.coordinates(c) for c in classes])


def lattice_equal(a: IntegerLattice, b: IntegerLattice) -> bool:
    return a == b


def lattice_member(vec: Sequence[int], lattice: IntegerLattice) -> bool:
    return lattice.member(vec)
