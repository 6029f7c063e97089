"""Finite-length hearts, central charges, tilting, descent, and axiom checks.

Hearts are presented by their simple objects; every verification is decided
on the simples together with the sign structure of the positive cone, with
exact rational arithmetic throughout.  Harder-Narasimhan data is computed
only for direct sums of simples; for finite-length hearts the HN property
itself is automatic and recorded as such.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .geometry import GradedDims, Q
from .lattice import (
    IntegerLattice,
    KClass,
    LatticeQuotient,
    integer_kernel,
    quotient as lattice_quotient,
    solve_rational,
)
from .calculus import AmbiguityError, Calculus, PreconditionError
from .expressions import Cone, FormalObject, Sum, pretty, shifted

INFINITY = float("inf")

Slope = Union[Fraction, float]


class StabilityError(Exception):
    pass


@dataclass(frozen=True)
class Heart:
    """Heart of a bounded t-structure presented by simples."""

    labels: tuple[str, ...]
    simples: tuple[FormalObject, ...]
    classes: tuple[KClass, ...]
    hom_table: tuple[tuple[GradedDims, ...], ...]
    provenance: str

    def __len__(self) -> int:
        return len(self.simples)

    def coordinate_rows(self, calc: Calculus) -> list[list[int]]:
        return [list(calc.ktheory.coordinates(c)) for c in self.classes]


@dataclass(frozen=True)
class CentralCharge:
    """Complex charge values, one per simple, with exact rational parts."""

    values: tuple[tuple[Q, Q], ...]  # (re, im) per simple

    @staticmethod
    def of(pairs: Sequence[tuple]) -> "CentralCharge":
        return CentralCharge(tuple((Q(re), Q(im)) for re, im in pairs))

    def value(self, coeffs: Sequence[int]) -> tuple[Q, Q]:
        re = sum((Q(c) * v[0] for c, v in zip(coeffs, self.values)), Q(0))
        im = sum((Q(c) * v[1] for c, v in zip(coeffs, self.values)), Q(0))
        return (re, im)

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class QuadraticForm:
    """Symmetric rational form on a lattice."""

    matrix: tuple[tuple[Q, ...], ...]

    def __post_init__(self):
        n = len(self.matrix)
        for row in self.matrix:
            if len(row) != n:
                raise StabilityError("quadratic form matrix is not square")
        for i in range(n):
            for j in range(n):
                if self.matrix[i][j] != self.matrix[j][i]:
                    raise StabilityError("quadratic form matrix is not symmetric")

    @staticmethod
    def zero(n: int) -> "QuadraticForm":
        return QuadraticForm(tuple(tuple(Q(0) for _ in range(n)) for _ in range(n)))

    @staticmethod
    def diagonal(entries: Sequence) -> "QuadraticForm":
        n = len(entries)
        return QuadraticForm(
            tuple(
                tuple(Q(entries[i]) if i == j else Q(0) for j in range(n))
                for i in range(n)
            )
        )

    def evaluate(self, v: Sequence) -> Q:
        return sum(
            (Q(v[i]) * self.matrix[i][j] * Q(v[j]) for i in range(len(v)) for j in range(len(v))),
            Q(0),
        )


# ---------------------------------------------------------------------------
# heart construction
# ---------------------------------------------------------------------------


def make_heart(
    calc: Calculus,
    simples: Sequence[tuple[str, FormalObject]],
    provenance: str = "extExceptional",
) -> Heart:
    labels = tuple(lbl for lbl, _ in simples)
    objects = tuple(calc.normalize(obj) for _, obj in simples)
    report = calc.is_ext_exceptional(objects)
    if not report.ok:
        detail = []
        for i, j, deg in report.failures:
            detail.append(
                f"Hom^{deg}({labels[i]}, {labels[j]}) is nonzero"
            )
        for i in report.not_exceptional:
            detail.append(f"{labels[i]} is not exceptional")
        for i, j, msg in report.ambiguous:
            detail.append(f"({labels[i]}, {labels[j]}): {msg}")
        raise PreconditionError("not an Ext-exceptional collection: " + "; ".join(detail))
    classes = tuple(calc.class_of(x) for x in objects)
    _require_independent(calc, classes)
    table = _rebuild_hom_table(calc, objects)
    return Heart(labels, objects, classes, table, provenance)


def _require_independent(calc: Calculus, classes: Sequence[KClass]) -> None:
    rows = [list(map(Q, calc.ktheory.coordinates(c))) for c in classes]
    # rank check by Gaussian elimination
    m = [row[:] for row in rows]
    rank = 0
    for col in range(8):
        pivot = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        inv = 1 / m[rank][col]
        m[rank] = [v * inv for v in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][col] != 0:
                f = m[r][col]
                m[r] = [v - f * w for v, w in zip(m[r], m[rank])]
        rank += 1
    if rank != len(classes):
        raise PreconditionError("classes of simples are linearly dependent")


def _rebuild_hom_table(calc: Calculus, objects: Sequence[FormalObject]) -> tuple:
    table = []
    for x in objects:
        row = []
        for y in objects:
            r = calc.rhom(x, y)
            if r.status != "determined":
                raise AmbiguityError(
                    f"hom table entry RHom({pretty(x)}, {pretty(y)}) is {r}"
                )
            row.append(r.dims)
        table.append(tuple(row))
    return tuple(table)


# ---------------------------------------------------------------------------
# slopes and stability functions
# ---------------------------------------------------------------------------


def slope(Z: CentralCharge, v: Sequence[int]) -> Slope:
    if all(c == 0 for c in v):
        raise StabilityError("slope of the zero vector is undefined")
    if any(c < 0 for c in v):
        raise StabilityError("slope is defined on the nonnegative cone only")
    re, im = Z.value(v)
    if im == 0:
        return INFINITY
    return -re / im


@dataclass(frozen=True)
class StabilityFunctionReport:
    ok: bool
    mode: str
    failures: tuple[str, ...]
    kernel_directions: tuple[int, ...]


def check_stability_function(
    heart: Heart, Z: CentralCharge, mode: str = "weak"
) -> StabilityFunctionReport:
    """Check the (weak) positivity axiom on the positive cone of the heart.

    Every nonzero nonnegative combination of simples lands in the allowed
    half-plane as soon as every simple does, since the region is closed
    under addition; a simple of charge zero is a kernel direction and is
    permitted only in weak mode.
    """
    if mode not in ("weak", "strong"):
        raise StabilityError(f"unknown mode {mode!r}")
    if len(Z) != len(heart):
        raise StabilityError("charge length does not match number of simples")
    failures: list[str] = []
    kernel_dirs: list[int] = []
    for i, (re, im) in enumerate(Z.values):
        if im < 0:
            failures.append(f"simple {heart.labels[i]} has Im Z < 0")
        elif im == 0:
            if re == 0:
                kernel_dirs.append(i)
                if mode == "strong":
                    failures.append(
                        f"simple {heart.labels[i]} has Z = 0 (kernel direction)"
                    )
            elif re > 0:
                failures.append(
                    f"simple {heart.labels[i]} maps to the positive real axis"
                )
    return StabilityFunctionReport(
        ok=not failures, mode=mode, failures=tuple(failures), kernel_directions=tuple(kernel_dirs)
    )


def hn_filtration(
    Z: CentralCharge, multiset: Sequence[int]
) -> list[tuple[Slope, dict[int, int]]]:
    """Group a direct sum of simples by slope, strictly decreasing."""
    if not multiset:
        raise StabilityError("empty multiset has no filtration")
    counts: dict[int, int] = {}
    for idx in multiset:
        counts[idx] = counts.get(idx, 0) + 1
    groups: dict[Slope, dict[int, int]] = {}
    for idx, mult in counts.items():
        unit = [0] * len(Z)
        unit[idx] = 1
        mu = slope(Z, unit)
        groups.setdefault(mu, {})[idx] = mult
    def sort_key(mu: Slope):
        return (0 if mu == INFINITY else 1, -mu if mu != INFINITY else 0)
    return [(mu, groups[mu]) for mu in sorted(groups, key=sort_key)]


# ---------------------------------------------------------------------------
# tilting
# ---------------------------------------------------------------------------


def tilt_at(calc: Calculus, heart: Heart, j: int) -> Heart:
    """Tilt at the torsion pair (perp(S_j), [S_j]).

    The new simples are S_j[1] together with, for each other simple, its
    universal extension by S_j; an extension of multiplicity zero leaves the
    simple unchanged.
    """
    n = len(heart)
    if not 0 <= j < n:
        raise StabilityError(f"simple index {j} out of range")
    for i in range(n):
        if i == j:
            continue
        dims = heart.hom_table[i][j]
        bad = [deg for deg, _ in dims.items() if deg <= 0]
        if bad:
            raise PreconditionError(
                f"Hom^{bad[0]}({heart.labels[i]}, {heart.labels[j]}) is nonzero; "
                "the torsion pair is not available"
            )
    S = heart.simples[j]
    new: list[tuple[str, FormalObject]] = [
        (f"{heart.labels[j]}[1]", calc.normalize(shifted(S, 1)))
    ]
    multiplicities: dict[int, int] = {}
    for i in range(n):
        if i == j:
            continue
        d = heart.hom_table[i][j].get(1)
        multiplicities[i] = d
        if d == 0:
            new.append((heart.labels[i], heart.simples[i]))
            continue
        copies = Sum(tuple([S] * d)) if d > 1 else S
        ext = Cone(shifted(heart.simples[i], -1), copies, "universalExtension", None)
        new.append((f"ext({heart.labels[i]},{heart.labels[j]})", calc.normalize(ext)))
    labels = tuple(lbl for lbl, _ in new)
    objects = tuple(obj for _, obj in new)
    classes = tuple(calc.class_of(x) for x in objects)
    _require_independent(calc, classes)
    table = _rebuild_hom_table(calc, objects)
    tilted = Heart(labels, objects, classes, table, f"tiltOf({heart.provenance},{j})")
    # class bookkeeping: new classes sum to -[S_j] + sum_i ([S_i] + d_i [S_j])
    expected = heart.classes[j].scale(-1)
    for i in range(n):
        if i != j:
            expected = expected + heart.classes[i] + heart.classes[j].scale(multiplicities[i])
    total = classes[0]
    for c in classes[1:]:
        total = total + c
    assert total == expected, "tilt class bookkeeping failed"
    return tilted


# ---------------------------------------------------------------------------
# support property
# ---------------------------------------------------------------------------


def _charge_kernel(Z_rows: Sequence[tuple[Q, Q]]) -> list[list[int]]:
    """Integer basis of the kernel of v -> sum v_i z_i on Z^n."""
    n = len(Z_rows)
    denom = 1
    for re, im in Z_rows:
        denom = denom * re.denominator // _gcd(denom, re.denominator)
        denom = denom * im.denominator // _gcd(denom, im.denominator)
    matrix = [[int(re * denom), int(im * denom)] for re, im in Z_rows]
    return integer_kernel(matrix)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


@dataclass(frozen=True)
class SupportReport:
    ok: bool
    kernel_rank: int
    negative_definite: bool
    nonnegative_on_classes: bool
    detail: str = ""


def check_support(
    Z: CentralCharge,
    Qform: QuadraticForm,
    ambient_rank: int,
    semistable_classes: Sequence[Sequence[int]] = (),
) -> SupportReport:
    """Verify the support axiom on Z^ambient_rank with the given form.

    The form must be negative definite on ker Z (checked by the exact
    Sylvester criterion on a kernel basis) and nonnegative on the supplied
    semistable classes.
    """
    if len(Z) != ambient_rank:
        raise StabilityError("charge length does not match lattice rank")
    kernel = _charge_kernel(Z.values)
    neg_def = True
    gram = [
        [
            sum(
                Q(kernel[r][i]) * Qform.matrix[i][jj] * Q(kernel[c][jj])
                for i in range(ambient_rank)
                for jj in range(ambient_rank)
            )
            for c in range(len(kernel))
        ]
        for r in range(len(kernel))
    ]
    for k in range(1, len(kernel) + 1):
        minor = _leading_minor(gram, k)
        if (minor > 0) != (k % 2 == 0) or minor == 0:
            neg_def = False
            break
    nonneg = all(Qform.evaluate(v) >= 0 for v in semistable_classes)
    return SupportReport(
        ok=neg_def and nonneg,
        kernel_rank=len(kernel),
        negative_definite=neg_def,
        nonnegative_on_classes=nonneg,
    )


def _leading_minor(matrix: Sequence[Sequence[Q]], k: int) -> Q:
    from .lattice import rational_determinant

    return rational_determinant([row[:k] for row in list(matrix)[:k]])


# ---------------------------------------------------------------------------
# descent along the kernel lattice
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    ok: bool
    detail: str


@dataclass(frozen=True)
class DescentReport:
    serre_generator: Verdict
    kernel_matches_ker_z: Verdict
    quotient_built: Verdict
    induced_strong: Verdict
    quotient: Optional[LatticeQuotient]
    kernel_in_simple_coords: Optional[IntegerLattice]
    induced_values: tuple[tuple[Q, Q], ...]
    simple_images: tuple[tuple[int, ...], ...]

    @property
    def ok(self) -> bool:
        return (
            self.serre_generator.ok
            and self.kernel_matches_ker_z.ok
            and self.quotient_built.ok
            and self.induced_strong.ok
        )


def descend(
    calc: Calculus,
    heart: Heart,
    kernel_classes: Sequence[KClass],
    Z: CentralCharge,
) -> DescentReport:
    """Descend the heart and charge along the quotient by the kernel lattice.

    Checks, in order: the kernel lattice is generated by classes visible in
    the positive cone of the heart (a designated simple together with
    difference vectors of simples); ker Z equals the kernel lattice; the
    quotient is built with its rank and torsion; the induced charge is well
    defined and a strong stability function on the image of the cone.
    """
    n = len(heart)
    simple_rows = [list(map(Q, calc.ktheory.coordinates(c))) for c in heart.classes]

    coords_rows: list[list[int]] = []
    for kc in kernel_classes:
        target = list(map(Q, calc.ktheory.coordinates(kc)))
        sol = solve_rational(simple_rows, target)
        if sol is None or any(c.denominator != 1 for c in sol):
            raise StabilityError(
                "kernel class is not an integer combination of the simple classes"
            )
        coords_rows.append([int(c) for c in sol])
    kernel = IntegerLattice(n, coords_rows)

    # (1) generation by positive-cone classes: simples lying in the kernel,
    # together with difference vectors of simples (class shadows of objects
    # identified in the quotient).
    gens: list[list[int]] = []
    simple_gens: list[int] = []
    for i in range(n):
        unit = [1 if t == i else 0 for t in range(n)]
        if kernel.member(unit):
            gens.append(unit)
            simple_gens.append(i)
    for i in range(n):
        for jj in range(n):
            if i == jj:
                continue
            diff = [0] * n
            diff[i] += 1
            diff[jj] -= 1
            if kernel.member(diff):
                gens.append(diff)
    generated = IntegerLattice(n, gens)
    if not simple_gens:
        v1 = Verdict(False, "no simple class lies in the kernel lattice")
    elif generated != kernel:
        v1 = Verdict(
            False,
            "kernel is not spanned by simple classes and their differences",
        )
    else:
        names = ", ".join(heart.labels[i] for i in simple_gens)
        v1 = Verdict(True, f"kernel generated by simple(s) {names} plus relation vectors")

    # (2) ker Z as a sublattice equals the kernel lattice
    ker_z = IntegerLattice(n, _charge_kernel(Z.values))
    if ker_z == kernel:
        v2 = Verdict(True, f"ker Z has rank {ker_z.rank} and matches the kernel lattice")
    else:
        v2 = Verdict(False, f"ker Z = {ker_z} but kernel lattice = {kernel}")

    # (3) quotient by Smith normal form
    ambient = IntegerLattice(n, [[1 if t == i else 0 for t in range(n)] for i in range(n)])
    quot = lattice_quotient(ambient, kernel)
    v3 = Verdict(
        True,
        f"quotient rank {quot.rank}, torsion {list(quot.torsion) or 'none'}",
    )

    # (4) induced charge: well defined on the quotient and strong on the image
    problems: list[str] = []
    for row in kernel.hnf:
        if Z.value(row) != (Q(0), Q(0)):
            problems.append(f"Z does not vanish on kernel generator {list(row)}")
    induced = tuple(Z.value(lift) for lift in quot.lift)
    images = tuple(quot.project([1 if t == i else 0 for t in range(n)]) for i in range(n))
    if not any(any(img) for img in images):
        problems.append(
            "no simple survives in the quotient; the induced charge is zero"
        )
    for i in range(n):
        re, im = Z.value([1 if t == i else 0 for t in range(n)])
        if (re, im) == (0, 0):
            if not kernel.member([1 if t == i else 0 for t in range(n)]):
                problems.append(
                    f"simple {heart.labels[i]} has Z = 0 but is not in the kernel"
                )
        elif not (im > 0 or (im == 0 and re < 0)):
            problems.append(
                f"image of simple {heart.labels[i]} violates the strong positivity"
            )
        # functoriality: induced charge of the image equals the original value
        proj_val_re = sum((Q(images[i][t]) * induced[t][0] for t in range(quot.rank)), Q(0))
        proj_val_im = sum((Q(images[i][t]) * induced[t][1] for t in range(quot.rank)), Q(0))
        if (proj_val_re, proj_val_im) != (re, im):
            problems.append(
                f"induced charge disagrees with Z on simple {heart.labels[i]}"
            )
    v4 = Verdict(not problems, "; ".join(problems) if problems else "induced charge is strong")

    return DescentReport(
        serre_generator=v1,
        kernel_matches_ker_z=v2,
        quotient_built=v3,
        induced_strong=v4,
        quotient=quot,
        kernel_in_simple_coords=kernel,
        induced_values=induced,
        simple_images=images,
    )


# ---------------------------------------------------------------------------
# full axiom bundle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AxiomReport:
    ok: bool
    stability_function: StabilityFunctionReport
    hn_property: Verdict
    support: SupportReport


def check_weak_stability_condition(
    heart: Heart,
    Z: CentralCharge,
    Qform: Optional[QuadraticForm] = None,
    mode: str = "weak",
    quotient_data: Optional[LatticeQuotient] = None,
) -> AxiomReport:
    """Bundle the three axioms for the pair (heart, Z).

    The stability-function axiom is checked in the requested mode; the HN
    property is automatic for a finite-length heart presented by simples and
    recorded as such; the support property is checked against the given
    quadratic form, on the quotient lattice when quotient data is supplied
    and on the simple-coordinate lattice otherwise.
    """
    sf = check_stability_function(heart, Z, mode)
    hn = Verdict(True, "finite-length heart: HN filtrations are automatic")
    if quotient_data is not None:
        rank = quotient_data.rank
        images = [
            quotient_data.project([1 if t == i else 0 for t in range(len(heart))])
            for i in range(len(heart))
        ]
        induced = [Z.value(lift) for lift in quotient_data.lift]
        Zq = CentralCharge(tuple(induced))
        q = Qform or QuadraticForm.zero(rank)
        support = check_support(Zq, q, rank, [img for img in images if any(img)])
    else:
        q = Qform or QuadraticForm.zero(len(heart))
        units = [[1 if t == i else 0 for t in range(len(heart))] for i in range(len(heart))]
        support = check_support(Z, q, len(heart), units)
    return AxiomReport(ok=sf.ok and hn.ok and support.ok, stability_function=sf, hn_property=hn, support=support)
