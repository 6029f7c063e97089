"""Configuration, named-object registry, and the golden-identity check suite.

Every numbered identity the engine is expected to reproduce lives here as a
named check with a short anchor string stating the identity, a provenance
tag ('pinned' for frozen golden values, 'derived' for values produced by an
independent oracle), and a runner.  Checks whose golden values are specific
to the default twist (-1, -1) are skipped, not run, at other twists;
property checks run everywhere.
"""

from __future__ import annotations

import configparser
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .geometry import (
    DivisorClass,
    Geometry,
    GeometryConfig,
    GradedDims,
    SurfaceDivisor,
    Q,
)
from .lattice import IntegerLattice, KClass, lattice_from, quotient
from .expressions import (
    FormalObject,
    LineAtom,
    PushAtom,
    Shift,
    parse_object,
    pretty,
)
from .calculus import Calculus, PreconditionError
from .stability import (
    CentralCharge,
    Heart,
    QuadraticForm,
    check_weak_stability_condition,
    descend,
    make_heart,
    slope,
    tilt_at,
)

REPORT_VERSION = "1"

DEFAULT_CONFIG_TEXT = """\
[geometry]
twist = -1,-1

[objects]
G = L(OE(-1,0), O(-k))
F = L(OE(-1,0), L(O(), O(H-k)))
Ecal = L(OE(-1,0), OE(0,-1))

[hearts]
B = O(-h) ; G ; shift(F,-2)
Atilde = tilt B 3

[charges]
Z_B = B ; (0,1) ; (0,1) ; (1,1/100)
Z_up = Atilde ; (0,1) ; (0,0) ; (0,1)
"""

DEFAULT_TWIST = (-1, -1)
PROPERTY_TWISTS = ((-1, -1), (0, 0), (-2, 0))


class ConfigError(Exception):
    pass


@dataclass
class HarnessConfig:
    twist: tuple[int, int] = DEFAULT_TWIST
    objects: dict[str, str] = field(default_factory=dict)
    hearts: dict[str, str] = field(default_factory=dict)
    charges: dict[str, tuple[str, tuple[tuple[Q, Q], ...]]] = field(default_factory=dict)
    selection: Optional[tuple[str, ...]] = None

    @staticmethod
    def from_text(text: str) -> "HarnessConfig":
        parser = configparser.ConfigParser(
            delimiters=("=",), comment_prefixes=("#",), interpolation=None
        )
        parser.optionxform = str
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse config: {exc}") from exc
        cfg = HarnessConfig()
        if parser.has_section("geometry") and parser.has_option("geometry", "twist"):
            raw = parser.get("geometry", "twist")
            try:
                a, b = (int(t.strip()) for t in raw.split(","))
            except ValueError as exc:
                raise ConfigError(f"bad twist {raw!r}") from exc
            cfg.twist = (a, b)
        if parser.has_section("objects"):
            for name, expr in parser.items("objects"):
                if name in cfg.objects:
                    raise ConfigError(f"duplicate object name {name!r}")
                cfg.objects[name] = expr.strip()
        if parser.has_section("hearts"):
            for name, defn in parser.items("hearts"):
                cfg.hearts[name] = defn.strip()
        if parser.has_section("charges"):
            for name, defn in parser.items("charges"):
                parts = [p.strip() for p in defn.split(";")]
                if len(parts) < 2:
                    raise ConfigError(f"charge {name!r} needs a heart and values")
                values = tuple(_parse_complex_pair(p, name) for p in parts[1:])
                cfg.charges[name] = (parts[0], values)
        if parser.has_section("checks") and parser.has_option("checks", "only"):
            names = [n.strip() for n in parser.get("checks", "only").split(",") if n.strip()]
            cfg.selection = tuple(names)
        return cfg


def _parse_complex_pair(text: str, owner: str) -> tuple[Q, Q]:
    text = text.strip()
    if not (text.startswith("(") and text.endswith(")")):
        raise ConfigError(f"charge {owner!r}: expected '(re,im)', got {text!r}")
    try:
        re_s, im_s = text[1:-1].split(",")
        return (Fraction(re_s.strip()), Fraction(im_s.strip()))
    except ValueError as exc:
        raise ConfigError(f"charge {owner!r}: bad value {text!r}") from exc


def default_config() -> HarnessConfig:
    return HarnessConfig.from_text(DEFAULT_CONFIG_TEXT)


def validate_config(config: HarnessConfig) -> None:
    """Reject malformed configurations before any check runs.

    This is a syntactic pass: expressions must parse and names must resolve;
    whether the named mutations exist at the configured twist is a
    mathematical question answered by the individual checks.
    """
    names: dict[str, FormalObject] = {}
    for name, expr in config.objects.items():
        try:
            names[name] = parse_object(expr, names)
        except Exception as exc:
            raise ConfigError(f"object {name!r}: {exc}") from exc
    heart_sizes: dict[str, int] = {}
    for name, defn in config.hearts.items():
        words = defn.split()
        if words and words[0] == "tilt":
            if len(words) != 3:
                raise ConfigError(f"heart {name!r}: expected 'tilt <heart> <position>'")
            if words[1] not in heart_sizes:
                raise ConfigError(f"heart {name!r}: unknown parent {words[1]!r}")
            try:
                position = int(words[2])
            except ValueError as exc:
                raise ConfigError(f"heart {name!r}: bad position {words[2]!r}") from exc
            if not 1 <= position <= heart_sizes[words[1]]:
                raise ConfigError(f"heart {name!r}: position {position} out of range")
            heart_sizes[name] = heart_sizes[words[1]]
            continue
        parts = [p.strip() for p in defn.split(";")]
        for part in parts:
            if not part:
                raise ConfigError(f"heart {name!r}: empty simple")
            try:
                parse_object(part, names)
            except Exception as exc:
                raise ConfigError(f"heart {name!r}: {exc}") from exc
        heart_sizes[name] = len(parts)
    for name, (heart_name, values) in config.charges.items():
        if heart_name not in heart_sizes:
            raise ConfigError(f"charge {name!r} references unknown heart {heart_name!r}")
        if len(values) != heart_sizes[heart_name]:
            raise ConfigError(
                f"charge {name!r} has {len(values)} values for "
                f"{heart_sizes[heart_name]} simples"
            )


# ---------------------------------------------------------------------------
# runtime context
# ---------------------------------------------------------------------------


class Context:
    """Runtime objects for one configuration.

    Named objects, hearts, and charges are built lazily: at twists other than
    the default one the golden mutation objects need not exist, and the
    checks that would use them are skipped.
    """

    def __init__(self, config: HarnessConfig):
        self.config = config
        self.geometry = Geometry(GeometryConfig(*config.twist))
        self.calc = Calculus(self.geometry)
        self.kt = self.calc.ktheory
        self._names: Optional[dict[str, FormalObject]] = None
        self._hearts: Optional[dict[str, Heart]] = None
        self._charges: Optional[dict[str, tuple[str, CentralCharge]]] = None
        self._descent_cache = None

    @property
    def names(self) -> dict[str, FormalObject]:
        if self._names is None:
            self._names = {}
            for name, expr in self.config.objects.items():
                try:
                    raw = parse_object(expr, self._names)
                except Exception as exc:
                    raise ConfigError(f"object {name!r}: {exc}") from exc
                self._names[name] = self.calc.normalize(raw)
        return self._names

    @property
    def hearts(self) -> dict[str, Heart]:
        if self._hearts is None:
            self._hearts = {}
            for name, defn in self.config.hearts.items():
                self._hearts[name] = self._build_heart(name, defn)
        return self._hearts

    @property
    def charges(self) -> dict[str, tuple[str, CentralCharge]]:
        if self._charges is None:
            self._charges = {}
            for name, (heart_name, values) in self.config.charges.items():
                if heart_name not in self.hearts:
                    raise ConfigError(
                        f"charge {name!r} references unknown heart {heart_name!r}"
                    )
                if len(values) != len(self.hearts[heart_name]):
                    raise ConfigError(
                        f"charge {name!r} has {len(values)} values for "
                        f"{len(self.hearts[heart_name])} simples"
                    )
                self._charges[name] = (heart_name, CentralCharge(values))
        return self._charges

    def _build_heart(self, name: str, defn: str) -> Heart:
        words = defn.split()
        if words and words[0] == "tilt":
            if len(words) != 3:
                raise ConfigError(f"heart {name!r}: expected 'tilt <heart> <position>'")
            parent = (self._hearts or {}).get(words[1])
            if parent is None:
                raise ConfigError(f"heart {name!r}: unknown parent {words[1]!r}")
            try:
                position = int(words[2])
            except ValueError as exc:
                raise ConfigError(f"heart {name!r}: bad position {words[2]!r}") from exc
            if not 1 <= position <= len(parent):
                raise ConfigError(f"heart {name!r}: position {position} out of range")
            return tilt_at(self.calc, parent, position - 1)
        simples = []
        for part in defn.split(";"):
            part = part.strip()
            if not part:
                raise ConfigError(f"heart {name!r}: empty simple")
            try:
                obj = parse_object(part, self.names)
            except Exception as exc:
                raise ConfigError(f"heart {name!r}: {exc}") from exc
            simples.append((part, obj))
        return make_heart(self.calc, simples)

    # -- shared named data ---------------------------------------------------

    def obj(self, text: str) -> FormalObject:
        return self.calc.normalize(parse_object(text, self.names))

    def sod1_objects(self) -> list[FormalObject]:
        from .lattice import SOD1_DIVISORS

        return [LineAtom(D) for D in SOD1_DIVISORS]

    def sod2_objects(self) -> list[FormalObject]:
        return [
            PushAtom(SurfaceDivisor(-2, -1)),
            PushAtom(SurfaceDivisor(-1, -1)),
            self.obj("O(-h)"),
            self.names["G"],
            self.names["F"],
            self.obj("O()"),
            self.obj("O(H)"),
            self.obj("O(2H)"),
        ]

    def triple_objects(self) -> list[FormalObject]:
        return [self.obj("O(-h)"), self.names["G"], self.names["F"]]

    def collection(self, name: str) -> list[FormalObject]:
        table = {
            "SOD1": self.sod1_objects,
            "SOD2": self.sod2_objects,
            "TRIPLE": self.triple_objects,
        }
        if name not in table:
            raise ConfigError(f"unknown collection {name!r}")
        return table[name]()

    def kernel_classes(self) -> list[KClass]:
        e_cls = self.calc.class_of(self.names["Ecal"])
        gf = self.calc.class_of(self.names["G"]) + self.calc.class_of(self.names["F"])
        return [e_cls, gf]

    def dprime_lattice(self) -> IntegerLattice:
        classes = [self.calc.class_of(x) for x in self.triple_objects()]
        return lattice_from(self.kt, classes)

    def kernel_lattice(self) -> IntegerLattice:
        return lattice_from(self.kt, self.kernel_classes())

    def descent(self):
        if self._descent_cache is None:
            heart = self.hearts["Atilde"]
            _, Z = self.charges["Z_up"]
            self._descent_cache = descend(self.calc, heart, self.kernel_classes(), Z)
        return self._descent_cache


# ---------------------------------------------------------------------------
# check registry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str  # 'pass' | 'fail' | 'ambiguous' | 'skipped'
    expected: str
    actual: str
    anchor: str
    tag: str  # 'pinned' | 'derived'

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "expected": self.expected,
            "actual": self.actual,
            "anchor": self.anchor,
            "tag": self.tag,
        }


@dataclass(frozen=True)
class Check:
    name: str
    anchor: str
    tag: str
    default_twist_only: bool
    runner: Callable[[Context], tuple[bool, str, str]]


def _dims(ctx: Context, left: str, right: str) -> str:
    return str(ctx.calc.rhom(ctx.obj(left), ctx.obj(right)))


def _check_sod1_semiorthogonal(ctx: Context) -> tuple[bool, str, str]:
    report = ctx.calc.is_semiorthogonal(ctx.sod1_objects())
    gram = ctx.kt.gram_matrix([ctx.calc.class_of(x) for x in ctx.sod1_objects()])
    unipotent = all(gram[i][i] == 1 for i in range(8)) and all(
        gram[j][i] == 0 for j in range(8) for i in range(j)
    )
    ok = report.ok and unipotent
    actual = (
        f"backward homs vanish: {report.ok}, gram unipotent upper-triangular: {unipotent}"
    )
    return ok, "28 vanishing backward homs; unipotent upper-triangular gram", actual


def _check_sod1_determinant(ctx: Context) -> tuple[bool, str, str]:
    det = ctx.kt.basis_determinant()
    return abs(det) == 1, "|det| = 1", f"det = {det}"


def _check_serre_canonical(ctx: Context) -> tuple[bool, str, str]:
    K = ctx.geometry.canonical_class()
    return K == DivisorClass(-2, -1, -1), "-2H-h-k", str(K)


def _check_serre_duality_pairing(ctx: Context) -> tuple[bool, str, str]:
    kt = ctx.kt
    basis = kt.sod1_classes()
    bad = 0
    for x in basis:
        for y in basis:
            if kt.euler_pairing(x, y) != kt.euler_pairing(y, kt.serre_class(x)):
                bad += 1
    return bad == 0, "chi(x,y) = chi(y, Sx) on all 64 basis pairs", f"{bad} violations"


def _check_serre_e_class(ctx: Context) -> tuple[bool, str, str]:
    from .geometry import ChowElement

    g = ctx.geometry
    E = g.exceptional_divisor_class()
    HE = g.chow_mul(
        ChowElement.of_divisor(DivisorClass(1, 0, 0)), ChowElement.of_divisor(E)
    )
    ok = E == DivisorClass(1, -1, -1) and HE.is_zero()
    return ok, "E = H-h-k and H*E = 0", f"E = {E}, H*E zero: {HE.is_zero()}"


def _check_serre_adjunction(ctx: Context) -> tuple[bool, str, str]:
    g = ctx.geometry
    restr = g.restrict_to_E(g.canonical_class() + g.exceptional_divisor_class())
    return restr == SurfaceDivisor(-2, -2), "(K+E)|_E = (-2,-2)", str(restr)


def _check_k1_semiorthogonal(ctx: Context) -> tuple[bool, str, str]:
    report = ctx.calc.is_semiorthogonal(ctx.sod2_objects())
    detail = "pass" if report.ok else f"violations={report.violations}, ambiguous={report.ambiguous}"
    return report.ok, "all backward homs of the 8-object decomposition vanish", detail


def _check_step1(ctx: Context) -> tuple[bool, str, str]:
    ok = True
    parts = []
    P = PushAtom(SurfaceDivisor(-1, 0))
    for i in range(3):
        line = LineAtom(DivisorClass(i, 0, 0))
        r = ctx.calc.rhom(line, P)
        fixed = ctx.calc.mutate_left(line, P) == P
        ok = ok and r.is_empty() and fixed
        parts.append(f"RHom(O({i}H), OE(-1,0)) = {r}")
    return ok, "complete orthogonality to O, O(H), O(2H); mutation fixes the sheaf", "; ".join(parts)


def _check_step2(ctx: Context) -> tuple[bool, str, str]:
    cases = [
        ("L(O(2H), OE(0,0))", "shift(O(H+h+k),1)"),
        ("L(O(H+h+k), O(2H))", "OE(0,0)"),
        ("L(O(H), OE(0,0))", "shift(O(h+k),1)"),
    ]
    ok = True
    parts = []
    for src, tgt in cases:
        result = ctx.obj(src)
        target = ctx.obj(tgt)
        rep = ctx.calc.verify_identity(result, target)
        ok = ok and rep.ok
        parts.append(f"{src} -> {pretty(result)} ({'ok' if rep.ok else 'MISMATCH'})")
    return ok, "O(H+h+k)[1]; OE(0,0); O(h+k)[1]", "; ".join(parts)


def _check_step3_euler(ctx: Context) -> tuple[bool, str, str]:
    cases = [
        ("L(O(), O(h))", "shift(O(-h),1)"),
        ("L(O(), O(k))", "shift(O(-k),1)"),
        ("L(O(H), O(H+h))", "shift(O(H-h),1)"),
        ("L(O(H), O(H+k))", "shift(O(H-k),1)"),
    ]
    ok = True
    parts = []
    for src, tgt in cases:
        rep = ctx.calc.verify_identity(ctx.obj(src), ctx.obj(tgt))
        ok = ok and rep.ok
        parts.append(f"{src} -> {tgt}: {'ok' if rep.ok else 'MISMATCH'}")
    return ok, "four Euler-sequence mutations", "; ".join(parts)


def _check_step3_orthogonality(ctx: Context) -> tuple[bool, str, str]:
    objs = ["O(h+k)", "O(H-h)", "O(H-k)"]
    ok = True
    parts = []
    for i, x in enumerate(objs):
        for j, y in enumerate(objs):
            if i == j:
                continue
            r = ctx.calc.rhom(ctx.obj(x), ctx.obj(y))
            ok = ok and r.is_empty()
            if not r.is_empty():
                parts.append(f"RHom({x},{y}) = {r}")
    return ok, "O(h+k), O(H-h), O(H-k) mutually completely orthogonal", "; ".join(parts) or "all vanish"


def _check_step4(ctx: Context) -> tuple[bool, str, str]:
    result = ctx.obj("L(O(-k), L(O(), O(H-h)))")
    rep = ctx.calc.verify_identity(result, PushAtom(SurfaceDivisor(-1, 0)))
    return rep.ok, "OE(-1,0)", pretty(result)


def _check_triple_exceptional(ctx: Context) -> tuple[bool, str, str]:
    triple = ctx.triple_objects()
    semi = ctx.calc.is_semiorthogonal(triple)
    each = all(ctx.calc.is_exceptional(x) for x in triple)
    ok = semi.ok and each
    return (
        ok,
        "O(-h), G, F is an exceptional collection",
        f"semiorthogonal: {semi.ok}, all exceptional: {each}",
    )


def _check_kernel_generators(ctx: Context) -> tuple[bool, str, str]:
    kt = ctx.kt
    calc = ctx.calc
    kernel = ctx.kernel_lattice()
    P_cls = kt.coordinates(kt.pushforward_class(SurfaceDivisor(-1, 0)))
    Q_cls = kt.coordinates(kt.pushforward_class(SurfaceDivisor(0, -1)))
    push_span = IntegerLattice(8, [P_cls, Q_cls])
    e_in = push_span.member(kt.coordinates(calc.class_of(ctx.names["Ecal"])))
    diff = kt.line_class(DivisorClass(0, -1, 0)) - kt.line_class(DivisorClass(0, 0, -1))
    killed = IntegerLattice(8, [P_cls, Q_cls, kt.coordinates(diff)])
    gf = calc.class_of(ctx.names["G"]) + calc.class_of(ctx.names["F"])
    gf_in = killed.member(kt.coordinates(gf))
    # the kernel is exactly the part of the pushforward-killed lattice that
    # lives inside the rank-3 sublattice
    meet = ctx.dprime_lattice().intersection(killed)
    ok = e_in and gf_in and meet == kernel
    return (
        ok,
        "[Ecal] and [G]+[F] generate the pushforward-killed part of the rank-3 lattice",
        f"[Ecal] in span(push atoms): {e_in}; [G]+[F] killed: {gf_in}; intersection matches: {meet == kernel}",
    )


def _check_kernel_rank(ctx: Context) -> tuple[bool, str, str]:
    rank = ctx.kernel_lattice().rank
    return rank == 2, "rank 2", f"rank {rank}"


def _check_kernel_quotient(ctx: Context) -> tuple[bool, str, str]:
    quot = quotient(ctx.dprime_lattice(), ctx.kernel_lattice())
    ok = quot.rank == 1 and not quot.torsion
    return ok, "rank 1, torsion-free", f"rank {quot.rank}, torsion {list(quot.torsion)}"


def _check_kernel_relation(ctx: Context) -> tuple[bool, str, str]:
    calc = ctx.calc
    kt = ctx.kt
    lhs = calc.class_of(ctx.names["Ecal"])
    rhs = calc.class_of(ctx.names["F"]) + kt.line_class(DivisorClass(0, -1, 0))
    relation = lhs == rhs
    # [O(-h)] - [O(-k)] in D'-coordinates, with [G] the representative of
    # [O(-k)] (their pushforwards agree): e1 - e2 in the triple basis.
    triple = [calc.class_of(x) for x in ctx.triple_objects()]
    rows = [list(map(Q, kt.coordinates(c))) for c in triple]
    kernel3 = IntegerLattice(
        3,
        [
            _int_solution(rows, kt.coordinates(calc.class_of(ctx.names["Ecal"]))),
            _int_solution(
                rows,
                kt.coordinates(
                    calc.class_of(ctx.names["G"]) + calc.class_of(ctx.names["F"])
                ),
            ),
        ],
    )
    member = kernel3.member([1, -1, 0])
    ok = relation and member
    return (
        ok,
        "[Ecal] = [F] + [O(-h)]; difference vector lies in the kernel",
        f"relation holds: {relation}; (1,-1,0) in kernel: {member}",
    )


def _int_solution(rows: list[list[Q]], target: Sequence[int]) -> list[int]:
    from .lattice import solve_rational

    sol = solve_rational(rows, list(map(Q, target)))
    if sol is None or any(c.denominator != 1 for c in sol):
        raise ConfigError("class is not integral over the given basis")
    return [int(c) for c in sol]


def _check_ext_triple(ctx: Context) -> tuple[bool, str, str]:
    calc = ctx.calc
    good = calc.is_ext_exceptional(
        [ctx.obj("O(-h)"), ctx.names["G"], ctx.obj("shift(F,-2)")]
    )
    bad = calc.is_ext_exceptional([ctx.obj("O(-h)"), ctx.names["G"], ctx.names["F"]])
    witness = (0, 2, -1) in bad.failures
    ok = good.ok and not bad.ok and witness
    return (
        ok,
        "shifted triple passes; unshifted fails with a degree -1 witness",
        f"shifted ok: {good.ok}; unshifted failures: {list(bad.failures)}",
    )


def _check_heart_b(ctx: Context) -> tuple[bool, str, str]:
    heart = ctx.hearts.get("B")
    ok = heart is not None and len(heart) == 3
    return ok, "three-simple heart from the shifted triple", f"simples: {heart.labels if heart else None}"


def _check_tilt_simples(ctx: Context) -> tuple[bool, str, str]:
    calc = ctx.calc
    tilted = ctx.hearts["Atilde"]
    expected = [
        calc.class_of(ctx.obj("shift(F,-1)")),
        calc.class_of(ctx.obj("shift(Ecal,-2)")),
        calc.class_of(ctx.names["G"]),
    ]
    ok = list(tilted.classes) == expected
    return (
        ok,
        "classes of F[-1], Ecal[-2], G",
        f"labels {tilted.labels}, classes match: {ok}",
    )


def _check_tilt_dims(ctx: Context) -> tuple[bool, str, str]:
    heart = ctx.hearts["B"]
    d1 = heart.hom_table[0][2].get(1)
    d2 = heart.hom_table[1][2].get(1)
    ok = (d1, d2) == (1, 0)
    return ok, "multiplicities (1, 0)", f"({d1}, {d2})"


def _check_spherical(ctx: Context) -> tuple[bool, str, str]:
    calc = ctx.calc
    E = ctx.names["Ecal"]
    r = calc.rhom(E, E)
    dims_ok = r.status == "determined" and r.dims == GradedDims({0: 1, 3: 1})
    cls = calc.class_of(E)
    serre_ok = calc.ktheory.serre_class(cls) == cls.scale(-1)
    spherical = calc.is_spherical(E, 3) and calc.is_spherical(Shift(E, 1), 3)
    ok = dims_ok and serre_ok and spherical
    return (
        ok,
        "RHom(Ecal,Ecal) = {0: 1, 3: 1} and S[Ecal] = -[Ecal]",
        f"dims {r}, serre twist ok: {serre_ok}",
    )


def _check_descent_generator(ctx: Context) -> tuple[bool, str, str]:
    v = ctx.descent().serre_generator
    return v.ok, "kernel generated inside the positive cone", v.detail


def _check_descent_kerz(ctx: Context) -> tuple[bool, str, str]:
    v = ctx.descent().kernel_matches_ker_z
    return v.ok, "ker Z equals the kernel lattice", v.detail


def _check_descent_quotient(ctx: Context) -> tuple[bool, str, str]:
    rep = ctx.descent()
    ok = rep.quotient_built.ok and rep.quotient.rank == 1 and not rep.quotient.torsion
    return ok, "rank 1, torsion-free", rep.quotient_built.detail


def _check_descent_strong(ctx: Context) -> tuple[bool, str, str]:
    v = ctx.descent().induced_strong
    return v.ok, "induced charge is a strong stability function", v.detail


def _check_axioms_upstairs(ctx: Context) -> tuple[bool, str, str]:
    heart = ctx.hearts["Atilde"]
    _, Z = ctx.charges["Z_up"]
    rep = check_weak_stability_condition(
        heart, Z, mode="weak", quotient_data=ctx.descent().quotient
    )
    # the torsion-pair charge on B: slope of the third simple is smallest
    _, ZB = ctx.charges["Z_B"]
    s1 = slope(ZB, [1, 0, 0])
    s3 = slope(ZB, [0, 0, 1])
    order_ok = s1 > s3
    ok = rep.ok and order_ok
    return (
        ok,
        "weak axioms hold; torsion-pair slopes are ordered",
        f"stability fn: {rep.stability_function.ok}, support: {rep.support.ok}, "
        f"slope order {s1} > {s3}: {order_ok}",
    )


def _check_axioms_downstairs(ctx: Context) -> tuple[bool, str, str]:
    rep = ctx.descent()
    quot = rep.quotient
    induced = CentralCharge(rep.induced_values)
    nonzero_images = [img for img in rep.simple_images if any(img)]
    from .stability import check_support

    support = check_support(induced, QuadraticForm.zero(quot.rank), quot.rank, nonzero_images)
    strong_values = all(
        im > 0 or (im == 0 and re < 0)
        for re, im in (induced.value(img) for img in nonzero_images)
    )
    ok = rep.induced_strong.ok and support.ok and strong_values and quot.rank == 1
    return (
        ok,
        "strong stability + support on the rank-1 quotient",
        f"strong: {rep.induced_strong.ok}, support: {support.ok}",
    )


def _check_props_hrr(ctx: Context) -> tuple[bool, str, str]:
    bad = 0
    total = 0
    for twist in _twists_for(ctx):
        g = Geometry(GeometryConfig(*twist))
        unit = g.chern_character(DivisorClass(0, 0, 0))
        for nH in range(-4, 5):
            for nh in range(-4, 5):
                for nk in range(-4, 5):
                    D = DivisorClass(nH, nh, nk)
                    total += 1
                    if g.threefold_cohomology(D).euler() != g.hrr_euler(
                        unit, g.chern_character(D)
                    ):
                        bad += 1
    return bad == 0, "cohomology Euler numbers match Riemann-Roch", f"{bad}/{total} mismatches"


def _check_props_euler(ctx: Context) -> tuple[bool, str, str]:
    calc = ctx.calc
    kt = ctx.kt
    atoms: list[FormalObject] = []
    for nH in range(-2, 3):
        for nh in range(-2, 3):
            for nk in range(-2, 3):
                atoms.append(LineAtom(DivisorClass(nH, nh, nk)))
    for d in range(-2, 3):
        for e in range(-2, 3):
            atoms.append(PushAtom(SurfaceDivisor(d, e)))
    named = []
    if ctx.config.twist == DEFAULT_TWIST:
        named = [ctx.names[n] for n in ("G", "F", "Ecal")]
    bad = 0
    determined = 0
    total = 0
    pairs = [(x, y) for x in atoms for y in atoms]
    pairs += [(x, y) for x in named for y in atoms]
    pairs += [(x, y) for x in atoms for y in named]
    pairs += [(x, y) for x in named for y in named]
    for x, y in pairs:
        total += 1
        r = calc.rhom(x, y)
        expected = kt.euler_pairing(calc.class_of(x), calc.class_of(y))
        if r.euler != expected:
            bad += 1
        if r.status == "determined":
            determined += 1
            if r.dims.euler() != expected:
                bad += 1
    return (
        bad == 0,
        "every RHom Euler number equals the Chern-character pairing",
        f"{bad} mismatches over {total} pairs ({determined} determined)",
    )


def _check_props_involution(ctx: Context) -> tuple[bool, str, str]:
    # The class-level mutations kill [e], so they are inverse to each other
    # exactly on the orthogonal complements, matching the object-level
    # equivalences between perp(e) and e-perp.
    kt = ctx.kt
    rng = random.Random(1789)
    basis = kt.sod1_classes()
    bad = 0
    for _ in range(60):
        e = basis[rng.randrange(8)]
        coeffs = [rng.randint(-3, 3) for _ in range(8)]
        x = kt.from_coordinates(coeffs)
        lx = kt.mutate_class_left(e, x)
        if kt.euler_pairing(e, lx) != 0:
            bad += 1
        rx = kt.mutate_class_right(x, e)
        if kt.euler_pairing(rx, e) != 0:
            bad += 1
        left_domain = x - e.scale(kt.euler_pairing(x, e))  # chi(-, e) = 0
        if kt.mutate_class_right(kt.mutate_class_left(e, left_domain), e) != left_domain:
            bad += 1
        right_domain = x - e.scale(kt.euler_pairing(e, x))  # chi(e, -) = 0
        if kt.mutate_class_left(e, kt.mutate_class_right(right_domain, e)) != right_domain:
            bad += 1
    return (
        bad == 0,
        "class mutations are mutually inverse on the orthogonal complements",
        f"{bad} failures over 60 samples",
    )


def _random_expression(rng: random.Random, depth: int) -> str:
    def atom() -> str:
        if rng.random() < 0.5:
            return f"O({_random_divisor(rng)})"
        return f"OE({rng.randint(-2, 2)},{rng.randint(-2, 2)})"

    if depth == 0:
        return atom()
    roll = rng.random()
    if roll < 0.35:
        return atom()
    if roll < 0.55:
        return f"shift({_random_expression(rng, depth - 1)},{rng.randint(-2, 2)})"
    if roll < 0.7:
        n = rng.randint(2, 3)
        inner = ",".join(_random_expression(rng, depth - 1) for _ in range(n))
        return f"sum({inner})"
    if roll < 0.85:
        return f"cone({_random_expression(rng, depth - 1)},{_random_expression(rng, depth - 1)})"
    mutator = "L" if rng.random() < 0.5 else "R"
    e = f"O({_random_divisor(rng)})"
    x = atom() if rng.random() < 0.6 else f"shift({atom()},{rng.randint(-1, 1)})"
    if mutator == "L":
        return f"L({e},{x})"
    return f"R({x},{e})"


def _random_divisor(rng: random.Random) -> str:
    parts = []
    for sym in "Hhk":
        c = rng.randint(-2, 2)
        if c:
            parts.append(f"{'+' if c > 0 and parts else ''}{c if abs(c) != 1 else ('-' if c < 0 else '')}{sym}")
    return "".join(parts)


def _corpus(count: int = 100) -> list[str]:
    rng = random.Random(20240917)
    return [_random_expression(rng, rng.randint(0, 3)) for _ in range(count)]


def _check_props_normalize(ctx: Context) -> tuple[bool, str, str]:
    calc = ctx.calc
    bad = 0
    unsound = 0
    for text in _corpus():
        tree = parse_object(text)
        try:
            once = calc.normalize(tree)
        except PreconditionError:
            continue
        if calc.normalize(once) != once:
            bad += 1
        if calc.class_of(once) != calc.class_of(tree):
            unsound += 1
    ok = bad == 0 and unsound == 0
    return (
        ok,
        "normalize is idempotent and preserves classes on the corpus",
        f"{bad} non-idempotent, {unsound} class changes",
    )


def _check_props_roundtrip(ctx: Context) -> tuple[bool, str, str]:
    bad = 0
    for text in _corpus():
        tree = parse_object(text)
        if parse_object(pretty(tree)) != tree:
            bad += 1
    return bad == 0, "parse(print(x)) = x on the corpus", f"{bad} failures"


def _twists_for(ctx: Context) -> list[tuple[int, int]]:
    twists = [ctx.config.twist]
    for t in PROPERTY_TWISTS:
        if t not in twists:
            twists.append(t)
    return twists


REGISTRY: tuple[Check, ...] = (
    Check("sod1.semiorthogonal", "8 line bundles: no backward homs", "derived", True, _check_sod1_semiorthogonal),
    Check("sod1.basis-determinant", "line-bundle classes are a Z-basis", "derived", True, _check_sod1_determinant),
    Check("serre.canonical", "K = -2H-h-k", "pinned", True, _check_serre_canonical),
    Check("serre.duality-pairing", "chi(x,y) = chi(y,Sx)", "derived", True, _check_serre_duality_pairing),
    Check("serre.E-class", "E = H-h-k", "pinned", True, _check_serre_e_class),
    Check("serre.adjunction", "(K+E)|_E = -2h-2k", "pinned", True, _check_serre_adjunction),
    Check("k1.semiorthogonal", "resolution decomposition is semiorthogonal", "pinned", True, _check_k1_semiorthogonal),
    Check("kvso.step1.orthogonality", "RHom(O(iH), OE(-1,0)) = 0", "pinned", True, _check_step1),
    Check("kvso.step2.mutations", "mutations through O(2H), O(H+h+k), O(H)", "pinned", True, _check_step2),
    Check("kvso.step3.euler-mutations", "L_O O(h) = O(-h)[1] and twists", "pinned", True, _check_step3_euler),
    Check("kvso.step3.complete-orthogonality", "RHom(O(h+k), O(H-h)) = 0 etc.", "pinned", True, _check_step3_orthogonality),
    Check("kvso.step4.claim", "L_{O(-k)} L_O O(H-h) = OE(-1,0)", "pinned", True, _check_step4),
    Check("kvso.triple-exceptional", "length-3 exceptional collection", "pinned", True, _check_triple_exceptional),
    Check("kernel.generators", "kernel generated by [Ecal], [G]+[F]", "pinned", True, _check_kernel_generators),
    Check("kernel.rank", "kernel rank 2", "pinned", True, _check_kernel_rank),
    Check("kernel.quotient-Z", "quotient is Z", "pinned", True, _check_kernel_quotient),
    Check("kernel.relation-E-F-Oh", "[Ecal] = [F] + [O(-h)]", "pinned", True, _check_kernel_relation),
    Check("ext.triple", "(O(-h), G, F[-2]) is Ext-exceptional", "pinned", True, _check_ext_triple),
    Check("heart.B", "extension closure is a heart", "pinned", True, _check_heart_b),
    Check("tilt.simples", "tilt yields F[-1], Ecal[-2], G", "pinned", True, _check_tilt_simples),
    Check("tilt.univ-ext-dims", "Ext^1 multiplicities 1 and 0", "pinned", True, _check_tilt_dims),
    Check("spherical.K", "kernel generator is 3-spherical", "pinned", True, _check_spherical),
    Check("descent.serre-generator", "kernel visible in the heart", "pinned", True, _check_descent_generator),
    Check("descent.kerZ", "ker Z = kernel lattice", "pinned", True, _check_descent_kerz),
    Check("descent.quotient", "quotient is Z", "pinned", True, _check_descent_quotient),
    Check("descent.strong-downstairs", "induced charge is strong", "pinned", True, _check_descent_strong),
    Check("axioms.weak-upstairs", "weak stability condition upstairs", "pinned", True, _check_axioms_upstairs),
    Check("axioms.bridgeland-downstairs", "Bridgeland condition downstairs", "pinned", True, _check_axioms_downstairs),
    Check("props.hrr-vs-cohomology", "Riemann-Roch matches cohomology", "derived", False, _check_props_hrr),
    Check("props.euler-soundness", "RHom Euler numbers match the pairing", "derived", False, _check_props_euler),
    Check("props.mutation-involution", "class mutations are involutive", "derived", False, _check_props_involution),
    Check("props.normalize-idempotent", "normalize is idempotent", "derived", False, _check_props_normalize),
    Check("props.parser-roundtrip", "parser round-trip", "derived", False, _check_props_roundtrip),
)

CHECK_NAMES = tuple(c.name for c in REGISTRY)


def run_checks(
    config: Optional[HarnessConfig] = None,
    selection: Optional[Sequence[str]] = None,
) -> list[CheckResult]:
    config = config or default_config()
    validate_config(config)
    if selection is None:
        selection = config.selection
    if selection is not None:
        unknown = [n for n in selection if n not in CHECK_NAMES]
        if unknown:
            raise ConfigError(f"unknown check name(s): {', '.join(unknown)}")
    ctx = Context(config)
    results: list[CheckResult] = []
    for check in REGISTRY:
        if selection is not None and check.name not in selection:
            continue
        if check.default_twist_only and config.twist != DEFAULT_TWIST:
            results.append(
                CheckResult(
                    check.name,
                    "skipped",
                    "-",
                    f"golden values are specific to twist {DEFAULT_TWIST}; "
                    f"configured twist is {config.twist}",
                    check.anchor,
                    check.tag,
                )
            )
            continue
        try:
            ok, expected, actual = check.runner(ctx)
            status = "pass" if ok else "fail"
        except Exception as exc:  # ambiguity or precondition failures
            status = "ambiguous"
            expected = check.anchor
            actual = f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(check.name, status, expected, actual, check.anchor, check.tag))
    return results


def emit_report(
    results: Sequence[CheckResult],
    fmt: str = "text",
    twist: tuple[int, int] = DEFAULT_TWIST,
    timestamp: Optional[str] = None,
) -> str:
    if fmt == "text":
        lines = []
        width = max((len(r.name) for r in results), default=10)
        for r in results:
            lines.append(
                f"[{r.status.upper():<9}] {r.name:<{width}}  "
                f"expected: {r.expected}  actual: {r.actual}"
            )
        counts = {}
        for r in results:
            counts[r.status] = counts.get(r.status, 0) + 1
        summary = ", ".join(f"{v} {k}" for k, v in sorted(counts.items()))
        lines.append(f"-- {len(results)} checks: {summary or 'none selected'}")
        return "\n".join(lines)
    if fmt == "json":
        import json

        doc = {
            "version": REPORT_VERSION,
            "geometry": {"twist": list(twist)},
            "results": [r.to_dict() for r in results],
        }
        if timestamp is not None:
            doc["timestamp"] = timestamp
        return json.dumps(doc, indent=2, sort_keys=True)
    raise ConfigError(f"unknown report format {fmt!r}")
