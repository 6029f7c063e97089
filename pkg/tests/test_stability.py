from fractions import Fraction

import pytest

from quadstab.geometry import GradedDims
from quadstab.calculus import PreconditionError
from quadstab.stability import (
    INFINITY,
    CentralCharge,
    QuadraticForm,
    StabilityError,
    check_stability_function,
    check_support,
    check_weak_stability_condition,
    descend,
    hn_filtration,
    make_heart,
    slope,
    tilt_at,
)

Q = Fraction

I = (0, 1)  # the charge value i as an exact pair


@pytest.fixture(scope="module")
def heart_B(ctx):
    return ctx.hearts["B"]


@pytest.fixture(scope="module")
def heart_A(ctx):
    return ctx.hearts["Atilde"]


@pytest.fixture(scope="module")
def Z_up(ctx):
    return ctx.charges["Z_up"][1]


class TestMakeHeart:
    def test_heart_from_shifted_triple(self, ctx, heart_B):
        assert len(heart_B) == 3
        assert heart_B.provenance == "extExceptional"
        # hom table diagonal: one-dimensional endomorphisms
        for i in range(3):
            assert heart_B.hom_table[i][i] == GradedDims({0: 1})

    def test_unshifted_triple_rejected_with_witness(self, ctx):
        with pytest.raises(PreconditionError) as err:
            make_heart(
                ctx.calc,
                [("S1", ctx.obj("O(-h)")), ("S2", ctx.names["G"]), ("S3", ctx.names["F"])],
            )
        assert "Hom^-1(S1, S3)" in str(err.value)

    def test_single_simple_heart(self, ctx):
        heart = make_heart(ctx.calc, [("S", ctx.obj("O(2H)"))])
        assert len(heart) == 1

    def test_dependent_classes_rejected(self, ctx):
        with pytest.raises(PreconditionError):
            make_heart(
                ctx.calc,
                [("A", ctx.obj("O(h)")), ("B", ctx.obj("shift(O(h),2)"))],
            )


class TestSlope:
    def test_purely_imaginary(self):
        Z = CentralCharge.of([I])
        assert slope(Z, [1]) == 0

    def test_real_value_is_infinite(self):
        Z = CentralCharge.of([(-1, 0)])
        assert slope(Z, [1]) == INFINITY

    def test_mixed(self):
        Z = CentralCharge.of([(-1, 1)])
        assert slope(Z, [1]) == 1

    def test_scaling_invariance(self):
        Z = CentralCharge.of([(-2, 3), (1, 1)])
        assert slope(Z, [2, 4]) == slope(Z, [1, 2])

    def test_rejects_zero_and_negative(self):
        Z = CentralCharge.of([I])
        with pytest.raises(StabilityError):
            slope(Z, [0])
        with pytest.raises(StabilityError):
            slope(Z, [-1])


class TestStabilityFunction:
    def test_weak_passes_with_zero_value(self, heart_A):
        Z = CentralCharge.of([I, (0, 0), I])
        report = check_stability_function(heart_A, Z, "weak")
        assert report.ok
        strong = check_stability_function(heart_A, Z, "strong")
        assert not strong.ok
        assert strong.kernel_directions == (1,)

    def test_strong_passes_upper_half(self, heart_B):
        Z = CentralCharge.of([I, I, I])
        assert check_stability_function(heart_B, Z, "strong").ok

    def test_positive_real_fails_weak(self, heart_B):
        Z = CentralCharge.of([I, I, (1, 0)])
        report = check_stability_function(heart_B, Z, "weak")
        assert not report.ok

    def test_negative_real_passes_weak_and_strong(self, heart_B):
        Z = CentralCharge.of([(-1, 0), I, I])
        assert check_stability_function(heart_B, Z, "weak").ok
        assert check_stability_function(heart_B, Z, "strong").ok


class TestHNFiltration:
    def test_groups_sorted_by_slope(self):
        Z = CentralCharge.of([(-1, 0), I, (0, 1)])
        # slopes: inf, 0, 0
        out = hn_filtration(Z, [0, 1, 2, 2])
        assert out[0][0] == INFINITY and out[0][1] == {0: 1}
        assert out[1][0] == 0 and out[1][1] == {1: 1, 2: 2}

    def test_zero_charge_simple_has_infinite_slope(self):
        Z = CentralCharge.of([I, (0, 0), I])
        out = hn_filtration(Z, [1])
        assert out == [(INFINITY, {1: 1})]

    def test_homogeneous_multiset(self):
        Z = CentralCharge.of([I, I])
        out = hn_filtration(Z, [0, 1, 0])
        assert len(out) == 1

    def test_empty_rejected(self):
        with pytest.raises(StabilityError):
            hn_filtration(CentralCharge.of([I]), [])


class TestTilt:
    def test_tilted_simples(self, ctx, heart_B, heart_A):
        calc = ctx.calc
        expected = [
            calc.class_of(ctx.obj("shift(F,-1)")),
            calc.class_of(ctx.obj("shift(Ecal,-2)")),
            calc.class_of(ctx.names["G"]),
        ]
        assert list(heart_A.classes) == expected

    def test_universal_extension_multiplicities(self, heart_B):
        assert heart_B.hom_table[0][2].get(1) == 1
        assert heart_B.hom_table[1][2].get(1) == 0

    def test_second_simple_persists(self, ctx, heart_A):
        # the simple with no extension survives the tilt unchanged
        assert heart_A.simples[2] == ctx.names["G"]

    def test_class_bookkeeping(self, heart_B, heart_A):
        total_new = heart_A.classes[0]
        for c in heart_A.classes[1:]:
            total_new = total_new + c
        d = [heart_B.hom_table[i][2].get(1) for i in range(2)]
        expected = heart_B.classes[2].scale(-1)
        for i in range(2):
            expected = expected + heart_B.classes[i] + heart_B.classes[2].scale(d[i])
        assert total_new == expected

    def test_tilt_requires_torsion_pair(self, ctx, heart_B):
        # an Ext-exceptional heart always satisfies the precondition, so
        # fabricate a hom table with a degree-0 hom into the chosen simple
        from quadstab.stability import Heart

        table = [list(row) for row in heart_B.hom_table]
        table[0][2] = GradedDims({0: 1, 1: 1})
        fake = Heart(
            heart_B.labels,
            heart_B.simples,
            heart_B.classes,
            tuple(tuple(row) for row in table),
            heart_B.provenance,
        )
        with pytest.raises(PreconditionError) as err:
            tilt_at(ctx.calc, fake, 2)
        assert "Hom^0" in str(err.value)

    def test_tilt_index_range(self, ctx, heart_B):
        with pytest.raises(StabilityError):
            tilt_at(ctx.calc, heart_B, 5)

    def test_universal_extension_is_spherical_kernel_class(self, ctx, heart_A):
        calc = ctx.calc
        assert calc.class_of(heart_A.simples[1]) == calc.class_of(
            ctx.obj("shift(Ecal,-2)")
        )
        r = calc.rhom(heart_A.simples[1], heart_A.simples[1])
        assert r.dims == GradedDims({0: 1, 3: 1})


class TestSupport:
    def test_zero_form_with_trivial_kernel(self):
        Z = CentralCharge.of([I])
        report = check_support(Z, QuadraticForm.zero(1), 1, [[1]])
        assert report.ok and report.kernel_rank == 0

    def test_indefinite_form_on_kernel(self):
        # Z = first coordinate: kernel is the second axis
        Z = CentralCharge.of([(0, 1), (0, 0)])
        good = check_support(Z, QuadraticForm.diagonal([1, -1]), 2, [[1, 0], [2, 0]])
        assert good.ok
        bad = check_support(Z, QuadraticForm.diagonal([1, 1]), 2, [[1, 0]])
        assert not bad.ok and not bad.negative_definite

    def test_nonnegative_requirement(self):
        Z = CentralCharge.of([(0, 1), (0, 0)])
        report = check_support(Z, QuadraticForm.diagonal([-1, -1]), 2, [[1, 0]])
        assert not report.nonnegative_on_classes

    def test_symmetry_required(self):
        with pytest.raises(StabilityError):
            QuadraticForm(((Q(0), Q(1)), (Q(0), Q(0))))


class TestDescent:
    def test_all_four_verdicts(self, ctx):
        report = ctx.descent()
        assert report.serre_generator.ok
        assert report.kernel_matches_ker_z.ok
        assert report.quotient_built.ok
        assert report.induced_strong.ok
        assert report.ok

    def test_kernel_in_simple_coordinates(self, ctx):
        from quadstab.lattice import IntegerLattice

        report = ctx.descent()
        assert report.kernel_in_simple_coords == IntegerLattice(
            3, [[0, 1, 0], [-1, 0, 1]]
        )

    def test_quotient_is_integers(self, ctx):
        report = ctx.descent()
        assert report.quotient.rank == 1
        assert report.quotient.torsion == ()

    def test_induced_charge_functoriality(self, ctx, Z_up):
        report = ctx.descent()
        for i in range(3):
            unit = [1 if t == i else 0 for t in range(3)]
            img = report.simple_images[i]
            via_quotient = (
                sum(Q(img[t]) * report.induced_values[t][0] for t in range(1)),
                sum(Q(img[t]) * report.induced_values[t][1] for t in range(1)),
            )
            assert via_quotient == Z_up.value(unit)

    def test_wrong_charge_fails_kernel_match(self, ctx, heart_A):
        Z = CentralCharge.of([I, I, I])
        report = descend(ctx.calc, heart_A, ctx.kernel_classes(), Z)
        assert not report.kernel_matches_ker_z.ok

    def test_full_kernel_fails_strong(self, ctx, heart_A):
        # kernel = everything: quotient rank 0, zero induced charge, and the
        # strong verdict fails because nothing survives
        Z = CentralCharge.of([(0, 0), (0, 0), (0, 0)])
        all_classes = list(heart_A.classes)
        report = descend(ctx.calc, heart_A, all_classes, Z)
        assert report.quotient.rank == 0
        assert not report.induced_strong.ok


class TestAxiomBundles:
    def test_weak_upstairs(self, ctx, heart_A, Z_up):
        report = check_weak_stability_condition(
            heart_A, Z_up, mode="weak", quotient_data=ctx.descent().quotient
        )
        assert report.ok
        assert report.hn_property.ok

    def test_strong_upstairs_fails(self, ctx, heart_A, Z_up):
        report = check_weak_stability_condition(
            heart_A, Z_up, mode="strong", quotient_data=ctx.descent().quotient
        )
        assert not report.ok

    def test_bridgeland_downstairs(self, ctx):
        rep = ctx.descent()
        induced = CentralCharge(rep.induced_values)
        nonzero = [img for img in rep.simple_images if any(img)]
        support = check_support(
            induced, QuadraticForm.zero(rep.quotient.rank), rep.quotient.rank, nonzero
        )
        assert support.ok
        for img in nonzero:
            re, im = induced.value(img)
            assert im > 0 or (im == 0 and re < 0)

    def test_failing_axiom_a(self, ctx, heart_B):
        Z = CentralCharge.of([(1, 0), I, I])
        report = check_weak_stability_condition(heart_B, Z, mode="weak")
        assert not report.ok
        assert not report.stability_function.ok
