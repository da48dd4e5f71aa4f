import json

import pytest

import oracles
from triplepass.actions import (
    ActionInstance,
    Point,
    act,
    build_instance,
    check_masking_coverage,
    check_transcript_equivalence,
    commutator_fixed_carrier_points,
    format_point,
    instance_from_descriptor,
    instance_index,
    instance_to_descriptor,
    is_commutator_fixed_point,
    is_commutator_fixed_set,
    parse_point,
    rational_demo_instance,
    recheck_counterexample,
    secret_square_points,
    trivial_instance,
)
from triplepass.errors import SingularMatrixError, TriplePassError, WorkCapExceeded
from triplepass.fields import PrimeField
from triplepass.matrices import Mat2

F2 = PrimeField(2)
F3 = PrimeField(3)
F5 = PrimeField(5)


def pt(field, x, y):
    return Point(field.scalar(x), field.scalar(y))


class TestAct:
    def test_identity_fixes_everything(self):
        p = pt(F5, 2, 3)
        assert act(Mat2.identity(F5), p) == p

    def test_f2_shear(self):
        assert oracles.act(2, (1, 0), (1, 1, 0, 1)) == (1, 1)
        assert act(Mat2.from_values(F2, 1, 1, 0, 1), pt(F2, 1, 0)) == pt(F2, 1, 1)

    def test_f5_diagonal(self):
        assert oracles.act(5, (2, 3), (2, 0, 0, 1)) == (4, 3)
        assert act(Mat2.from_values(F5, 2, 0, 0, 1), pt(F5, 2, 3)) == pt(F5, 4, 3)

    def test_domain_mismatch(self):
        with pytest.raises(TriplePassError):
            act(Mat2.identity(F2), pt(F5, 1, 1))

    def test_singular_matrix_rejected(self):
        with pytest.raises(SingularMatrixError):
            act(Mat2.from_values(F5, 1, 2, 2, 4), pt(F5, 1, 1))

    def test_composition_convention(self):
        # act(g*h, x) applies g first: act(h, act(g, x)).
        g = Mat2.from_values(F5, 1, 2, 0, 1)
        h = Mat2.from_values(F5, 2, 0, 1, 3)
        x = pt(F5, 3, 4)
        assert act(g @ h, x) == act(h, act(g, x))


def test_point_literals():
    p = pt(F5, 0, 4)
    assert format_point(p) == "[0,4]@F5"
    assert parse_point("[0,4]@F5") == p
    with pytest.raises(ValueError):
        parse_point("(0,4)@F5")
    with pytest.raises(ValueError):
        parse_point("[0,4,1]@F5")


class TestBuildInstance:
    def test_rotation_sizes_match_circle_count(self):
        # Oracle: brute-force solutions of c^2 + s^2 = 1 (mod p).
        for p, expected in ((5, 4), (7, 8)):
            inst = build_instance("rotation", p)
            assert len(oracles.rotation_elements(p)) == expected
            assert len(inst.group) == expected
            assert {m.residues() for m in inst.group} == set(oracles.rotation_elements(p))

    def test_diagonal_size(self):
        assert len(build_instance("diagonal", 5).group) == 16

    def test_scalar_group(self):
        inst = build_instance("scalar", 5)
        assert len(inst.group) == 4
        assert all(m.b.is_zero and m.c.is_zero and m.a == m.d for m in inst.group)

    def test_general_linear(self):
        assert len(build_instance("general-linear", 3).group) == 48

    def test_default_domains(self):
        inst = build_instance("diagonal", 5)
        assert [s.value for s in inst.secret_domain] == [1, 2, 3, 4]
        assert [t.value for t in inst.t_domain] == [0, 1, 2, 3, 4]
        assert inst.multiplicative

    def test_borel_embedded_lands_on_fixed_line(self):
        inst = build_instance("borel-embedded", 5)
        assert [s.value for s in inst.secret_domain] == [1, 2]
        assert [t.value for t in inst.t_domain] == [1, 2]
        for point in inst.embedding.values():
            assert point.x.is_zero and not point.y.is_zero
        report = is_commutator_fixed_set(secret_square_points(inst), inst.group, inst.name)
        assert report.passed

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="unknown instance kind"):
            build_instance("permutation", 5)

    def test_custom_requires_generators(self):
        with pytest.raises(ValueError, match="generators"):
            build_instance("custom", 5)

    def test_custom_accepts_literals(self):
        inst = build_instance("custom", 5, generators=["[[2,0],[0,1]]@F5", "[[1,0],[0,2]]@F5"])
        assert len(inst.group) == 16

    def test_zero_secret_marks_instance_non_multiplicative(self):
        inst = build_instance("diagonal", 5, secret_domain=[0, 1, 2, 3, 4])
        assert not inst.multiplicative

    def test_explicit_multiplicative_with_zero_rejected(self):
        with pytest.raises(ValueError, match="multiplicative"):
            build_instance("diagonal", 5, secret_domain=[0, 1], multiplicative=True)

    def test_trivial_instance(self):
        inst = trivial_instance(5)
        assert len(inst.group) == 1
        assert [s.value for s in inst.secret_domain] == [1]


def test_non_injective_embedding_rejected():
    fp = F3
    group = build_instance("borel-embedded", 3).group
    s1 = fp.scalar(1)
    with pytest.raises(ValueError, match="injective"):
        ActionInstance(
            name="bad",
            field=fp,
            group=group,
            secret_domain=(s1, fp.scalar(2)),
            t_domain=(s1, fp.scalar(2)),
            embedding={
                (s, t): Point(fp.zero, fp.one)
                for s in (s1, fp.scalar(2))
                for t in (s1, fp.scalar(2))
            },
            multiplicative=True,
        )


def test_action_axioms_exhaustive_on_standard_instances(
    diag5, rot3, rot7, gl2f2, gl2f3, borel3_embedded
):
    for inst in (diag5, rot3, rot7, gl2f2, gl2f3, borel3_embedded):
        idx = instance_index(inst)
        group = inst.group
        ident_row = idx.act_table[group.identity_index]
        assert ident_row == list(range(idx.n_points))
        table = group.multiplication_table
        for i in range(len(group)):
            for j in range(len(group)):
                composed = idx.act_table[table[i][j]]
                for x in range(idx.n_points):
                    assert composed[x] == idx.act_table[j][idx.act_table[i][x]]


class TestCommutatorFixed:
    def test_abelian_group_fixes_everything(self, diag5):
        for x in range(5):
            for y in range(5):
                assert is_commutator_fixed_point(pt(F5, x, y), diag5.group)

    def test_fixed_line_of_upper_triangular_f3(self, borel3_plane):
        group = borel3_plane.group
        for y in range(3):
            assert is_commutator_fixed_point(pt(F3, 0, y), group)
        assert not is_commutator_fixed_point(pt(F3, 1, 0), group)

    def test_gl2_f2_moves_the_point_one_zero(self, gl2f2):
        # Oracle: exhaust the order-3 commutator subgroup directly.
        sub = oracles.comm_subgroup(2, oracles.gl2(2))
        assert any(oracles.act(2, (1, 0), m) != (1, 0) for m in sub)
        assert not is_commutator_fixed_point(pt(F2, 1, 0), gl2f2.group)

    def test_modes_agree_on_every_point(self, gl2f2, gl2f3, borel3_plane):
        for inst in (gl2f2, gl2f3, borel3_plane):
            p = inst.field.p
            for x in range(p):
                for y in range(p):
                    point = pt(inst.field, x, y)
                    assert is_commutator_fixed_point(point, inst.group, "subgroup") == (
                        is_commutator_fixed_point(point, inst.group, "pairwise")
                    )

    def test_fixed_set_reports(self, diag5, gl2f2, borel3_plane):
        plane5 = [pt(F5, x, y) for x in range(5) for y in range(5)]
        assert is_commutator_fixed_set(plane5, diag5.group).passed

        line = [pt(F3, 0, y) for y in range(3)]
        assert is_commutator_fixed_set(line, borel3_plane.group).passed

        plane2 = [pt(F2, x, y) for x in range(2) for y in range(2)]
        report = is_commutator_fixed_set(plane2, gl2f2.group, "gl2-plane")
        assert not report.passed
        assert report.counterexample is not None
        assert recheck_counterexample(gl2f2, report)

    def test_requires_finite_group(self):
        with pytest.raises(TriplePassError, match="finite group"):
            is_commutator_fixed_point(pt(F5, 1, 1), "rational-gl2")

    def test_fixed_carrier_points_of_borel(self, borel3_plane):
        fixed = commutator_fixed_carrier_points(borel3_plane.group)
        assert [(q.x.value, q.y.value) for q in fixed] == [(0, 0), (0, 1), (0, 2)]


class TestMaskingCoverage:
    def test_trivial_instance_passes(self, trivial5):
        assert check_masking_coverage(trivial5).passed

    def test_diagonal_passes(self, diag5):
        report = check_masking_coverage(diag5)
        assert report.passed
        assert report.counterexample is None

    def test_zero_secret_breaks_coverage(self):
        inst = build_instance("diagonal", 5, secret_domain=[0, 1, 2, 3, 4])
        report = check_masking_coverage(inst)
        assert not report.passed
        assert recheck_counterexample(inst, report)

    def test_cap(self, diag5):
        with pytest.raises(WorkCapExceeded) as exc:
            check_masking_coverage(diag5, cap=10)
        assert exc.value.estimate > 10

    def test_rational_rejected(self):
        with pytest.raises(TriplePassError, match="finite group"):
            check_masking_coverage(rational_demo_instance())


class TestTranscriptEquivalence:
    def test_trivial_instance_passes(self, trivial5):
        assert check_transcript_equivalence(trivial5).passed

    def test_diagonal_fails_with_smallest_counterexample(self, diag5):
        report = check_transcript_equivalence(diag5)
        assert not report.passed
        # Lexicographic tie-break: the identity masks on (1, 1) already
        # pin the secret, so s' = 2 is the first unexplained candidate.
        assert report.counterexample == {
            "s": "1",
            "t": "1",
            "A": "[[1,0],[0,1]]@F5",
            "B": "[[1,0],[0,1]]@F5",
            "s_prime": "2",
        }
        assert recheck_counterexample(diag5, report)

    def test_rotation_fails(self, rot7):
        report = check_transcript_equivalence(rot7)
        assert not report.passed
        assert recheck_counterexample(rot7, report)

    def test_equivalence_implies_masking(
        self, trivial5, diag5, diag3, rot3, rot7, gl2f2, gl2f3, borel3_embedded
    ):
        for inst in (trivial5, diag5, diag3, rot3, rot7, gl2f2, gl2f3, borel3_embedded):
            if check_transcript_equivalence(inst).passed:
                assert check_masking_coverage(inst).passed, inst.name

    def test_deterministic_reports(self, diag5):
        a = check_transcript_equivalence(diag5)
        b = check_transcript_equivalence(diag5)
        assert a == b

    def test_cap(self, gl2f3):
        with pytest.raises(WorkCapExceeded):
            check_transcript_equivalence(gl2f3, cap=1000)


class TestDescriptors:
    def test_round_trip_standard_kinds(self, diag5, rot7, borel3_embedded, trivial5):
        for inst in (diag5, rot7, borel3_embedded, trivial5):
            desc = instance_to_descriptor(inst)
            rebuilt = instance_from_descriptor(json.loads(json.dumps(desc)))
            assert rebuilt.name == inst.name
            assert rebuilt.group.elements == inst.group.elements
            assert rebuilt.secret_domain == inst.secret_domain
            assert rebuilt.t_domain == inst.t_domain
            assert rebuilt.embedding == inst.embedding

    def test_custom_round_trip(self, borel3_plane):
        desc = instance_to_descriptor(borel3_plane)
        rebuilt = instance_from_descriptor(desc)
        assert rebuilt.group.elements == borel3_plane.group.elements
        assert rebuilt.name == borel3_plane.name
