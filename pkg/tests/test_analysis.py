import math
import random
from fractions import Fraction

import pytest

import oracles
from triplepass.actions import (
    Point,
    build_instance,
    check_transcript_equivalence,
    instance_from_descriptor,
)
from triplepass.analysis import (
    enumerate_consistent,
    exact_mutual_information,
    find_witness,
    mutual_information_bits,
    posterior_from_transcript,
    quotient_attack,
    search_instances,
)
from triplepass.errors import (
    AttackInapplicableError,
    InconsistentTranscriptError,
    TriplePassError,
    WorkCapExceeded,
)
from triplepass.fields import PrimeField
from triplepass.matrices import Mat2
from triplepass.protocol import SecretEncoding, Transcript, run_session, run_session_with

F2 = PrimeField(2)
F5 = PrimeField(5)
F7 = PrimeField(7)


def pt(field, x, y):
    return Point(field.scalar(x), field.scalar(y))


def lab_transcript(instance, s, t, a, b):
    fp = instance.field
    enc = SecretEncoding(fp.scalar(s), fp.scalar(t), instance.secret_pair_point(fp.scalar(s), fp.scalar(t)))
    return run_session_with(instance, enc, Mat2.from_values(fp, *a), Mat2.from_values(fp, *b)).transcript


def oracle_witnesses(instance, transcript):
    p = instance.field.p
    elems = [m.residues() for m in instance.group]
    tau = tuple((v.x.value, v.y.value) for v in (transcript.v1, transcript.v2, transcript.v3))
    secrets = [s.value for s in instance.secret_domain]
    t_values = [t.value for t in instance.t_domain]
    if instance.embedding is None:
        return oracles.witnesses(p, secrets, t_values, elems, tau)
    # Embedded variant: enumerate pairs through the embedding table.
    found = []
    for (s, t), point in instance.embedding.items():
        v = (point.x.value, point.y.value)
        for a in elems:
            if oracles.act(p, v, a) != tau[0]:
                continue
            if oracles.act(p, tau[1], oracles.minv(p, a)) != tau[2]:
                continue
            for b in elems:
                if oracles.act(p, tau[0], b) == tau[1]:
                    found.append((s.value, t.value, a, b))
    return found


class TestEnumerateConsistent:
    def test_ground_truth_is_always_a_witness(self, diag5, gl2f3):
        for inst in (diag5, gl2f3):
            rng = random.Random(17)
            for i in range(20):
                s = inst.secret_domain[rng.randrange(len(inst.secret_domain))]
                out = run_session(inst, s, rng, session_id=i)
                ws = enumerate_consistent(out.transcript, inst)
                truth = out.transcript.ground_truth
                assert (truth.s, truth.t, truth.mask_a, truth.mask_b) in ws.witnesses

    def test_trivial_instance_has_exactly_one_witness(self, trivial5):
        out = run_session(trivial5, F5.scalar(1), random.Random(1))
        ws = enumerate_consistent(out.transcript, trivial5)
        assert len(ws.witnesses) == 1

    def test_diagonal_witnesses_all_share_the_true_secret(self, diag5):
        transcript = lab_transcript(diag5, 2, 3, (2, 0, 0, 1), (3, 0, 0, 4))
        ws = enumerate_consistent(transcript, diag5)
        assert {w[0].value for w in ws.witnesses} == {2}
        assert sum(ws.counts_by_secret.values()) == len(ws.witnesses)

    def test_matches_four_deep_oracle(self, diag5, gl2f2, rot7):
        rng = random.Random(23)
        for inst in (diag5, gl2f2, rot7):
            for i in range(5):
                s = inst.secret_domain[rng.randrange(len(inst.secret_domain))]
                out = run_session(inst, s, rng, session_id=i)
                ws = enumerate_consistent(out.transcript, inst)
                got = sorted(
                    (w[0].value, w[1].value, w[2].residues(), w[3].residues())
                    for w in ws.witnesses
                )
                assert got == sorted(oracle_witnesses(inst, out.transcript))

    def test_instance_mismatch_rejected(self, diag5, rot7):
        out = run_session(diag5, F5.scalar(2), random.Random(1))
        with pytest.raises(TriplePassError, match="transcript is for"):
            enumerate_consistent(out.transcript, rot7)

    def test_cap(self, diag5):
        out = run_session(diag5, F5.scalar(2), random.Random(1))
        with pytest.raises(WorkCapExceeded):
            enumerate_consistent(out.transcript, diag5, cap=10)


class TestFindWitness:
    def test_true_secret_always_has_a_witness(self, diag5):
        rng = random.Random(3)
        for i in range(10):
            s = diag5.secret_domain[rng.randrange(4)]
            out = run_session(diag5, s, rng, session_id=i)
            found = find_witness(out.transcript, diag5, s)
            assert found is not None
            t_prime, a_prime, b_prime = found
            v = Point(s, t_prime)
            assert out.transcript.v1 == Point(
                v.x * a_prime.a + v.y * a_prime.c, v.x * a_prime.b + v.y * a_prime.d
            )

    def test_wrong_secret_has_no_witness_on_diagonal(self, diag5):
        transcript = lab_transcript(diag5, 2, 3, (2, 0, 0, 1), (3, 0, 0, 4))
        for s in (1, 3, 4):
            assert find_witness(transcript, diag5, F5.scalar(s)) is None

    def test_agrees_with_enumeration_everywhere_on_gl2_f2(self, gl2f2):
        fp = gl2f2.field
        for s in gl2f2.secret_domain:
            for t in gl2f2.t_domain:
                for a in gl2f2.group:
                    for b in gl2f2.group:
                        enc = SecretEncoding(s, t, Point(s, t))
                        out = run_session_with(gl2f2, enc, a, b)
                        ws = enumerate_consistent(out.transcript, gl2f2)
                        for candidate in gl2f2.secret_domain:
                            found = find_witness(out.transcript, gl2f2, candidate)
                            expected = candidate in ws.counts_by_secret
                            assert (found is not None) == expected


class TestPosterior:
    def test_diagonal_is_a_point_mass(self, diag5):
        transcript = lab_transcript(diag5, 2, 3, (2, 0, 0, 1), (3, 0, 0, 4))
        report = posterior_from_transcript(transcript, diag5)
        assert report.posterior[F5.scalar(2)] == 1
        assert report.support == (F5.scalar(2),)
        assert not report.uniform

    def test_trivial_instance_is_uniform_on_its_single_secret(self, trivial5):
        out = run_session(trivial5, F5.scalar(1), random.Random(1))
        report = posterior_from_transcript(out.transcript, trivial5)
        assert report.uniform
        assert report.posterior[F5.scalar(1)] == 1

    def test_rotation_transcript_pins_the_secret(self, rot7):
        # The rotation action is free away from the origin, so the third
        # message pins the unmasking rotation and with it the encoded
        # point: the posterior collapses to the true secret. The in-test
        # four-deep oracle agrees, and the support is strictly inside the
        # norm circle whenever that circle holds more than one secret.
        transcript = lab_transcript(rot7, 1, 2, (0, 1, 6, 0), (2, 2, 5, 2))
        report = posterior_from_transcript(transcript, rot7)
        assert [s.value for s in report.support] == [1]

        oracle_support = sorted({w[0] for w in oracle_witnesses(rot7, transcript)})
        assert oracle_support == [1]

        circle = oracles.norm_circle(7, 5, range(1, 7), range(7))
        assert circle == {1, 2, 5, 6}
        assert set(oracle_support) < circle

    def test_prior_reweights_witness_counts(self, diag5):
        # t = 0 transcripts keep sixteen witnesses, all sharing the true
        # secret, so any full-support prior still yields a point mass.
        transcript = lab_transcript(diag5, 2, 0, (2, 0, 0, 1), (3, 0, 0, 4))
        prior = {
            F5.scalar(1): Fraction(1, 2),
            F5.scalar(2): Fraction(1, 6),
            F5.scalar(3): Fraction(1, 6),
            F5.scalar(4): Fraction(1, 6),
        }
        report = posterior_from_transcript(transcript, diag5, prior)
        assert report.posterior[F5.scalar(2)] == 1

    def test_prior_validation(self, diag5):
        with pytest.raises(ValueError, match="sum"):
            posterior_from_transcript(
                lab_transcript(diag5, 2, 3, (2, 0, 0, 1), (3, 0, 0, 4)),
                diag5,
                {F5.scalar(2): Fraction(1, 2)},
            )
        with pytest.raises(ValueError, match="not a valid secret"):
            posterior_from_transcript(
                lab_transcript(diag5, 2, 3, (2, 0, 0, 1), (3, 0, 0, 4)),
                diag5,
                {F5.scalar(0): Fraction(1)},
            )

    def test_impossible_transcript_raises(self, diag5):
        # Diagonal masks never zero the first coordinate of a nonzero secret.
        fake = Transcript("diagonal-f5", pt(F5, 0, 1), pt(F5, 0, 1), pt(F5, 0, 1))
        with pytest.raises(InconsistentTranscriptError, match="inconsistent transcript"):
            posterior_from_transcript(fake, diag5)

    def test_posterior_is_order_independent(self, diag5):
        out = run_session(diag5, F5.scalar(3), random.Random(8))
        report = posterior_from_transcript(out.transcript, diag5)
        ws = enumerate_consistent(out.transcript, diag5)
        shuffled = list(ws.witnesses)
        random.Random(0).shuffle(shuffled)
        counts: dict = {}
        for w in shuffled:
            counts[w[0]] = counts.get(w[0], 0) + 1
        total = sum(counts.values())
        recomputed = {s: Fraction(c, total) for s, c in counts.items()}
        for s, mass in report.posterior.items():
            assert mass == recomputed.get(s, Fraction(0))


class TestExactMutualInformation:
    def test_diagonal_f5_total_break_is_exactly_two_bits(self, diag5):
        report = exact_mutual_information(diag5)
        assert report.mutual_information_bits == 2.0
        assert not report.zero_leakage

    def test_identity_group_reveals_everything(self):
        inst = build_instance(
            "custom", 3, generators=[Mat2.identity(PrimeField(3))], name="identity-f3"
        )
        report = exact_mutual_information(inst)
        # Two equally likely secrets, fully revealed: exactly one bit.
        assert report.mutual_information_bits == 1.0
        assert not report.zero_leakage

    def test_trivial_instance_leaks_nothing(self, trivial5):
        report = exact_mutual_information(trivial5)
        assert report.mutual_information_bits == 0.0
        assert report.zero_leakage

    def test_rotation_f7_is_a_total_break(self, rot7):
        report = exact_mutual_information(rot7)
        assert report.mutual_information_bits == math.log2(6)
        assert not report.zero_leakage

    def test_bounds_hold_across_instances(self, diag5, diag3, rot3, rot7, gl2f2, gl2f3, trivial5):
        for inst in (diag5, diag3, rot3, rot7, gl2f2, gl2f3, trivial5):
            report = exact_mutual_information(inst)
            assert 0.0 <= report.mutual_information_bits
            assert report.mutual_information_bits <= math.log2(len(inst.secret_domain)) + 1e-9
            if report.zero_leakage:
                assert report.mutual_information_bits == 0.0

    def test_zero_leakage_iff_transcript_equivalence(
        self, trivial5, diag3, diag5, rot3, rot7, gl2f2, gl2f3, borel3_embedded, borel5_embedded
    ):
        for inst in (
            trivial5, diag3, diag5, rot3, rot7, gl2f2, gl2f3, borel3_embedded, borel5_embedded,
        ):
            leak = exact_mutual_information(inst)
            equiv = check_transcript_equivalence(inst)
            assert leak.zero_leakage == equiv.passed, inst.name

    def test_worker_count_does_not_change_the_report(self, diag5, rot7):
        for inst in (diag5, rot7):
            one = exact_mutual_information(inst, workers=1)
            four = exact_mutual_information(inst, workers=4)
            assert one == four

    def test_cap(self, gl2f3):
        with pytest.raises(WorkCapExceeded):
            exact_mutual_information(gl2f3, cap=100)


def _naive_mi_bits(joint, prior, completions):
    """Independent float reference for the grouped-ratio computation."""
    p_t: dict = {}
    for (t_key, s_key), count in joint.items():
        p_t[t_key] = p_t.get(t_key, Fraction(0)) + prior[s_key] * Fraction(count, completions)
    bits = 0.0
    for (t_key, s_key), count in joint.items():
        p_joint = prior[s_key] * Fraction(count, completions)
        if p_joint == 0:
            continue
        bits += float(p_joint) * math.log2(float(p_joint / (prior[s_key] * p_t[t_key])))
    return bits


class TestMutualInformationHelper:
    def test_matches_naive_reference(self):
        joint = {("t0", "a"): 3, ("t1", "a"): 1, ("t0", "b"): 1, ("t1", "b"): 3}
        prior = {"a": Fraction(1, 2), "b": Fraction(1, 2)}
        bits, zero, examined = mutual_information_bits(joint, prior, 4)
        assert examined == 2
        assert not zero
        assert abs(bits - _naive_mi_bits(joint, prior, 4)) < 1e-12

    def test_additivity_on_independent_product(self):
        j1 = {("t0", "a"): 3, ("t1", "a"): 1, ("t0", "b"): 1, ("t1", "b"): 3}
        j2 = {("u0", "x"): 2, ("u1", "x"): 2, ("u0", "y"): 4, ("u1", "y"): 0}
        p1 = {"a": Fraction(1, 2), "b": Fraction(1, 2)}
        p2 = {"x": Fraction(1, 3), "y": Fraction(2, 3)}
        product = {
            ((t1, t2), (s1, s2)): c1 * c2
            for (t1, s1), c1 in j1.items()
            for (t2, s2), c2 in j2.items()
        }
        prior = {(s1, s2): p1[s1] * p2[s2] for s1 in p1 for s2 in p2}
        bits1, _, _ = mutual_information_bits(j1, p1, 4)
        bits2, _, _ = mutual_information_bits(j2, p2, 4)
        bits, _, _ = mutual_information_bits(product, prior, 16)
        assert abs(bits - (bits1 + bits2)) < 1e-9

    def test_flat_joint_is_exactly_zero(self):
        joint = {(t, s): 2 for t in ("t0", "t1") for s in ("a", "b")}
        prior = {"a": Fraction(1, 2), "b": Fraction(1, 2)}
        bits, zero, _ = mutual_information_bits(joint, prior, 4)
        assert bits == 0.0
        assert zero


class TestQuotientAttack:
    def test_recovers_secret_from_the_worked_example(self, diag5):
        transcript = lab_transcript(diag5, 2, 3, (2, 0, 0, 1), (3, 0, 0, 4))
        assert transcript.v2 == pt(F5, 2, 2)
        estimate = quotient_attack(transcript)
        assert estimate == F5.scalar(2)

    def test_identity_masks_reveal_directly(self, diag5):
        transcript = lab_transcript(diag5, 3, 1, (1, 0, 0, 1), (1, 0, 0, 1))
        assert quotient_attack(transcript) == F5.scalar(3)

    def test_recovers_on_all_applicable_diagonal_transcripts(self, diag5):
        rng = random.Random(12)
        applicable = 0
        for i in range(200):
            s = diag5.secret_domain[rng.randrange(4)]
            out = run_session(diag5, s, rng, session_id=i)
            if out.transcript.v1.x.is_zero or out.transcript.v1.y.is_zero:
                continue
            applicable += 1
            assert quotient_attack(out.transcript) == s
        assert applicable > 100

    def test_zero_component_is_inapplicable(self, diag5):
        transcript = lab_transcript(diag5, 2, 0, (2, 0, 0, 1), (3, 0, 0, 4))
        with pytest.raises(AttackInapplicableError, match="inapplicable"):
            quotient_attack(transcript)

    def test_disagrees_on_rotation_instances(self, rot7):
        rng = random.Random(5)
        disagreements = 0
        for i in range(50):
            s = rot7.secret_domain[rng.randrange(6)]
            out = run_session(rot7, s, rng, session_id=i)
            v1 = out.transcript.v1
            if v1.x.is_zero or v1.y.is_zero:
                continue
            try:
                disagreements += quotient_attack(out.transcript) != s
            except AttackInapplicableError:
                continue
        assert disagreements > 0


class TestSearch:
    def test_p2_census_is_complete(self):
        report = search_instances(2)
        assert report.complete
        assert report.subgroups_examined == 6
        assert sorted(e.group_order for e in report.entries) == [1, 2, 2, 2, 3, 6]
        assert report.candidates == ()
        # The only non-abelian subgroup is the full group, whose secret
        # square is not commutator-fixed.
        big = [e for e in report.entries if e.group_order == 6][0]
        assert not big.abelian
        fixed = [r for r in big.reports if r.condition == "comm-fixed-set"][0]
        assert not fixed.passed

    def test_p2_entries_revalidate_from_descriptors(self):
        report = search_instances(2)
        for entry in report.entries:
            inst = instance_from_descriptor(entry.descriptor)
            for original in entry.reports:
                if original.condition == "comm-fixed-set":
                    from triplepass.actions import is_commutator_fixed_set, secret_square_points

                    fresh = is_commutator_fixed_set(
                        secret_square_points(inst), inst.group, inst.name
                    )
                elif original.condition == "masking-coverage":
                    from triplepass.actions import check_masking_coverage

                    fresh = check_masking_coverage(inst)
                else:
                    fresh = check_transcript_equivalence(inst)
                assert fresh.passed == original.passed
                assert fresh.counterexample == original.counterexample
            if entry.leakage is not None:
                fresh_leak = exact_mutual_information(inst)
                assert fresh_leak.mutual_information_bits == entry.leakage.mutual_information_bits
                assert fresh_leak.zero_leakage == entry.leakage.zero_leakage

    def test_p3_abelian_instances_with_multiple_secrets_all_leak(self):
        report = search_instances(3)
        assert report.complete
        assert report.subgroups_examined == 55
        checked = 0
        for entry in report.entries:
            if entry.abelian and len(entry.descriptor["secret_domain"]) > 1:
                equivalence = [
                    r for r in entry.reports if r.condition == "transcript-equivalence"
                ][0]
                assert (not equivalence.passed) or entry.leakage.zero_leakage is False
                checked += 1
        assert checked > 10
        assert report.candidates == ()

    def test_cap_produces_incomplete_report(self):
        report = search_instances(3, cap=500)
        assert not report.complete
