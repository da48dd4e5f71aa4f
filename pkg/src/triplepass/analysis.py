"""The passive adversary, made exact.

Given a transcript and a known instance, the witness enumerator lists
every (secret, blinding, mask, mask) assignment that reproduces the
three wire messages exactly. Posteriors and mutual information are
computed from those exact counts: probabilities stay rational all the
way through and a zero-leakage verdict is an exact comparison of
posterior against prior, never a float test. Logarithms enter only at
presentation, grouped by exact probability ratio, so an instance that
leaks nothing reports exactly 0.0 bits and a total break on a uniform
prior over 2^k secrets reports exactly k bits.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Optional

from .actions import (
    ActionInstance,
    ConditionReport,
    DEFAULT_WORK_CAP,
    InstanceIndex,
    Point,
    check_masking_coverage,
    check_transcript_equivalence,
    commutator_fixed_carrier_points,
    instance_from_descriptor,
    instance_index,
    instance_to_descriptor,
    is_commutator_fixed_set,
    secret_square_points,
)
from .errors import (
    AttackInapplicableError,
    InconsistentTranscriptError,
    TriplePassError,
    WorkCapExceeded,
)
from .fields import Scalar
from .groups import FiniteGroup, commutator_subgroup, enumerate_gl2, subgroup_closure
from .matrices import Mat2
from .protocol import Transcript

__all__ = [
    "WitnessSet",
    "PosteriorReport",
    "LeakageReport",
    "SearchEntry",
    "SearchReport",
    "uniform_prior",
    "enumerate_consistent",
    "find_witness",
    "posterior_from_transcript",
    "exact_mutual_information",
    "mutual_information_bits",
    "quotient_attack",
    "search_instances",
]


def uniform_prior(instance: ActionInstance) -> dict[Scalar, Fraction]:
    """The default prior: equal exact mass on every secret."""
    assert instance.secret_domain is not None
    n = len(instance.secret_domain)
    return {s: Fraction(1, n) for s in instance.secret_domain}


def _validate_prior(instance: ActionInstance, prior: Mapping[Scalar, Fraction]) -> dict[Scalar, Fraction]:
    assert instance.secret_domain is not None
    domain = set(instance.secret_domain)
    out = {}
    for s, mass in prior.items():
        if s not in domain:
            raise ValueError(f"prior mass on {s}, which is not a valid secret")
        frac = Fraction(mass)
        if frac < 0:
            raise ValueError("prior masses must be nonnegative")
        out[s] = frac
    if sum(out.values()) != 1:
        raise ValueError("prior masses must sum to exactly 1")
    return out


@dataclass(frozen=True)
class WitnessSet:
    """All assignments consistent with one transcript, grouped by secret."""

    transcript: Transcript
    witnesses: tuple[tuple[Scalar, Scalar, Mat2, Mat2], ...]
    counts_by_secret: dict[Scalar, int]


def _transcript_indices(idx: InstanceIndex, transcript: Transcript) -> tuple[int, int, int]:
    if transcript.instance != idx.instance.name:
        raise TriplePassError(
            f"transcript is for {transcript.instance!r}, not {idx.instance.name!r}"
        )
    return (
        idx.point_index(transcript.v1),
        idx.point_index(transcript.v2),
        idx.point_index(transcript.v3),
    )


def enumerate_consistent(
    transcript: Transcript, instance: ActionInstance, *, cap: Optional[int] = None
) -> WitnessSet:
    """Exactly the (s, t, A, B) tuples reproducing the transcript.

    The first and third messages constrain (s, t, A) alone and the
    second constrains B alone, so candidates factor into a product; the
    factored set equals the naive four-deep scan. Every witness is
    re-validated by direct evaluation before it is returned.
    """
    if not instance.is_finite:
        raise TriplePassError("witness enumeration requires finite group")
    cap = DEFAULT_WORK_CAP if cap is None else cap
    idx = instance_index(instance)
    estimate = len(idx.s_res) * len(idx.t_res) * idx.n_group**2
    if estimate > cap:
        raise WorkCapExceeded("witness-enumeration", estimate, cap)
    v1, v2, v3 = _transcript_indices(idx, transcript)

    table = idx.act_table
    inverse = idx.inverse
    a_cands: list[tuple[int, tuple[int, int]]] = []
    for a_i in range(idx.n_group):
        inv_row = table[inverse[a_i]]
        if inv_row[v2] != v3:
            continue
        pair = idx.pair_of_point.get(inv_row[v1])
        if pair is not None:
            a_cands.append((a_i, pair))
    b_cands = [b_i for b_i in range(idx.n_group) if table[b_i][v1] == v2]

    group = idx.group
    witnesses = []
    counts: dict[Scalar, int] = {}
    for a_i, (s_res, t_res) in a_cands:
        s = idx.scalar(s_res)
        t = idx.scalar(t_res)
        start = idx.point_of_pair[(s_res, t_res)]
        for b_i in b_cands:
            # Soundness stays on: re-derive all three messages directly.
            m1 = table[a_i][start]
            m2 = table[b_i][m1]
            m3 = table[inverse[a_i]][m2]
            if (m1, m2, m3) != (v1, v2, v3):
                raise AssertionError("factored witness failed direct re-validation")
            witnesses.append((s, t, group.elements[a_i], group.elements[b_i]))
            counts[s] = counts.get(s, 0) + 1

    truth = transcript.ground_truth
    if truth is not None and witnesses:
        member = (truth.s, truth.t, truth.mask_a, truth.mask_b)
        assert member in witnesses, "ground truth is not among the witnesses"
    return WitnessSet(transcript, tuple(witnesses), counts)


def find_witness(
    transcript: Transcript, instance: ActionInstance, s_prime: Scalar
) -> Optional[tuple[Scalar, Mat2, Mat2]]:
    """One (t', A', B') explaining the transcript with secret s_prime,
    or None after an exhaustive search finds nothing."""
    if not instance.is_finite:
        raise TriplePassError("witness search requires finite group")
    idx = instance_index(instance)
    v1, v2, v3 = _transcript_indices(idx, transcript)
    table = idx.act_table
    inverse = idx.inverse
    target = s_prime.value

    for a_i in range(idx.n_group):
        inv_row = table[inverse[a_i]]
        if inv_row[v2] != v3:
            continue
        pair = idx.pair_of_point.get(inv_row[v1])
        if pair is None or pair[0] != target:
            continue
        for b_i in range(idx.n_group):
            if table[b_i][v1] == v2:
                return (
                    idx.scalar(pair[1]),
                    idx.group.elements[a_i],
                    idx.group.elements[b_i],
                )
    return None


@dataclass(frozen=True)
class PosteriorReport:
    """Exact conditional distribution over secrets given one transcript."""

    transcript: Transcript
    prior: dict[Scalar, Fraction]
    posterior: dict[Scalar, Fraction]
    support: tuple[Scalar, ...]
    uniform: bool
    witness_count: int


def posterior_from_transcript(
    transcript: Transcript,
    instance: ActionInstance,
    prior: Optional[Mapping[Scalar, Fraction]] = None,
    *,
    cap: Optional[int] = None,
) -> PosteriorReport:
    """Bayes over exact witness counts: posterior(s) is proportional to
    prior(s) times the number of (t, A, B) completions."""
    prior = uniform_prior(instance) if prior is None else _validate_prior(instance, prior)
    witness_set = enumerate_consistent(transcript, instance, cap=cap)
    weights = {
        s: prior.get(s, Fraction(0)) * count
        for s, count in witness_set.counts_by_secret.items()
    }
    total = sum(weights.values(), Fraction(0))
    if total == 0:
        raise InconsistentTranscriptError(
            "inconsistent transcript: no witness reproduces it under this prior"
        )
    assert instance.secret_domain is not None
    posterior = {s: weights.get(s, Fraction(0)) / total for s in sorted(prior, key=lambda x: x.value)}
    support = tuple(s for s in posterior if posterior[s] > 0)
    masses = {posterior[s] for s in support}
    uniform = len(masses) == 1 and set(support) == set(instance.secret_domain)
    return PosteriorReport(
        transcript=transcript,
        prior=dict(prior),
        posterior=posterior,
        support=support,
        uniform=uniform,
        witness_count=len(witness_set.witnesses),
    )


@dataclass(frozen=True)
class LeakageReport:
    """Exact-count leakage summary for a whole instance."""

    instance: str
    mutual_information_bits: float
    zero_leakage: bool
    transcripts_examined: int
    prior: dict[Scalar, Fraction]


def mutual_information_bits(
    joint_counts: Mapping[tuple, int],
    prior: Mapping[object, Fraction],
    completions_per_secret: int,
) -> tuple[float, bool, int]:
    """Mutual information in bits from exact joint counts.

    ``joint_counts`` maps (transcript key, secret key) to the number of
    nuisance completions; every secret has exactly
    ``completions_per_secret`` of them in total. Terms are grouped by
    the exact rational ratio p(s,v)/(p(s)p(v)) and logs are taken only
    per distinct ratio, so zero leakage yields exactly 0.0 and a total
    break on a uniform prior over 2^k secrets yields exactly k.

    Returns (bits, zero_leakage, transcripts_examined).
    """
    denom = completions_per_secret
    by_transcript: dict[tuple, dict[object, int]] = {}
    for (t_key, s_key), count in joint_counts.items():
        by_transcript.setdefault(t_key, {})[s_key] = count

    zero_leakage = True
    ratio_weights: dict[Fraction, Fraction] = {}
    for t_key in sorted(by_transcript):
        counts = by_transcript[t_key]
        p_t = sum(
            (prior[s] * Fraction(c, denom) for s, c in counts.items()), Fraction(0)
        )
        for s_key, count in counts.items():
            p_s = prior[s_key]
            if p_s == 0:
                continue
            joint = p_s * Fraction(count, denom)
            if joint / p_t != p_s:
                zero_leakage = False
            if joint == 0:
                continue  # zero-probability cell: contributes nothing
            ratio = joint / (p_s * p_t)
            ratio_weights[ratio] = ratio_weights.get(ratio, Fraction(0)) + joint
        # Secrets with zero posterior mass at this transcript still break
        # posterior-equals-prior exactness.
        if zero_leakage:
            for s_key, p_s in prior.items():
                if p_s > 0 and s_key not in counts:
                    zero_leakage = False
                    break

    bits = 0.0
    for ratio in sorted(ratio_weights):
        weight = ratio_weights[ratio]
        bits += float(weight) * (math.log2(ratio.numerator) - math.log2(ratio.denominator))
    return bits, zero_leakage, len(by_transcript)


def exact_mutual_information(
    instance: ActionInstance,
    prior: Optional[Mapping[Scalar, Fraction]] = None,
    *,
    cap: Optional[int] = None,
    workers: int = 1,
) -> LeakageReport:
    """I(secret; transcript) from a full exact joint enumeration.

    The blinding value and both masks are uniform; the secret follows
    the prior. Transcripts are enumerated through the protocol itself,
    over the outer (point, first mask) grid, so only realizable
    transcripts carry weight. Sharding over that grid merges by exact
    count addition: the result is identical for any worker count.
    """
    if not instance.is_finite:
        raise TriplePassError("leakage analysis requires finite group")
    prior = uniform_prior(instance) if prior is None else _validate_prior(instance, prior)
    cap = DEFAULT_WORK_CAP if cap is None else cap
    if workers < 1:
        raise ValueError("workers must be positive")
    idx = instance_index(instance)
    support = [s for s in sorted(prior, key=lambda x: x.value) if prior[s] > 0]
    estimate = len(support) * len(idx.t_res) * idx.n_group**2
    if estimate > cap:
        raise WorkCapExceeded("leakage-analysis", estimate, cap)

    outer = [
        (idx.point_of_pair[(s.value, t_res)], s.value, a_i)
        for s in support
        for t_res in idx.t_res
        for a_i in range(idx.n_group)
    ]
    table = idx.act_table
    inverse = idx.inverse
    n_group = idx.n_group

    def shard(start: int) -> Counter:
        counts: Counter = Counter()
        for v, s_res, a_i in outer[start::workers]:
            v1 = table[a_i][v]
            inv_row = table[inverse[a_i]]
            for b_i in range(n_group):
                v2 = table[b_i][v1]
                counts[((v1, v2, inv_row[v2]), s_res)] += 1
        return counts

    if workers == 1:
        merged = shard(0)
    else:
        merged = Counter()
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(shard, range(workers)):
                merged.update(part)

    prior_by_res = {s.value: prior[s] for s in support}
    completions = len(idx.t_res) * n_group**2
    bits, zero_leakage, examined = mutual_information_bits(merged, prior_by_res, completions)
    return LeakageReport(
        instance=instance.name,
        mutual_information_bits=bits,
        zero_leakage=zero_leakage,
        transcripts_examined=examined,
        prior=dict(prior),
    )


def quotient_attack(transcript: Transcript) -> Scalar:
    """Componentwise-division attack for diagonal-style masks.

    Dividing the second message by the first recovers Bob's mask when
    masks are diagonal; dividing the third message by it returns the
    secret. Requires both components of the first message nonzero.
    """
    v1, v2, v3 = transcript.v1, transcript.v2, transcript.v3
    if v1.x.is_zero or v1.y.is_zero:
        raise AttackInapplicableError("attack inapplicable: zero component in v1")
    mask_estimate = Point(v2.x / v1.x, v2.y / v1.y)
    if mask_estimate.x.is_zero:
        raise AttackInapplicableError("attack inapplicable: estimated mask component is zero")
    return v3.x / mask_estimate.x


@dataclass(frozen=True)
class SearchEntry:
    """One examined instance: its rebuildable descriptor and verdicts."""

    descriptor: dict
    group_order: int
    abelian: bool
    reports: tuple[ConditionReport, ...]
    leakage: Optional[LeakageReport]
    skipped: dict[str, int]
    candidate: bool


@dataclass(frozen=True)
class SearchReport:
    """Census of instances built from small generating sets."""

    p: int
    max_generators: int
    entries: tuple[SearchEntry, ...]
    candidates: tuple[str, ...]
    complete: bool
    subgroups_examined: int


def _entry_for_instance(
    instance: ActionInstance, cap: int, with_leakage: bool
) -> SearchEntry:
    reports = []
    skipped: dict[str, int] = {}
    group = instance.group
    assert isinstance(group, FiniteGroup)

    fixed = is_commutator_fixed_set(secret_square_points(instance), group, instance.name)
    reports.append(fixed)
    for checker in (check_masking_coverage, check_transcript_equivalence):
        try:
            reports.append(checker(instance, cap=cap))
        except WorkCapExceeded as exc:
            skipped[exc.job] = exc.estimate

    leakage = None
    if with_leakage:
        try:
            leakage = exact_mutual_information(instance, cap=cap)
        except WorkCapExceeded as exc:
            skipped[exc.job] = exc.estimate

    assert instance.secret_domain is not None
    candidate = (
        len(instance.secret_domain) > 1
        and not skipped
        and all(r.passed for r in reports)
        and leakage is not None
        and leakage.zero_leakage
    )
    return SearchEntry(
        descriptor=instance_to_descriptor(instance),
        group_order=len(group),
        abelian=group.is_abelian,
        reports=tuple(reports),
        leakage=leakage,
        skipped=skipped,
        candidate=candidate,
    )


def _revalidate_entry(entry: SearchEntry, cap: int) -> None:
    """Rebuild the instance from its descriptor and re-run every check;
    any verdict drift is an internal error."""
    instance = instance_from_descriptor(entry.descriptor)
    fresh = _entry_for_instance(instance, cap, entry.leakage is not None or bool(entry.skipped))
    old = [(r.condition, r.passed, r.counterexample) for r in entry.reports]
    new = [(r.condition, r.passed, r.counterexample) for r in fresh.reports]
    if old != new or fresh.candidate != entry.candidate:
        raise AssertionError(f"search entry for {entry.descriptor['name']} did not re-validate")
    if (entry.leakage is None) != (fresh.leakage is None):
        raise AssertionError("leakage availability drifted on re-validation")
    if entry.leakage is not None and fresh.leakage is not None:
        if (
            entry.leakage.zero_leakage != fresh.leakage.zero_leakage
            or entry.leakage.mutual_information_bits != fresh.leakage.mutual_information_bits
        ):
            raise AssertionError("leakage report drifted on re-validation")


def search_instances(
    p: int,
    max_generators: int = 2,
    *,
    cap: Optional[int] = None,
    with_leakage: bool = True,
) -> SearchReport:
    """Enumerate subgroup closures of small generator subsets and test
    every resulting instance.

    Subgroups are deduplicated by element set. Each subgroup yields a
    full-plane instance; when its commutators fix at least four nonzero
    carrier points, an embedded variant places a secret square on those
    fixed points. Candidates must pass every check, leak nothing, and
    have more than one secret; each one is re-validated from scratch.
    A cap-exhausted run returns the entries finished so far, flagged
    incomplete.
    """
    cap = DEFAULT_WORK_CAP if cap is None else cap
    ambient = enumerate_gl2(p)
    fp = ambient.domain
    elements = ambient.elements

    budget = cap
    complete = True
    seen: dict[frozenset, FiniteGroup] = {}
    for size in range(1, max_generators + 1):
        if not complete:
            break
        for combo in combinations(range(len(elements)), size):
            budget -= len(elements) * size
            if budget < 0:
                complete = False
                break
            gens = [elements[i] for i in combo]
            group = subgroup_closure(gens)
            key = frozenset(m.residues() for m in group)
            if key not in seen:
                seen[key] = group

    subgroups = sorted(
        seen.values(), key=lambda g: (len(g), tuple(m.residues() for m in g.elements))
    )

    entries: list[SearchEntry] = []
    for seq, group in enumerate(subgroups):
        base_name = f"subgroup-f{p}-o{len(group)}-{seq}"
        full_plane = ActionInstance(
            name=base_name,
            field=fp,
            group=group,
            secret_domain=fp.nonzero_elements(),
            t_domain=fp.elements(),
            embedding=None,
            multiplicative=True,
            kind="custom",
        )
        instance_index(full_plane)
        variants = [full_plane]

        if len(commutator_subgroup(group)) > 1:
            fixed = [pt for pt in commutator_fixed_carrier_points(group) if not pt.is_zero]
            k = math.isqrt(len(fixed))
            if k >= 2:
                secrets = tuple(fp.scalar(v) for v in range(1, k + 1))
                embedding = {}
                targets = iter(fixed)
                for s in secrets:
                    for t in secrets:
                        embedding[(s, t)] = next(targets)
                embedded = ActionInstance(
                    name=base_name + "-embedded",
                    field=fp,
                    group=group,
                    secret_domain=secrets,
                    t_domain=secrets,
                    embedding=embedding,
                    multiplicative=True,
                    kind="custom",
                )
                instance_index(embedded)
                variants.append(embedded)

        for instance in variants:
            entries.append(_entry_for_instance(instance, cap, with_leakage))

    candidates = tuple(e.descriptor["name"] for e in entries if e.candidate)
    for entry in entries:
        if entry.candidate:
            _revalidate_entry(entry, cap)

    return SearchReport(
        p=p,
        max_generators=max_generators,
        entries=tuple(entries),
        candidates=candidates,
        complete=complete,
        subgroups_examined=len(subgroups),
    )
