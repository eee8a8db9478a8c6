"""Named randomized verification suites.

Each suite is a campaign (see :mod:`metricmag.campaign`) identified by a
stable string id; :data:`THEOREMS` maps ids to runners with the signature
``runner(samples, seed, denominator_bound=64, workers=1) -> CampaignReport``.
For suites that sweep several sizes ``n``, ``samples`` counts spaces per
size.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Callable, Dict

from . import campaign, fourpoint, inclexcl
from .core import (SimilaritySpace, determinant, determinant_three_point, from_distances,
                   is_positive_definite, magnitude, magnitude_telescoped, magnitude_three_point,
                   magnitude_two_point, restrict, telescope_terms, weighting)
from .errors import ConstructionError, SingularityError
from .fixtures import CIRCLE_1, CIRCLE_2
from .spacegen import GeneratorConfig, SimilaritySampler, force_entry, geodesic_circle, stream

FLOAT_RESIDUAL = 1e-10
GATE_TOL = inclexcl.GATE_TOL



def _sampler(seed, chunk, denominator_bound):
    return SimilaritySampler(GeneratorConfig(seed, denominator_bound), rng=stream(seed, chunk))


def _indices(chunk, count):
    start = chunk * campaign.CHUNK
    return range(start, start + count)


# ---------------------------------------------------------------------------
# chunk tasks (top level so worker processes can import them)

def _decomposition_chunk(chunk, count, seed, sizes=(3, 4, 5, 6, 7), denominator_bound=64):
    sampler = _sampler(seed, chunk, denominator_bound)
    tally = campaign.Tally()
    for idx in _indices(chunk, count):
        n = sizes[idx % len(sizes)]
        space = sampler.sample(n)
        approx = space.to_float()
        worst = 0.0
        for pair in itertools.combinations(range(n), 2):
            try:
                pd = inclexcl.pair_decomposition(space, pair)
            except SingularityError:
                tally.counters["singular-overlap"] += 1
                continue
            tally.counters["pairs"] += 1
            if pd.lhs != pd.rhs:
                tally.violation("exact-residual", idx, space, pair=list(pair), residual=pd.residual)
            if inclexcl.b0_bordered(space, pair) != pd.b_zero:
                tally.violation("b0-bordered", idx, space, pair=list(pair))
            try:
                fd = inclexcl.pair_decomposition(approx, pair)
            except SingularityError:
                continue
            scale = max(1.0, abs(fd.rhs))
            worst = max(worst, abs(fd.residual) / scale)
        if worst > FLOAT_RESIDUAL:
            tally.violation("float-residual", idx, space, residual=worst)
        tally.counters[f"n={n}"] += 1
        tally.samples += 1
    return tally


def _defect_chunk(chunk, count, seed, sizes=(3, 4, 5, 6), denominator_bound=64):
    sampler = _sampler(seed, chunk, denominator_bound)
    tally = campaign.Tally()
    for idx in _indices(chunk, count):
        n = sizes[idx % len(sizes)]
        space = sampler.sample(n)
        i, j = (int(x) for x in sampler.rng.choice(n, size=2, replace=False))
        try:
            rep = inclexcl.defect(space, (i, j))
        except SingularityError as exc:
            tally.counters[f"singular:{exc.what}"] += 1
        else:
            if rep.delta_direct != rep.delta_formula:
                tally.violation("defect-formula", idx, space, pair=[i, j],
                                direct=rep.delta_direct, formula=rep.delta_formula)
            split = inclexcl.magnitude_split(space, (i, j))
            if split.mag_B != rep.magnitudes["B"]:
                tally.violation("magnitude-split", idx, space, pair=[i, j])
        tally.samples += 1
    return tally


def _glue_chunk(chunk, count, seed, sizes=(3, 4, 5, 6), denominator_bound=64, max_tries=200):
    sampler = _sampler(seed, chunk, denominator_bound)
    tally = campaign.Tally()
    for idx in _indices(chunk, count):
        n = sizes[idx % len(sizes)]
        for _ in range(max_tries):
            try:
                glued = inclexcl.glue_at_b0(sampler.sample(n))
                rep = inclexcl.defect(glued)
            except (ConstructionError, SingularityError) as exc:
                tally.counters[f"retry:{type(exc).__name__}:n={n}"] += 1
                continue
            if rep.delta_direct != 0:
                tally.violation("delta-zero", idx, glued, delta=rep.delta_direct)
            if rep.delta_formula != 0:
                tally.violation("delta-formula-zero", idx, glued, delta=rep.delta_formula)
            break
        else:
            tally.violation("construction", idx, None, n=n)
        tally.samples += 1
    return tally


def _gated_space(sampler, n, rng, lower_end: bool):
    """Random space in which point 0 is gated through point 2 onto ``{1..n-1}``,
    i.e. ``Z[0][k] = Z[0][2]·Z[2][k]`` for ``k >= 3``."""
    base = sampler.sample(n - 1)
    D = sampler.config.denominator_bound
    u = Fraction(int(rng.integers(1, D)), D)
    Z = [[None] * n for _ in range(n)]
    for p in range(1, n):
        for q in range(1, n):
            Z[p][q] = base.Z[p - 1][q - 1]
    Z[0][0] = Fraction(1)
    Z[0][2] = Z[2][0] = u
    for k in range(3, n):
        Z[0][k] = Z[k][0] = u * Z[2][k]
    others = range(2, n)
    lo = max(Z[0][k] * Z[1][k] for k in others)
    hi = min(min(Z[0][k] / Z[1][k], Z[1][k] / Z[0][k]) for k in others)
    value = lo
    if not lower_end:
        kmin, kmax = math.ceil(lo * D), min(D - 1, math.floor(hi * D))
        if kmin <= kmax:
            value = Fraction(int(rng.integers(kmin, kmax + 1)), D)
    Z[0][1] = Z[1][0] = value
    return SimilaritySpace(Z)


def _comparison_chunk(chunk, count, seed, n_random=1000, sizes=(3, 4, 5, 6),
                      denominator_bound=64):
    sampler = _sampler(seed, chunk, denominator_bound)
    rng = sampler.rng
    tally = campaign.Tally()
    for idx in _indices(chunk, count):
        n = sizes[idx % len(sizes)]
        gated = idx >= n_random
        if gated:
            space = _gated_space(sampler, max(n, 4), rng, lower_end=bool(idx % 2))
        else:
            space = sampler.sample(n)
            if idx % 2:
                forced = force_entry(space, 0, 1, inclexcl.general_b_minus(space, (0, 1)))
                space = forced or space
        try:
            rep = inclexcl.comparison_report(space)
        except SingularityError:
            tally.counters["singular"] += 1
            tally.samples += 1
            continue
        kind = "gated" if gated else "random"
        tally.histogram[f"{kind}:c1={rep.c1}:c2={rep.c2}"] += 1
        if not rep.c1_equivalence_holds:
            tally.violation("c1-iff-z-eq-b-minus", idx, space)
        if not rep.c2_implication_holds:
            tally.violation("c2-implies-b-minus-eq-b0", idx, space,
                            b_minus=rep.b_minus, b_zero=rep.b_zero)
        if gated and not rep.c2:
            tally.violation("gated-construction-c2", idx, space)
        if rep.c1 and rep.c2:
            # gated inclusion-exclusion, as a consistency check
            try:
                if inclexcl.defect(space).delta_direct != 0:
                    tally.violation("c1-c2-delta-zero", idx, space)
            except SingularityError:
                tally.counters["singular-defect"] += 1
        tally.samples += 1
    return tally


def _converse_chunk(chunk, count, seed, sizes=(3, 4, 5, 6), denominator_bound=64):
    sampler = _sampler(seed, chunk, denominator_bound)
    tally = campaign.Tally()
    for idx in _indices(chunk, count):
        n = sizes[idx % len(sizes)]
        space = sampler.sample(n)
        if idx % 3 == 0:
            try:
                space = inclexcl.glue_at_b0(space)
            except ConstructionError:
                pass
        try:
            rep = inclexcl.converse_check(space)
        except SingularityError:
            tally.counters["singular"] += 1
            tally.samples += 1
            continue
        if not rep.implication_holds:
            tally.violation("delta-zero-implies-z-eq-b0", idx, space)
        if n == 4 and rep.z_le_b0 and not rep.hypotheses_hold:
            tally.violation("n4-hypotheses-redundant", idx, space)
        if n == 3:
            if inclexcl.delta_three_point(space) != rep.delta:
                tally.violation("n3-closed-form", idx, space)
            lhs, rhs = inclexcl.three_point_positive_factor(space)
            if lhs != rhs or not rhs > 0:
                tally.violation("n3-positive-factor", idx, space)
        tally.histogram[f"hypotheses={rep.hypotheses_hold}"] += 1
        tally.samples += 1
    return tally


def _telescope_chunk(chunk, count, seed, sizes=(2, 3, 4, 5, 6), denominator_bound=64,
                     max_tries=200):
    sampler = _sampler(seed, chunk, denominator_bound)
    tally = campaign.Tally()
    for idx in _indices(chunk, count):
        n = sizes[idx % len(sizes)]
        for _ in range(max_tries):
            space = sampler.sample(n)
            if is_positive_definite(space):
                break
            tally.counters["non-positive-definite-redrawn"] += 1
        else:
            tally.violation("no-positive-definite-sample", idx, None, n=n)
            tally.samples += 1
            continue
        mag = magnitude(space)
        if magnitude_telescoped(space) != mag:
            tally.violation("telescope-equals-magnitude", idx, space)
        terms = telescope_terms(space)
        if any(t < 0 for t in terms):
            tally.violation("summands-nonnegative", idx, space)
        tails = [magnitude(restrict(space, range(i, n))) for i in range(n)]
        if not all(mag >= t >= 1 for t in tails):
            tally.violation("mag-monotone", idx, space)
        tally.samples += 1
    return tally


def _micro_chunk(chunk, count, seed, denominator_bound=64):
    sampler = _sampler(seed, chunk, denominator_bound)
    tally = campaign.Tally()
    for idx in _indices(chunk, count):
        if idx % 2 == 0:
            space = sampler.sample(2)
            if magnitude_two_point(space.Z[0][1]) != magnitude(space):
                tally.violation("mag-2pt", idx, space)
        else:
            space = sampler.sample(3)
            z = (space.Z[0][1], space.Z[0][2], space.Z[1][2])
            if determinant_three_point(*z) != determinant(space):
                tally.violation("det-3pt", idx, space)
            if magnitude_three_point(*z) != sum(weighting(space).w):
                tally.violation("mag-3pt", idx, space)
        tally.samples += 1
    return tally


def _identities_chunk(chunk, count, seed, denominator_bound=64):
    sampler = _sampler(seed, chunk, denominator_bound)
    tally = campaign.Tally()
    for idx in _indices(chunk, count):
        space = sampler.sample(4)
        rep = fourpoint.verify_proof_identities(space)
        for check in rep.checks:
            tally.counters[f"{check.name}:{check.status}"] += 1
            if check.status == "failed":
                tally.violation(check.name, idx, space)
        tally.samples += 1
    return tally


# ---------------------------------------------------------------------------
# runners

def circle_examples() -> campaign.CampaignReport:
    """The two five-point geodesic-circle examples."""
    tally = campaign.Tally()
    for idx, angles in enumerate((CIRCLE_1, CIRCLE_2)):
        metric = geodesic_circle(angles)
        space = from_distances(metric)
        five = inclexcl.five_circle_report(space)
        comp = inclexcl.comparison_report(space)
        cond = inclexcl.check_conditions(metric, [0, 2, 3, 4], [1, 2, 3, 4])
        tally.samples += 1
        if cond.c1 != comp.c1 or cond.c2 != comp.c2:
            tally.violation("additive-vs-multiplicative-gates", idx)
        if abs(five.b_zero - five.b_zero_general) > GATE_TOL:
            tally.violation("five-point-formula", idx, b0=five.b_zero, general=five.b_zero_general)
        if idx == 0:
            target = math.exp(-3 * math.pi / 4)
            checks = {
                "P-zero": abs(five.P) <= GATE_TOL,
                "b0-eq-b-minus": abs(five.b_zero - five.b_minus) <= GATE_TOL,
                "b0-value": abs(five.b_zero - target) <= GATE_TOL,
                "c1-true": comp.c1,
                "c2-false": not comp.c2,
            }
        else:
            try:
                inclexcl.glue_at_b0(space)
                glue_fails = False
            except ConstructionError:
                glue_fails = True
            checks = {
                "P-negative": five.P < 0,
                "b0-lt-b-minus": five.b_zero < five.b_minus - GATE_TOL,
                "glue-construction-error": glue_fails,
            }
        for name, ok in checks.items():
            tally.counters[f"example{idx + 1}:{name}"] += int(ok)
            if not ok:
                tally.violation(name, idx)
    return _report("circle-examples", tally, 0)


def _report(theorem, tally, seed):
    return campaign.CampaignReport(theorem, tally.samples, seed, tally.violations,
                                   tally.violation_count, dict(tally.histogram),
                                   dict(sorted(tally.counters.items())))


def _sized(theorem, task, sizes):
    def runner(samples, seed, denominator_bound=64, workers=1):
        return campaign.run(theorem, task, samples * len(sizes), seed, workers,
                            sizes=sizes, denominator_bound=denominator_bound)
    runner.__doc__ = f"``samples`` spaces for each n in {tuple(sizes)}."
    return runner


def _plain(theorem, task):
    def runner(samples, seed, denominator_bound=64, workers=1):
        return campaign.run(theorem, task, samples, seed, workers,
                            denominator_bound=denominator_bound)
    return runner


def _positivity(theorem, boundary=False):
    def runner(samples, seed, denominator_bound=64, workers=1):
        report = fourpoint.verify_positivity_campaign(samples, seed, denominator_bound,
                                                      boundary=boundary, workers=workers)
        report.theorem = theorem
        return report
    return runner


def _comparison(samples, seed, denominator_bound=64, workers=1, gated=None):
    gated = max(1, samples // 10) if gated is None else gated
    return campaign.run("comparison", _comparison_chunk, samples + gated, seed, workers,
                        n_random=samples, denominator_bound=denominator_bound)


THEOREMS: Dict[str, Callable[..., campaign.CampaignReport]] = {
    "det4-positive": _positivity("det4-positive"),
    "bounds-order": _positivity("bounds-order", boundary=True),
    "proof-identities": _plain("proof-identities", _identities_chunk),
    "decomposition": _sized("decomposition", _decomposition_chunk, (3, 4, 5, 6, 7)),
    "defect-identity": _sized("defect-identity", _defect_chunk, (3, 4, 5, 6)),
    "glue-delta-zero": _sized("glue-delta-zero", _glue_chunk, (3, 4, 5, 6)),
    "converse": _sized("converse", _converse_chunk, (3, 4, 5, 6)),
    "comparison": _comparison,
    "telescope": _sized("telescope", _telescope_chunk, (2, 3, 4, 5, 6)),
    "micro-formulas": _plain("micro-formulas", _micro_chunk),
    "circle-examples": lambda samples=0, seed=0, denominator_bound=64, workers=1: circle_examples(),
}


def run_theorem(theorem: str, samples: int, seed: int, denominator_bound: int = 64,
                workers: int = 1) -> campaign.CampaignReport:
    try:
        runner = THEOREMS[theorem]
    except KeyError:
        raise ValueError(f"unknown theorem {theorem!r}; choose from {sorted(THEOREMS)}") from None
    return runner(samples, seed, denominator_bound=denominator_bound, workers=workers)
