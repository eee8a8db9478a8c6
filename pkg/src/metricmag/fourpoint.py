"""Four-point machinery: bounds on the distinguished similarity ``Z01``, the
completed-square form of the determinant, case labels, and exact checks of
the closed-form identities behind the positivity argument.

Points are 0..3; the distinguished pair is (0, 1) and the other two points
are 2 and 3. Internally the six similarities are unpacked as
``z12, z13, z14, z23, z24, z34`` with 1-based names for readability.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import FrozenSet, List, Optional, Tuple

from . import campaign, linalg
from .core import SimilaritySpace, determinant, leading_principal_minors, restrict
from .errors import ValidationError
from .scalar import DEFAULT_TOL, close, leq
from .spacegen import GeneratorConfig, SimilaritySampler, force_entry, stream


class CaseLabel(str, enum.Enum):
    L1 = "L1"
    L2 = "L2"
    R1 = "R1"
    R2 = "R2"
    R3 = "R3"
    R4 = "R4"


@dataclass(frozen=True)
class FourPointBounds:
    b_minus: object
    b_plus: object
    b_zero: object


def _require4(space: SimilaritySpace) -> None:
    if space.n != 4:
        raise ValidationError(f"expected a 4-point space, got n={space.n}")


def _six(space: SimilaritySpace):
    Z = space.Z
    return Z[0][1], Z[0][2], Z[0][3], Z[1][2], Z[1][3], Z[2][3]


def _matrix(z12, z13, z14, z23, z24, z34):
    one = Fraction(1) if isinstance(z12, Fraction) else 1.0
    return [[one, z12, z13, z14], [z12, one, z23, z24], [z13, z23, one, z34], [z14, z24, z34, one]]


def _det6(*z):
    return linalg.det(_matrix(*z))


def _member(*z) -> Optional[SimilaritySpace]:
    try:
        return SimilaritySpace(_matrix(*z))
    except ValidationError:
        return None


def _delta3(x, y, w):
    """Determinant of a 3-point zeta matrix with off-diagonal entries x, y, w."""
    return 1 - x * x - y * y - w * w + 2 * x * y * w


def delta_triple(space: SimilaritySpace, i: int, j: int, k: int):
    """``1 - Zij² - Zik² - Zjk² + 2·Zij·Zik·Zjk`` for distinct points."""
    if len({i, j, k}) != 3:
        raise ValidationError(f"indices {(i, j, k)} are not distinct")
    Z = space.Z
    return _delta3(Z[i][j], Z[i][k], Z[j][k])


def delta_expansion(space: SimilaritySpace):
    """Fully expanded degree-4 polynomial for the 4-point determinant."""
    _require4(space)
    z12, z13, z14, z23, z24, z34 = _six(space)
    return (1 - z12**2 - z13**2 - z14**2 - z23**2 - z24**2 - z34**2
            + 2 * z12 * z13 * z23 + 2 * z12 * z14 * z24 + 2 * z13 * z14 * z34 + 2 * z23 * z24 * z34
            - 2 * z13 * z14 * z23 * z24 - 2 * z12 * z14 * z23 * z34 - 2 * z12 * z13 * z24 * z34
            + z12**2 * z34**2 + z13**2 * z24**2 + z14**2 * z23**2)


def _b0(z13, z14, z23, z24, z34):
    return (z13 * z23 + z14 * z24 - z14 * z23 * z34 - z13 * z24 * z34) / (1 - z34 * z34)


def _c0(z12, z13, z14, z23, z24):
    return (z13 * z14 + z23 * z24 - z12 * z13 * z24 - z12 * z14 * z23) / (1 - z12 * z12)


def _ratios(z13, z14, z23, z24):
    return (z23 / z13, z13 / z23, z24 / z14, z14 / z24)


def bounds4(space: SimilaritySpace) -> FourPointBounds:
    """``b_minus``, ``b_zero``, ``b_plus`` for the pair (0, 1)."""
    _require4(space)
    _, z13, z14, z23, z24, z34 = _six(space)
    return FourPointBounds(
        b_minus=max(z13 * z23, z14 * z24),
        b_plus=min(_ratios(z13, z14, z23, z24)),
        b_zero=_b0(z13, z14, z23, z24, z34),
    )


def decomposition4(space: SimilaritySpace) -> Tuple[object, object]:
    """``(det, -(1 - Z23²)(Z01 - b0)² + Δ023·Δ123 / (1 - Z23²))``."""
    _require4(space)
    z12, z13, z14, z23, z24, z34 = _six(space)
    b0 = _b0(z13, z14, z23, z24, z34)
    s = 1 - z34 * z34
    rhs = -s * (z12 - b0) ** 2 + _delta3(z13, z14, z34) * _delta3(z23, z24, z34) / s
    return determinant(space), rhs


def classify_case(space: SimilaritySpace, tol: float = DEFAULT_TOL) -> FrozenSet[CaseLabel]:
    """All case labels whose defining inequalities hold (boundaries overlap)."""
    _require4(space)
    z12, z13, z14, z23, z24, z34 = _six(space)
    b = bounds4(space)
    labels = set()
    if leq(b.b_minus, z12, tol) and leq(z12, b.b_zero, tol):
        if close(b.b_minus, z13 * z23, tol):
            labels.add(CaseLabel.L1)
        if close(b.b_minus, z14 * z24, tol):
            labels.add(CaseLabel.L2)
    if leq(b.b_zero, z12, tol) and leq(z12, b.b_plus, tol):
        for label, r in zip((CaseLabel.R1, CaseLabel.R2, CaseLabel.R3, CaseLabel.R4),
                            _ratios(z13, z14, z23, z24)):
            if close(b.b_plus, r, tol):
                labels.add(label)
    return frozenset(labels)


# ---------------------------------------------------------------------------
# proof identities

@dataclass(frozen=True)
class ProofIdentityContext:
    """Auxiliary bounds used by the lemma checks (``None`` when undefined)."""

    b_prime_minus: object = None
    b_prime_plus: object = None
    c_zero: object = None
    c_minus: object = None
    c_plus: object = None
    tilde_b_plus: object = None


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    status: str  # "verified", "failed" or "skipped"
    lhs: object = None
    rhs: object = None
    inequality: Optional[bool] = None
    reason: str = ""


@dataclass(frozen=True)
class ProofIdentityReport:
    checks: Tuple[IdentityCheck, ...]
    context: ProofIdentityContext
    cases: FrozenSet[CaseLabel] = field(default_factory=frozenset)

    @property
    def ok(self) -> bool:
        return all(c.status != "failed" for c in self.checks)

    def by_name(self, name: str) -> IdentityCheck:
        return next(c for c in self.checks if c.name == name)

    @property
    def failed(self) -> List[IdentityCheck]:
        return [c for c in self.checks if c.status == "failed"]


class _Checker:
    def __init__(self, tol):
        self.tol = tol
        self.checks: List[IdentityCheck] = []

    def equal(self, name, lhs, rhs, inequality=None, reason=""):
        ok = close(lhs, rhs, self.tol) and inequality is not False
        self.checks.append(IdentityCheck(name, "verified" if ok else "failed", lhs, rhs,
                                         inequality, reason))

    def holds(self, name, inequality, reason=""):
        self.checks.append(IdentityCheck(name, "verified" if inequality else "failed",
                                         inequality=inequality, reason=reason))

    def skip(self, name, reason):
        self.checks.append(IdentityCheck(name, "skipped", reason=reason))

    def pos(self, x):
        return x > 0 if isinstance(x, Fraction) else x > self.tol

    def nonneg(self, x):
        return x >= 0 if isinstance(x, Fraction) else x >= -self.tol

    def ge(self, x, y):
        return leq(y, x, self.tol)


def verify_proof_identities(space: SimilaritySpace, tol: float = DEFAULT_TOL) -> ProofIdentityReport:
    """Evaluate both sides of every closed-form identity in the positivity proof.

    Constrained identities substitute the lemma's constraints into ``space``
    and first re-check membership in the valid domain; a failed hypothesis
    yields a ``skipped`` entry with the reason. Exact spaces are checked with
    exact equality.
    """
    _require4(space)
    ck = _Checker(tol)
    z12, z13, z14, z23, z24, z34 = z = _six(space)
    b = bounds4(space)
    b0 = b.b_zero
    delta = determinant(space)

    ck.equal("delta-expansion", delta, delta_expansion(space), ck.pos(delta))

    s34 = 1 - z34 * z34
    ck.equal("b0-via-Z13Z23", b0, z13 * z23 + (z14 - z13 * z34) * (z24 - z23 * z34) / s34,
             ck.ge(b0, b.b_minus) and ck.ge(b.b_plus, b0))
    ck.equal("b0-via-Z14Z24", b0, z14 * z24 + (z13 - z14 * z34) * (z23 - z24 * z34) / s34)

    lhs, rhs = decomposition4(space)
    ck.equal("key-decomposition", lhs, rhs, ck.pos(lhs))

    # f = Z23/Z13 - b0 and its endpoint values at Z24 = tilde_b_plus
    f = z23 / z13 - b0
    ck.equal("f-formula", f,
             (z23 * (1 - z13 * z13) * s34 - z13 * (z14 - z13 * z34) * (z24 - z23 * z34)) / (z13 * s34),
             ck.nonneg(f))
    tb = min(z23 / z34, z34 / z23)
    f_end = z23 / z13 - _b0(z13, z14, z23, tb, z34)
    if close(tb, z23 / z34, tol):
        closed = z23 * (z34 - z13 * z14) / (z13 * z34)
    else:
        closed = (z23 * (z34 - z13 * z14) / (z13 * z34)
                  + (z23 * z23 - z34 * z34) * (z14 - z13 * z34) / (z23 * z34 * s34))
    ck.equal("f-at-tilde-b-plus", f_end, closed, ck.nonneg(f_end) and ck.ge(f, f_end))

    # alternate decomposition around the pair (2, 3)
    c0 = _c0(z12, z13, z14, z23, z24)
    c_minus = max(z13 * z14, z23 * z24)
    c_plus = min(z14 / z13, z13 / z14, z24 / z23, z23 / z24)
    s12 = 1 - z12 * z12
    ck.equal("c0-decomposition", delta,
             -s12 * (z34 - c0) ** 2 + _delta3(z12, z13, z23) * _delta3(z12, z14, z24) / s12,
             ck.ge(z34, c_minus) and ck.ge(c_plus, z34))

    bp_minus, bp_plus = _single_and_double(ck, z)
    _two_constraint_2(ck, z)
    cases = classify_case(space, tol)
    _propositions(ck, z, cases)

    ctx = ProofIdentityContext(b_prime_minus=bp_minus, b_prime_plus=bp_plus, c_zero=c0,
                               c_minus=c_minus, c_plus=c_plus, tilde_b_plus=tb)
    return ProofIdentityReport(tuple(ck.checks), ctx, cases)


def _single_constraint_rhs(z13, z14, z23, z24, z34):
    return -(1 - z23 * z23) * (z14 - z13 * z34) ** 2 + (1 - z13 * z13) * _delta3(z23, z24, z34)


def _single_and_double(ck: _Checker, z):
    z12, z13, z14, z23, z24, z34 = z

    # single constraint Z12 = Z13·Z23
    y = (z13 * z23, z13, z14, z23, z24, z34)
    if _member(*y) is None:
        ck.skip("single-constraint", "Z12 := Z13·Z23 leaves the domain")
    else:
        d = _det6(*y)
        ck.equal("single-constraint", d, _single_constraint_rhs(z13, z14, z23, z24, z34), ck.pos(d))
        cp = min(z34 / z13, z13 * z23 / z24)
        y_end = (z13 * z23, z13, cp, z23, z24, z34)
        if _member(*y_end) is None:
            ck.skip("single-constraint-endpoint", "Z14 := c+ leaves the domain")
        else:
            d_end = _det6(*y_end)
            ck.holds("single-constraint-endpoint",
                     ck.ge(z14, max(y[0] * z24, z13 * z34))
                     and ck.ge(cp, z14) and ck.ge(d, d_end) and ck.pos(d_end))

    # first two-constraint lemma: Z14 = Z34/Z13, Z23 = Z12/Z13
    y = (z12, z13, z34 / z13, z12 / z13, z24, z34)
    if _member(*y) is None:
        ck.skip("two-constraint-1", "Z14 := Z34/Z13, Z23 := Z12/Z13 leaves the domain")
        return None, None
    y12, y13, y14, y23, y24, y34 = y
    d = _det6(*y)
    rhs = (1 - y13**2) * (-(y24 - y12 * y34 / y13) ** 2
                          + (y13**2 - y12**2) * (y13**2 - y34**2) / y13**4)
    ck.equal("two-constraint-1", d, rhs, ck.pos(d))
    bp_minus = max(y12 * y14, y23 * y34)
    bp_plus = min(y14 / y12, y12 / y14, y34 / y23, y23 / y34)
    ck.equal("two-constraint-1-b-prime-minus", bp_minus, y12 * y34 / y13,
             ck.ge(y24, bp_minus) and ck.ge(bp_plus, y24))
    ck.equal("two-constraint-1-b-prime-plus", bp_plus,
             min(y12 * y13 / y34, y13 * y34 / y12))

    # endpoint Z24 = b'+; case (b) maps to case (a) under (13)(24)
    d_end = _det6(y12, y13, y14, y23, bp_plus, y34)
    if close(bp_plus, y12 * y13 / y34, ck.tol):
        a12, a13, a34 = y12, y13, y34
    else:
        a12, a13, a34 = y34, y13, y12
    inner = a34**2 * (a13**2 - a12**2) - a12**2 * a13**2 * (a13**2 - a34**2)
    closed = (1 - a13**2) * (a13**2 - a34**2) / (a13**4 * a34**2) * inner
    ck.equal("two-constraint-1-endpoint", d_end, closed, ck.pos(d_end) and ck.ge(d, d_end))
    ck.equal("two-constraint-1-factorization", inner,
             (a34**2 - a12**2) * (a13**2 - a12**2 + a12**2 * a13**2)
             + a12**2 * (1 - a13**2) * (a13**2 - a12**2))
    return bp_minus, bp_plus


def _two_constraint_2(ck: _Checker, z):
    z12, _, _, z23, z24, z34 = z
    y = (z12, z12 / z23, z12 / z24, z23, z24, z34)
    if _member(*y) is None:
        ck.skip("two-constraint-2", "Z13 := Z12/Z23, Z14 := Z12/Z24 leaves the domain")
        return
    y12, y13, y14, y23, y24, y34 = y
    d = _det6(*y)
    c0 = _c0(y12, y13, y14, y23, y24)
    s12 = 1 - y12 * y12
    ck.equal("two-constraint-2", d,
             -s12 * (y34 - c0) ** 2 + _delta3(y12, y13, y23) * _delta3(y12, y14, y24) / s12,
             ck.pos(d) and y12 < min(y13, y23, y14, y24))
    c_minus = max(y13 * y14, y23 * y24)
    c_plus = min(y14 / y13, y13 / y14, y24 / y23, y23 / y24)
    ck.equal("two-constraint-2-c-minus", c_minus, max(y12**2 / (y23 * y24), y23 * y24),
             ck.ge(y34, c_minus) and ck.ge(c_plus, y34))
    ck.equal("two-constraint-2-c-plus", c_plus, min(y24 / y23, y23 / y24))

    u, v, p = y23**2, y24**2, y12**2
    if ck.ge(y34, c0):
        # upper branch; the case c+ = Z23/Z24 is the (34)-image of c+ = Z24/Z23
        d_end = _det6(y12, y13, y14, y23, y24, c_plus)
        if close(c_plus, y24 / y23, ck.tol):
            closed = (1 - u) * (v - p) * (u - v) / (u * v)
        else:
            closed = (1 - v) * (u - p) * (v - u) / (u * v)
        inside = _member(y12, y13, y14, y23, y24, c_plus) is not None
        ck.equal("two-constraint-2-upper", d_end, closed,
                 ck.ge(d, d_end) and (ck.pos(d_end) if inside else None) is not False)
    if ck.ge(c0, y34):
        d_end = _det6(y12, y13, y14, y23, y24, c_minus)
        if close(c_minus, y23 * y24, ck.tol):
            inner = u * v - p * u - p * v + p * u * v
            closed = (1 - u) * (1 - v) / (u * v) * inner
            ck.equal("two-constraint-2-lower-factorization", inner,
                     (1 - (1 - u) * (1 - v)) * (u * v - p) + u * v * (1 - u) * (1 - v))
            bound_ok = True
        else:
            closed = (u - p) * (v - p) * (1 - u - v + p) / (u * v)
            bound_ok = ck.ge(closed, (u - p) * (v - p) * (1 - u) * (1 - v) / (u * v))
        ck.equal("two-constraint-2-lower", d_end, closed,
                 ck.ge(d, d_end) and ck.pos(d_end) and bound_ok)


def _propositions(ck: _Checker, z, cases):
    z12, z13, z14, z23, z24, z34 = z
    d = _det6(*z)
    if CaseLabel.L1 in cases:
        d_low = _det6(z13 * z23, z13, z14, z23, z24, z34)
        ck.holds("proposition-L1", ck.ge(d, d_low) and ck.pos(d_low))
    if CaseLabel.R1 in cases:
        d_high = _det6(z23 / z13, z13, z14, z23, z24, z34)
        # relabel 0<->2: the constraint Z12 = Z23/Z13 becomes the single constraint
        via_single = _single_constraint_rhs(z13, z34, z23 / z13, z24, z14)
        if _member(z23 / z13, z13, z14, z23, z24, z34) is None:
            # b+ = 1: the endpoint is degenerate and only the weak bound survives
            ck.equal("proposition-R1", d_high, via_single,
                     ck.ge(d, d_high) and ck.nonneg(d_high),
                     reason="endpoint Z12 = Z23/Z13 leaves the domain")
        else:
            ck.equal("proposition-R1", d_high, via_single, ck.ge(d, d_high) and ck.pos(d_high))


# ---------------------------------------------------------------------------
# campaign

_PERMS = {"(12)": (1, 0, 2, 3), "(34)": (0, 1, 3, 2), "(12)(34)": (1, 0, 3, 2)}


def check_sample(space: SimilaritySpace, index: int, tally: "campaign.Tally",
                 boundary: bool = False) -> None:
    """Run every four-point invariant on one exact sample, recording failures."""
    minors = leading_principal_minors(space)
    det = minors[-1]
    if not det > 0:
        tally.violation("det-positive", index, space, determinant=det)
    if not all(m > 0 for m in minors):
        tally.violation("minors-positive", index, space, minors=minors)
    b = bounds4(space)
    z12 = space.Z[0][1]
    if not (0 < b.b_minus <= z12 <= b.b_plus <= 1):
        tally.violation("z-within-bounds", index, space, b_minus=b.b_minus, b_plus=b.b_plus)
    if not (b.b_minus <= b.b_zero <= b.b_plus):
        tally.violation("bounds-order", index, space, b_minus=b.b_minus, b_zero=b.b_zero,
                        b_plus=b.b_plus)
    for name, perm in _PERMS.items():
        if bounds4(space.permuted(perm)).b_zero != b.b_zero:
            tally.violation(f"b0-invariant-{name}", index, space)
    _, z13, _, z23, _, _ = _six(space)
    if not z23 / z13 - b.b_zero >= 0:
        tally.violation("f-nonnegative", index, space)
    _, rhs = decomposition4(space)
    if rhs != det:
        tally.violation("decomposition", index, space, lhs=det, rhs=rhs)
    cases = classify_case(space)
    if not cases:
        tally.violation("case-cover", index, space)
    for label in cases:
        tally.histogram[label.value] += 1
    if boundary:
        for tag, value in (("b-minus", b.b_minus), ("b-plus", b.b_plus)):
            if value >= 1:
                tally.counters[f"boundary-{tag}-degenerate"] += 1
                continue
            forced = force_entry(space, 0, 1, value)
            if forced is None:
                tally.violation(f"boundary-{tag}-valid", index, space)
            elif not determinant(forced) > 0:
                tally.violation(f"boundary-{tag}-det-positive", index, forced)
            else:
                tally.counters[f"boundary-{tag}-checked"] += 1


def _positivity_chunk(chunk, count, seed, denominator_bound=64, boundary=False):
    sampler = SimilaritySampler(GeneratorConfig(seed, denominator_bound), rng=stream(seed, chunk))
    tally = campaign.Tally()
    for k in range(count):
        space = sampler.sample(4)
        check_sample(space, chunk * campaign.CHUNK + k, tally, boundary)
        tally.samples += 1
    tally.counters["draws"] += sampler.attempts
    return tally


def verify_positivity_campaign(n_samples: int, seed: int, denominator_bound: int = 64,
                               boundary: bool = False, workers: int = 1) -> "campaign.CampaignReport":
    """Sample exact 4-point spaces and check every invariant above on each.

    The report's ``stats`` carries per-check violation counts and the draw
    count (acceptance rate = samples / draws).
    """
    report = campaign.run("det4-positive", _positivity_chunk, n_samples, seed, workers,
                          denominator_bound=denominator_bound, boundary=boundary)
    draws = report.stats.get("draws", 0)
    report.stats["acceptance_rate"] = report.samples / draws if draws else 0.0
    return report
