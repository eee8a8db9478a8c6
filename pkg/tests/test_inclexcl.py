import itertools
import math
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracle
from strategies import similarity_spaces
from metricmag import linalg
from metricmag.core import (FiniteMetricSpace, SimilaritySpace, determinant, from_distances,
                            is_positive_definite, magnitude, restrict, weighting)
from metricmag.errors import ConstructionError, SingularityError, ValidationError
from metricmag.fixtures import circle_1, circle_2, equilateral, path_3, q4
from metricmag.fourpoint import bounds4
from metricmag.spacegen import complete_bipartite, graph_distances
from metricmag.inclexcl import (adjugate_block, b0_bordered, bordered_determinant,
                                check_conditions, comparison_report, converse_check, defect,
                                delta_three_point, five_circle_report, general_b0,
                                general_b_minus, glue_at_b0, magnitude_split,
                                pair_decomposition, three_point_positive_factor)

h = F(1, 2)

def a_pair(n, data):
    i, j = data.draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=2, unique=True))
    return i, j


# -- bordered determinant and b0

def test_bordered_trivial():
    assert bordered_determinant(1, (), (), []) == 1
    assert bordered_determinant(1, (h,), (h,), [[1]]) == F(3, 4)
    with pytest.raises(ValidationError):
        bordered_determinant(1, (h,), (), [[1]])


@given(similarity_spaces(4, 5))
def test_bordered_matches_laplace(space):
    Z = space.Z
    M = [row[1:] for row in Z[1:]]
    assert bordered_determinant(Z[0][0], Z[0][1:], [r[0] for r in Z[1:]], M) \
        == oracle.laplace_det(Z)


@given(similarity_spaces(4, 4))
def test_b0_agrees_with_four_point(space):
    b = bounds4(space)
    assert general_b0(space, (0, 1)) == b.b_zero == b0_bordered(space, (0, 1))
    assert general_b_minus(space, (0, 1)) == b.b_minus


@given(similarity_spaces(4, 4))
def test_b0_for_pair_34_is_c0(space):
    z = space.Z
    z12, z13, z14, z23, z24 = z[0][1], z[0][2], z[0][3], z[1][2], z[1][3]
    c0 = (z13 * z14 + z23 * z24 - z12 * z13 * z24 - z12 * z14 * z23) / (1 - z12 ** 2)
    assert general_b0(space, (2, 3)) == c0


def test_b_minus_equilateral():
    assert general_b_minus(equilateral(5), (1, 3)) == F(1, 4)


@given(similarity_spaces(3, 6), st.data())
def test_b0_invariant_under_relabelling(space, data):
    n = space.n
    i, j = a_pair(n, data)
    rest = data.draw(st.permutations([k for k in range(n) if k not in (i, j)]))
    order = [i, j] + list(rest)
    b0 = general_b0(space, (i, j))
    moved = space.permuted(order)
    assert general_b0(moved, (0, 1)) == b0 == general_b0(moved, (1, 0))


def test_b0_needs_three_points():
    with pytest.raises(ValidationError):
        general_b0(equilateral(2), (0, 1))


# -- adjugate block

def test_adjugate_block_two_point():
    adj, order = adjugate_block(equilateral(3), (0, 1))
    assert adj == [[1, -h], [-h, 1]] and order == (1, 2)


def test_adjugate_block_q4():
    adj, order = adjugate_block(q4(), (0, 1))
    zb = oracle.sub(q4().Z, order)
    assert oracle.matmul(zb, adj) == [[h if i == j else 0 for j in range(3)] for i in range(3)]


@given(similarity_spaces(3, 6), st.data())
def test_adjugate_block_matches_cofactors(space, data):
    pair = a_pair(space.n, data)
    adj, order = adjugate_block(space, pair)
    zb = oracle.sub(space.Z, order)
    assert adj == oracle.cofactor_adjugate(zb)
    d = determinant(SimilaritySpace(zb))
    assert oracle.matmul(zb, adj) == [[d if i == j else 0 for j in range(len(order))]
                                      for i in range(len(order))]


# -- decomposition

def test_pair_decomposition_q4():
    pd = pair_decomposition(q4(), (0, 1))
    assert pd.lhs == pd.rhs == F(1, 3) == (h * h) / F(3, 4)
    assert pd.b_zero == F(1, 3) and pd.b_minus == F(1, 4)


def test_pair_decomposition_equilateral_5():
    for pair in itertools.combinations(range(5), 2):
        pd = pair_decomposition(equilateral(5), pair)
        assert pd.lhs == pd.rhs == oracle.laplace_det(equilateral(5).Z)


@given(similarity_spaces(3, 3))
def test_pair_decomposition_three_point(space):
    z12, z13, z23 = space.Z[0][1], space.Z[0][2], space.Z[1][2]
    pd = pair_decomposition(space, (0, 1))
    assert pd.b_zero == z13 * z23 == pd.b_minus
    assert pd.rhs == -(z12 - z13 * z23) ** 2 + (1 - z13 ** 2) * (1 - z23 ** 2) == pd.lhs


@given(similarity_spaces(3, 7), st.data())
def test_pair_decomposition_exact(space, data):
    pd = pair_decomposition(space, a_pair(space.n, data))
    assert pd.lhs == pd.rhs


@given(similarity_spaces(3, 6), st.data())
def test_pair_decomposition_float(space, data):
    pd = pair_decomposition(space.to_float(), a_pair(space.n, data))
    assert abs(pd.residual) <= 1e-10


def k32_at_singular_scale():
    # det of q**d on K3,2 is (1-q²)³(2q²-1)(q²-1): zero at q = 1/sqrt(2)
    d = graph_distances(complete_bipartite(3, 2), 5)
    q = 2 ** -0.5
    return SimilaritySpace([[q ** x for x in row] for row in d])


def test_singular_space_reported():
    space = k32_at_singular_scale()
    with pytest.raises(SingularityError) as exc:
        defect(space, (0, 1))
    assert exc.value.what == "X"


# -- magnitude split and defect

def test_magnitude_split_q4():
    split = magnitude_split(q4(), (0, 1))
    assert split.mag_B == F(3, 2) == F(4, 3) + F(3, 2) * F(1, 3) ** 2
    assert split.beta == h
    assert split.order == (1, 2, 3)
    assert list(split.w_B.w) == oracle.weights(oracle.sub(q4().Z, split.order))


@given(similarity_spaces(3, 3))
def test_magnitude_split_two_point(space):
    split = magnitude_split(space, (0, 1))
    assert split.mag_B == 2 / (1 + space.Z[1][2])


@given(similarity_spaces(3, 6), st.data())
def test_magnitude_split_matches_direct(space, data):
    split = magnitude_split(space, a_pair(space.n, data))
    sub = oracle.sub(space.Z, split.order)
    assert split.mag_B == oracle.magnitude(sub)
    assert list(split.w_B.w) == oracle.weights(sub)


def test_defect_q4():
    rep = defect(q4())
    assert rep.delta_direct == rep.delta_formula == 0
    assert rep.magnitudes == {"X": F(5, 3), "A": F(3, 2), "B": F(3, 2), "A∩B": F(4, 3)}


def test_defect_equilateral():
    rep = defect(equilateral(4))
    assert rep.delta_direct == rep.delta_formula == F(8, 5) - 3 + F(4, 3) == F(-1, 15)


@given(similarity_spaces(3, 6), st.data())
def test_defect_formula(space, data):
    rep = defect(space, a_pair(space.n, data))
    assert rep.delta_direct == rep.delta_formula
    direct = (oracle.magnitude(space.Z) - rep.magnitudes["A"] - rep.magnitudes["B"]
              + rep.magnitudes["A∩B"])
    assert rep.delta_direct == direct


# -- gluing

def test_glue_two_triangles_gives_q4():
    assert glue_at_b0(equilateral(4)) == q4()


def test_glue_circle_2_fails():
    with pytest.raises(ConstructionError, match="b_minus"):
        glue_at_b0(from_distances(circle_2()))


@given(similarity_spaces(4, 4), st.data())
def test_glue_four_point_always_succeeds(space, data):
    pair = a_pair(4, data)
    glued = glue_at_b0(space, pair)
    rep = defect(glued, pair)
    assert rep.delta_direct == rep.delta_formula == 0


@given(similarity_spaces(3, 6))
def test_glue_delta_zero(space):
    try:
        glued = glue_at_b0(space)
    except ConstructionError:
        return
    assert defect(glued).delta_direct == 0
    assert magnitude(glued) == (magnitude(restrict(glued, [0] + list(range(2, space.n))))
                                + magnitude(restrict(glued, range(1, space.n)))
                                - magnitude(restrict(glued, range(2, space.n))))


# -- conditions

def test_conditions_circle_1():
    rep = check_conditions(circle_1(), [0, 2, 3, 4], [1, 2, 3, 4])
    assert rep.c1 and not rep.c2
    assert rep.witnesses["c1_gates"][(0, 1)] == 2
    assert set(rep.witnesses["c1_gates"].values()) == {2, 3, 4}


def test_conditions_path():
    rep = check_conditions(path_3(), [0, 2], [1, 2])
    assert rep.c1 and rep.c2a and rep.c2b


def test_conditions_equilateral():
    d = FiniteMetricSpace([[0 if i == j else 1 for j in range(4)] for i in range(4)])
    rep = check_conditions(d, [0, 2, 3], [1, 2, 3])
    assert not rep.c1 and (0, 1) in rep.witnesses["c1_failures"]


def test_conditions_multiplicative_matches_additive():
    for metric in (circle_1(), circle_2(), path_3()):
        n = metric.n
        A, B = [0] + list(range(2, n)), list(range(1, n))
        add = check_conditions(metric, A, B)
        mul = check_conditions(from_distances(metric), A, B)
        assert (add.c1, add.c2a, add.c2b) == (mul.c1, mul.c2a, mul.c2b)


def test_conditions_preconditions():
    with pytest.raises(ValidationError):
        check_conditions(path_3(), [0], [1])
    with pytest.raises(ValidationError):
        check_conditions(path_3(), [0, 2], [1])


def test_c2b_is_mirror_of_c2a():
    # swapping the roles of A and B swaps C2a and C2b
    for metric in (circle_1(), circle_2()):
        A, B = [0, 2, 3, 4], [1, 2, 3, 4]
        r1, r2 = check_conditions(metric, A, B), check_conditions(metric, B, A)
        assert (r1.c2a, r1.c2b) == (r2.c2b, r2.c2a)


# -- comparison lemma and circle examples

def test_comparison_circle_1():
    rep = comparison_report(from_distances(circle_1()))
    assert rep.c1 and not rep.c2
    target = math.exp(-3 * math.pi / 4)
    assert abs(rep.z_pair - target) <= 1e-9
    assert abs(rep.b_minus - target) <= 1e-9 and abs(rep.b_zero - target) <= 1e-9


def test_comparison_q4():
    rep = comparison_report(q4())
    assert not rep.c1 and rep.z_pair == F(1, 3) != rep.b_minus == F(1, 4)
    assert rep.c1_equivalence_holds and rep.c2_implication_holds


def test_five_circle_examples():
    r1 = five_circle_report(from_distances(circle_1()))
    assert abs(r1.P) <= 1e-9 and abs(r1.b_zero - r1.b_minus) <= 1e-9
    assert abs(r1.b_zero - math.exp(-3 * math.pi / 4)) <= 1e-9
    r2 = five_circle_report(from_distances(circle_2()))
    assert r2.P < 0 and r2.b_zero < r2.b_minus
    assert abs(r2.b_minus - math.exp(-math.pi / 4) * math.exp(-math.pi / 4)) <= 1e-12


@given(similarity_spaces(5, 5))
def test_five_point_formula(space):
    rep = five_circle_report(space)
    assert rep.b_zero == rep.b_zero_general == general_b0(space, (0, 1))
    assert rep.P == rep.P_alt and rep.Q == rep.Q_alt


def test_five_point_needs_five():
    with pytest.raises(ValidationError):
        five_circle_report(q4())


@given(similarity_spaces(3, 6), st.data())
def test_comparison_lemma(space, data):
    if data.draw(st.booleans()):
        forced = space.with_entry(0, 1, general_b_minus(space, (0, 1)))
        space = forced
    rep = comparison_report(space)
    assert rep.c1_equivalence_holds
    assert rep.c2_implication_holds


# -- converse

@given(similarity_spaces(3, 3))
def test_converse_three_point(space):
    rep = converse_check(space)
    assert rep.hypotheses_hold and rep.implication_holds
    assert delta_three_point(space) == rep.delta
    lhs, rhs = three_point_positive_factor(space)
    assert lhs == rhs > 0
    assert (rep.delta == 0) == (space.Z[0][1] == space.Z[0][2] * space.Z[1][2])


def test_converse_q4():
    rep = converse_check(q4())
    assert rep.hypotheses_hold and rep.delta_zero and rep.z_equals_b0 and rep.implication_holds


def test_converse_equilateral():
    rep = converse_check(equilateral(4))
    assert rep.delta == F(-1, 15) and not rep.delta_zero and rep.implication_holds


@given(similarity_spaces(4, 4))
def test_four_point_hypotheses_redundant(space):
    rep = converse_check(space)
    if rep.z_le_b0:
        assert rep.hypotheses_hold
    assert is_positive_definite(space)
    for tri in itertools.combinations(range(4), 3):
        assert all(w > 0 for w in weighting(restrict(space, tri)).w)


@given(similarity_spaces(4, 6))
def test_converse_implication(space):
    assert converse_check(space).implication_holds
