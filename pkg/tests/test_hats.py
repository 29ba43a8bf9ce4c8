import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_complex, random_vertex
from mvsubalg.cancel import CancellationToken
from mvsubalg.decide import check_equals_free, check_separation
from mvsubalg.geometry import (Complex, GeometryError, blow_up, denominator,
                               desingularize, is_regular_complex, is_regular_simplex,
                               standard_cube_triangulation)
from mvsubalg.hats import (HatSet, WeightedTriangulation, basic_defect, hat, hats_of,
                           interval_triangulation, is_basic, multipliers, schauder_hats,
                           verify_unit_partition, weighted_from_json, weighted_to_json)
from mvsubalg.linalg import affine_rank
from mvsubalg.pwl import LinearForm, from_vertex_values
from mvsubalg.synth import synthesize_term


def lf(*coeffs, const):
    return LinearForm(tuple(F(c) for c in coeffs), F(const))


def forms(h):
    return list(h.pieces)


def u_triangulation(u):
    return interval_triangulation([F(k, u) for k in range(u + 1)])


def u_weights(u):
    return WeightedTriangulation(u_triangulation(u), tuple(denominator((F(k, u),)) for k in range(u + 1)))


HALF = interval_triangulation([F(1, 2)])


def test_hats_on_halved_interval():
    hs = hats_of(WeightedTriangulation.uniform(HALF))
    assert forms(hs.hats[0]) == [lf(-2, const=1), lf(0, const=0)]
    assert forms(hs.hats[1]) == [lf(1, const=0), lf(-1, const=1)]
    assert hs.hats[1]([F(1, 2)]) == F(1, 2)
    assert forms(hs.hats[2]) == [lf(0, const=0), lf(2, const=-1)]


@pytest.mark.parametrize("u", [3, 4, 5, 7])
def test_hats_with_full_weights_match_closed_form(u):
    # hat k rises as u*x - (k-1) and falls as -u*x + k + 1; the end hats are half tents
    hs = hats_of(u_weights(u))
    for k in range(1, u):
        h = hs.hats[k]
        for j in range(u * 4 + 1):
            x = F(j, 4 * u)
            if x < F(k - 1, u) or x > F(k + 1, u):
                want = 0
            elif x < F(k, u):
                want = u * x - (k - 1)
            else:
                want = -u * x + k + 1
            assert h([x]) == want
        assert h([F(k, u)]) == 1
    for j in range(u * 4 + 1):
        x = F(j, 4 * u)
        assert hs.hats[0]([x]) == max(0, 1 - u * x)
        assert hs.hats[u]([x]) == max(0, u * x - (u - 1))


def test_single_simplex_hats_are_affine_coordinates():
    hs = hats_of(WeightedTriangulation.uniform(standard_cube_triangulation(1)))
    assert forms(hs.hats[0]) == [lf(-1, const=1)] and forms(hs.hats[1]) == [lf(1, const=0)]
    tri = Complex.from_simplices(2, [[(0, 0), (1, 0), (0, 1)]])
    hs = hats_of(WeightedTriangulation.uniform(tri))
    assert forms(hs.hats[0]) == [lf(-1, -1, const=1)]
    assert forms(hs.hats[1]) == [lf(0, 1, const=0)]
    assert forms(hs.hats[2]) == [lf(1, 0, const=0)]


def test_weights_must_divide_denominators():
    with pytest.raises(ValueError):
        WeightedTriangulation(HALF, (1, 3, 1))
    with pytest.raises(ValueError):
        WeightedTriangulation(HALF, (1, 0, 1))
    with pytest.raises(ValueError):
        WeightedTriangulation(HALF, (1, 1))


def test_is_basic_examples():
    assert is_basic(WeightedTriangulation.uniform(HALF))
    assert is_basic(WeightedTriangulation(HALF, (1, 2, 1)))
    for u in (3, 5, 6):
        assert not is_regular_complex(u_triangulation(u))
        assert is_basic(u_weights(u))
    thirds = WeightedTriangulation.uniform(u_triangulation(3))
    assert not is_basic(thirds)
    h = hats_of(thirds).hats[1]
    assert lf(-1, const=F(2, 3)) in forms(h)


def test_schauder_hats_examples():
    hs = schauder_hats(standard_cube_triangulation(1))
    assert [forms(h) for h in hs.hats] == [[lf(-1, const=1)], [lf(1, const=0)]]
    assert verify_unit_partition(schauder_hats(HALF))
    with pytest.raises(GeometryError):
        schauder_hats(u_triangulation(3))


def test_multiplier_examples():
    assert multipliers(WeightedTriangulation.uniform(HALF)) == [1, 2, 1]
    assert multipliers(WeightedTriangulation(HALF, (1, 2, 1))) == [1, 1, 1]
    assert multipliers(u_weights(5)) == [1] * 6
    with pytest.raises(GeometryError):
        multipliers(WeightedTriangulation.uniform(u_triangulation(3)))


def test_unit_partition_examples():
    assert verify_unit_partition(hats_of(u_weights(3)))
    assert verify_unit_partition(hats_of(WeightedTriangulation(HALF, (1, 2, 1))))
    hs = schauder_hats(HALF)
    for i in range(len(hs)):
        assert not verify_unit_partition(hs.without(i))
    assert not verify_unit_partition(HatSet((), (), ()))


def test_hat_rejects_foreign_vertex():
    with pytest.raises(GeometryError):
        hat(HALF, (F(1, 3),), 1)


def test_weighted_json_round_trip():
    w = u_weights(4)
    assert weighted_from_json(weighted_to_json(w)) == w
    obj = weighted_to_json(w)
    obj["weights"] = ["x"] * len(w.weights)
    with pytest.raises(GeometryError):
        weighted_from_json(obj)


# -- properties ---------------------------------------------------------------

def regular_complex(rng, n):
    cx, _ = desingularize(random_complex(rng, n, max_den=6), CancellationToken(30))
    return cx


def admissible_weights(rng, cx):
    out = []
    for v in cx.vertices():
        d = denominator(v)
        out.append(rng.choice([a for a in range(1, d + 1) if d % a == 0]))
    return tuple(out)


@pytest.mark.parametrize("seed", range(12))
def test_matrix_test_agrees_with_integral_hats(seed):
    rng = random.Random(seed)
    n = 1 + seed % 2
    cx = random_complex(rng, n, max_den=6)
    for _ in range(3):
        w = WeightedTriangulation(cx, admissible_weights(rng, cx))
        integral = all(h.is_integral() for h in hats_of(w).hats)
        assert is_basic(w) == integral
        if not integral:
            t = basic_defect(w)
            assert t is not None and t in cx.simplexes


@pytest.mark.parametrize("seed", range(8))
def test_regular_complexes_are_basic_for_any_weights(seed):
    rng = random.Random(100 + seed)
    cx = regular_complex(rng, 1 + seed % 2)
    w = WeightedTriangulation(cx, admissible_weights(rng, cx))
    assert is_basic(w)
    hs = hats_of(w)
    assert verify_unit_partition(hs)
    for v, a, h in zip(hs.vertices, hs.weights, hs.hats):
        assert h(v) == F(a, denominator(v))
        assert all(h(u) == 0 for u in hs.vertices if u != v)


@given(st.integers(0, 2 ** 32))
@settings(max_examples=40)
def test_simplex_regular_iff_unit_hats_integral(seed):
    rng = random.Random(seed)
    n = rng.choice([1, 2])
    while True:
        s = [random_vertex(rng, n, 7) for _ in range(n + 1)]
        if affine_rank(s) == n:
            break
    t = Complex.from_simplices(n, [s])
    # interpolation route: unit hats taking 1/den(w) at each vertex w
    integral = True
    for v in t.vertices():
        vals = {u: F(0) for u in t.vertices()}
        vals[v] = F(1, denominator(v))
        integral &= from_vertex_values(t, vals).is_integral()
    assert integral == is_regular_simplex(t.simplexes[0])


# -- generated subalgebras ----------------------------------------------------

def hat_terms(hs):
    return [synthesize_term(h) for h in hs.hats]


def test_full_weight_hats_generate_a_proper_separating_subalgebra():
    hs = hats_of(u_weights(3))
    ts = hat_terms(hs)
    assert check_separation(ts, 1).verdict
    assert not check_equals_free(ts, 1).verdict


def test_nontrivial_weights_give_a_proper_subalgebra():
    hs = hats_of(WeightedTriangulation(HALF, (1, 2, 1)))
    ts = hat_terms(hs)
    assert check_separation(ts, 1).verdict
    assert not check_equals_free(ts, 1).verdict


@pytest.mark.parametrize("cx", [HALF, u_triangulation(1),
                                interval_triangulation([F(1, 3), F(1, 2)]),
                                blow_up(standard_cube_triangulation(2), (F(1, 2), F(1, 2)))],
                         ids=["half", "unit", "farey", "square"])
def test_schauder_hats_generate_the_free_algebra(cx):
    ts = hat_terms(schauder_hats(cx))
    assert check_equals_free(ts, cx.dim).verdict
