import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from labkit.algebra import abelian, berezin_bracket, direct_sum, heisenberg, so3
from labkit.enveloping import (
    Factorizability,
    NCPoly,
    certify_nonfactorizable,
    filtration_degree,
    format_ncpoly,
    leading_symbol,
    nc_commutator,
    nc_mul,
    normal_order,
    parse_ncpoly,
    project,
    symmetrize,
)
from labkit.poly import Poly, parse_poly

SO3 = so3()
HEIS = heisenberg()


def W(n, *letters, c=1):
    return NCPoly(n, {tuple(letters): c})


def X(k, n=3):
    return NCPoly.generator(n, k)


@st.composite
def ncpolys(draw, n=3, max_len=3):
    terms = {}
    for _ in range(draw(st.integers(0, 3))):
        word = tuple(draw(st.lists(st.integers(0, n - 1), max_size=max_len)))
        terms[word] = draw(st.integers(-4, 4))
    return NCPoly(n, terms)


@st.composite
def homogeneous(draw, n=3):
    d = draw(st.integers(1, 3))
    terms = {}
    for _ in range(draw(st.integers(1, 3))):
        cuts = sorted(draw(st.lists(st.integers(0, d), min_size=n - 1, max_size=n - 1)))
        exps = [b - a for a, b in zip([0] + cuts, cuts + [d])]
        terms[tuple(exps)] = draw(st.integers(1, 4)) * draw(st.sampled_from((1, -1)))
    return Poly(n, terms)


# -- normal ordering ---------------------------------------------------------------------

def test_normal_order_examples():
    # 0-based: [X1, X0] = -X2
    assert normal_order(SO3, W(3, 1, 0)) == X(0) * X(1) - X(2)
    assert normal_order(SO3, W(3, 0, 1, 1)) == W(3, 0, 1, 1)
    assert normal_order(HEIS, W(3, 1, 0, 1)) == W(3, 0, 1, 1) - W(3, 1, 2)


@settings(max_examples=40, deadline=None)
@given(ncpolys(), st.integers(0, 10**6), st.sampled_from(["so3", "heisenberg"]))
def test_confluence(p, seed, name):
    alg = SO3 if name == "so3" else HEIS
    a = normal_order(alg, p)
    b = normal_order(alg, p, strategy="random", rng=random.Random(seed))
    assert a == b and a.normalized
    assert normal_order(alg, a) == a


@settings(max_examples=30, deadline=None)
@given(ncpolys(), ncpolys(), ncpolys())
def test_associativity(a, b, c):
    assert nc_mul(SO3, nc_mul(SO3, a, b), c) == nc_mul(SO3, a, nc_mul(SO3, b, c))


def test_commutator_examples():
    assert nc_commutator(SO3, X(0), X(1)) == X(2)
    a = X(0) * X(1) + 3
    assert not nc_commutator(SO3, a, a)
    comm = nc_commutator(SO3, symmetrize(SO3, parse_poly("x0^2", 3)), symmetrize(SO3, parse_poly("x1^2", 3)))
    assert leading_symbol(comm, 3) == parse_poly("4*x0*x1*x2", 3)


# -- symmetrization and projection -------------------------------------------------------

def test_symmetrize_examples():
    assert symmetrize(SO3, parse_poly("x0", 3)) == X(0)
    assert symmetrize(SO3, parse_poly("x0*x1", 3)) == X(0) * X(1) - NCPoly(3, {(2,): "1/2"})
    assert symmetrize(SO3, parse_poly("x0^2", 3)) == W(3, 0, 0)
    assert format_ncpoly(symmetrize(SO3, parse_poly("x0*x1", 3))) == "X0 X1 - 1/2*X2"


def test_symmetrize_matches_full_permutation_average():
    # X0 X0 X1 averaged over all 3! orderings by hand: (2 X0X0X1 + 2 X0X1X0 + 2 X1X0X0) / 6
    direct = (W(3, 0, 0, 1) + W(3, 0, 1, 0) + W(3, 1, 0, 0)) * Fraction(1, 3)
    assert symmetrize(HEIS, parse_poly("x0^2*x1", 3)) == normal_order(HEIS, direct)


def test_project_examples():
    assert project(X(0) * X(1) - X(2)) == parse_poly("x0*x1 - x2", 3)
    assert project(X(0) * X(1) + X(1) * X(0)) == parse_poly("2*x0*x1", 3)
    assert project(symmetrize(SO3, parse_poly("x0*x1", 3))) == parse_poly("x0*x1 - 1/2*x2", 3)


@settings(max_examples=40, deadline=None)
@given(homogeneous(), st.sampled_from(["so3", "heisenberg"]))
def test_top_symbol_of_symmetrization(f, name):
    alg = SO3 if name == "so3" else HEIS
    assert leading_symbol(symmetrize(alg, f), f.degree) == f


# -- filtration ---------------------------------------------------------------------------

def test_filtration_examples():
    p = X(0) * X(1) - X(2)
    assert filtration_degree(p) == 2
    assert leading_symbol(p, 2) == parse_poly("x0*x1", 3)
    zero = NCPoly(3)
    assert filtration_degree(zero) is None
    assert not leading_symbol(zero, 2)
    assert not leading_symbol(p, 5)


@settings(max_examples=40, deadline=None)
@given(homogeneous(), homogeneous(), st.sampled_from(["so3", "heisenberg"]))
def test_leading_symbol_is_the_bracket(f, g, name):
    alg = SO3 if name == "so3" else HEIS
    comm = nc_commutator(alg, symmetrize(alg, f), symmetrize(alg, g))
    assert leading_symbol(comm, f.degree + g.degree - 1) == berezin_bracket(alg, f, g)
    fd = filtration_degree(comm)
    assert fd is None or fd <= f.degree + g.degree - 1


def test_factorized_words_lose_two_degrees():
    # X0 X1 and X1 X0: same projection, so the p+q-1 symbol vanishes as well
    comm = nc_commutator(SO3, W(3, 0, 1), W(3, 1, 0))
    assert filtration_degree(comm) <= 2


# -- factorizability ----------------------------------------------------------------------

def test_certifier_examples():
    assert certify_nonfactorizable(SO3, parse_poly("x0^2", 3), parse_poly("x1^2", 3)).nonfactorizable
    alg = direct_sum(SO3, abelian(1))
    res = certify_nonfactorizable(alg, parse_poly("x3*x0", 4), parse_poly("x3*x0^2", 4))
    assert res.status is Factorizability.POSSIBLY_FACTORIZABLE
    assert res.witness[2] in ({0: 1}, {3: 1})
    assert certify_nonfactorizable(alg, parse_poly("x3*x0", 4), parse_poly("x3*x1", 4)).nonfactorizable


def test_equal_monomials_always_flagged():
    f = parse_poly("x0*x1", 3)
    assert not certify_nonfactorizable(SO3, f, f).nonfactorizable


def test_certifier_rejects_zero():
    with pytest.raises(ValueError):
        certify_nonfactorizable(SO3, Poly.zero(3), parse_poly("x0", 3))


def test_degree_four_pair_outside_the_certifier_guarantee():
    """A certified pair with vanishing bracket whose symmetrizations do not commute.

    The monomial words commute to filtration 4 rather than p + q - 1 = 5 even
    though no generator-wise factorization exists, so the certificate alone
    cannot settle commutation here; the enveloping oracle is needed.
    """
    f, g = parse_poly("x0*x1", 3), parse_poly("x0^2*x1^2", 3)
    assert certify_nonfactorizable(SO3, f, g).nonfactorizable
    assert not berezin_bracket(SO3, f, g)
    comm = nc_commutator(SO3, symmetrize(SO3, f), symmetrize(SO3, g))
    assert comm
    assert format_ncpoly(comm) == "5/6*X0 X0 X2 - 5/6*X1 X1 X2 + 5/3*X0 X1 - 5/6*X2"
    words = nc_commutator(SO3, W(3, 0, 1), W(3, 0, 0, 1, 1))
    assert filtration_degree(words) == 4


# -- text ----------------------------------------------------------------------------------

def test_ncpoly_text_round_trip():
    p = parse_ncpoly("2*X1 X0 - (1/2)*X2 + 3", 3)
    assert p.terms == {(1, 0): 2, (2,): Fraction(-1, 2), (): 3}
    q = normal_order(SO3, p)
    assert parse_ncpoly(format_ncpoly(q), 3) == q
