import pytest
from hypothesis import given, settings, strategies as st
from sympy import GF, Poly, symbols

from pirforms.ring import (Family, LocalPIR, RingElem, crt_decompose, divide_by_pi_power, factorize, invert_unit,
                           residue, unit_part, valuation)

t = symbols("t")


def rings():
    return st.sampled_from([LocalPIR(2, 3), LocalPIR(3, 2), LocalPIR(5, 2), LocalPIR(2, 4, Family.FPT),
                            LocalPIR(3, 3, Family.FPT), LocalPIR(5, 2, Family.FPT), LocalPIR(7, 1)])


@st.composite
def ring_and_elems(draw, k=2):
    R = draw(rings())
    return (R, *[draw(st.integers(0, R.size - 1)) for _ in range(k)])


def test_crt_examples():
    assert [(R.p, R.n) for R in crt_decompose(12)] == [(2, 2), (3, 1)]
    assert [(R.p, R.n) for R in crt_decompose(4)] == [(2, 2)]
    assert [(R.p, R.n) for R in crt_decompose(30)] == [(2, 1), (3, 1), (5, 1)]
    with pytest.raises(ValueError):
        crt_decompose(1)


def test_valuation_examples():
    Z8 = LocalPIR(2, 3)
    assert [valuation(Z8.elem(x)) for x in (4, 0, 3)] == [2, 3, 0]


def test_unit_and_inverse_examples():
    assert unit_part(LocalPIR(2, 5).elem(12)).value == 3
    assert invert_unit(LocalPIR(2, 3).elem(3)).value == 3
    with pytest.raises(ValueError):
        invert_unit(LocalPIR(2, 3).elem(2))


def test_nilpotent_product_in_truncated_polynomials():
    R = LocalPIR(3, 3, Family.FPT)
    tt, t2 = R.elem([0, 1]), R.elem([0, 0, 1])
    assert (tt * t2).value == 0


def test_divide_and_residue_examples():
    Z8 = LocalPIR(2, 3)
    assert divide_by_pi_power(Z8.elem(4), 2).value == 1
    assert divide_by_pi_power(Z8.elem(6), 1).value == 3
    assert residue(LocalPIR(3, 2).elem(5)) == 2
    with pytest.raises(ValueError):
        divide_by_pi_power(Z8.elem(6), 2)


def test_constructor_rejects_bad_parameters():
    with pytest.raises(ValueError):
        LocalPIR(4, 2)
    with pytest.raises(ValueError):
        LocalPIR(3, 0)


def _poly(R, x):
    coeffs = R._digits(x)
    return Poly(list(reversed(coeffs)), t, domain=GF(R.p))


@given(ring_and_elems())
def test_polynomial_products_agree_with_sympy(data):
    R, x, y = data
    if R.family is not Family.FPT:
        return
    expected = (_poly(R, x) * _poly(R, y)).rem(Poly(t**R.n, t, domain=GF(R.p)))
    assert _poly(R, R.mul(x, y)) == expected
    assert _poly(R, R.add(x, y)) == _poly(R, x) + _poly(R, y)


@given(ring_and_elems())
def test_valuation_of_products(data):
    R, x, y = data
    assert R.valuation(R.mul(x, y)) == min(R.n, R.valuation(x) + R.valuation(y))


@given(ring_and_elems(1))
def test_unit_part_decomposition(data):
    R, x = data
    if x == 0:
        return
    u = R.unit_part(x)
    assert R.is_unit(u)
    assert R.mul(R.pi_power(R.valuation(x)), u) == x


@given(ring_and_elems(1))
def test_inverse(data):
    R, u = data
    if R.is_unit(u):
        assert R.mul(u, R.inv(u)) == 1


@given(ring_and_elems(1), st.integers(0, 3))
def test_divide_undoes_multiply(data, j):
    # pi^j x only remembers x modulo pi^(n-j)
    R, x = data
    if j > R.n:
        return
    y = R.mul(R.pi_power(j), x)
    q = R.divide_pi(y, j)
    assert R.reduce(q, R.n - j) == R.reduce(x, R.n - j)
    if x < R.p ** (R.n - j):
        assert q == x


@given(st.integers(2, 500), st.integers(0, 10**6))
@settings(max_examples=60)
def test_crt_round_trip(N, x):
    x %= N
    comps = crt_decompose(N)
    prod = 1
    for R in comps:
        prod *= R.size
    assert prod == N
    # reconstruct from the residues by search over the Chinese remainder
    residues = [(x % R.size, R.size) for R in comps]
    y, m = 0, 1
    for r, q in residues:
        while y % q != r:
            y += m
        m *= q
    assert y == x


def test_factorize():
    assert factorize(360) == [(2, 3), (3, 2), (5, 1)]
    assert factorize(1) == []


def test_ring_elem_operators():
    R = LocalPIR(3, 2)
    a, b = R.elem(4), R.elem(7)
    assert (a + b).value == 2 and (a - b).value == 6 and (a * b).value == 1 and (-a).value == 5
    assert (a + 5).value == 0 and (2 * a).value == 8
    with pytest.raises(ValueError):
        a + LocalPIR(3, 1).elem(1)
    assert isinstance(a, RingElem)
