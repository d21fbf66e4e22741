import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from _brute import all_elements, perp_set
from pirforms.forms import (CompositeForm, DegenerateFormError, GramForm, MultiForm, evaluate, induced_form,
                            is_nondegenerate, kernel, localize, orthogonal_split, orthogonal_sum, perp, quotient_form,
                            restrict)
from pirforms.modules import ModuleShape, Submodule, enumerate_submodules
from pirforms.ring import Family, LocalPIR

Z4 = LocalPIR(2, 2)
Z4_EXAMPLE = GramForm(ModuleShape(Z4, (2, 2)), ((2, 1), (1, 2)))


def sub(F, *gens):
    return Submodule.from_generators(F.shape, gens)


def random_form(rng, R, lengths):
    k = len(lengths)
    g = [[0] * k for _ in range(k)]
    for a in range(k):
        for b in range(a, k):
            m = min(lengths[a], lengths[b])
            g[a][b] = g[b][a] = rng.randrange(R.p**m) * R.p ** (R.n - m)
    return GramForm(ModuleShape(R, tuple(lengths)), tuple(map(tuple, g)))


def test_evaluate_examples():
    assert evaluate(Z4_EXAMPLE, (1, 0), (1, 0)).value == 2
    assert evaluate(Z4_EXAMPLE, (1, 1), (1, 1)).value == 2
    assert all(Z4_EXAMPLE.pair((2, 0), y) == 0 for y in sub(Z4_EXAMPLE, (2, 0), (0, 2)).elements())


def test_validation():
    with pytest.raises(ValueError):
        GramForm(ModuleShape(Z4, (2, 1)), ((1, 1), (1, 2)))  # entry (0,1) needs valuation 1
    with pytest.raises(ValueError):
        GramForm(ModuleShape(Z4, (2, 2)), ((1, 0), (1, 1)))


def test_kernel_examples():
    assert kernel(Z4_EXAMPLE).length == 0 and is_nondegenerate(Z4_EXAMPLE)
    D = GramForm(ModuleShape(Z4, (2, 2)), ((2, 0), (0, 2)))
    assert D.shape.scaled(1).issubset(kernel(D)) and not is_nondegenerate(D)
    assert is_nondegenerate(GramForm(ModuleShape(Z4, ()), ()))


def test_perp_examples():
    assert perp(Z4_EXAMPLE, sub(Z4_EXAMPLE, (1, 0))) == sub(Z4_EXAMPLE, (1, 2))
    assert perp(Z4_EXAMPLE, sub(Z4_EXAMPLE, (1, 0))).length == 2
    assert perp(Z4_EXAMPLE, Z4_EXAMPLE.shape.zero()) == Z4_EXAMPLE.shape.full()
    two = Z4_EXAMPLE.shape.scaled(1)
    assert perp(Z4_EXAMPLE, two) == two


def test_quotient_form_examples():
    two = Z4_EXAMPLE.shape.scaled(1)
    assert quotient_form(Z4_EXAMPLE, two).shape.length == 0
    L = sub(Z4_EXAMPLE, (2, 0))
    Q = quotient_form(Z4_EXAMPLE, L)
    assert Q.shape.factor_lengths == (1, 1)
    # pairings of the classes of (1,0) and (0,2); <(0,2),(0,2)> = 8 = 0 in Z/4
    lifts = [(1, 0), (0, 2)]
    assert [[Z4_EXAMPLE.pair(x, y) for y in lifts] for x in lifts] == [[2, 2], [2, 0]]
    assert is_nondegenerate(Q)
    assert quotient_form(Z4_EXAMPLE, Z4_EXAMPLE.shape.zero()).gram == Z4_EXAMPLE.gram
    with pytest.raises(ValueError):
        quotient_form(Z4_EXAMPLE, sub(Z4_EXAMPLE, (1, 0)))


def test_quotient_form_ignores_lift_choice():
    rng = random.Random(3)
    for L in enumerate_submodules(Z4_EXAMPLE.shape):
        if not L.issubset(perp(Z4_EXAMPLE, L)):
            continue
        Q, sq = induced_form(Z4_EXAMPLE, perp(Z4_EXAMPLE, L), L)
        Lel = list(L.elements())
        moved = [tuple((a + b) % 4 for a, b in zip(x, rng.choice(Lel))) for x in sq.lifts]
        assert [[Z4_EXAMPLE.pair(x, y) for y in moved] for x in moved] == [list(r) for r in Q.gram]


def test_restrict_examples():
    assert restrict(Z4_EXAMPLE, Z4_EXAMPLE.shape.full()).gram == Z4_EXAMPLE.gram
    r = restrict(Z4_EXAMPLE, sub(Z4_EXAMPLE, (1, 2)))
    assert r.shape.factor_lengths == (2,) and r.gram == ((2,),)
    assert restrict(Z4_EXAMPLE, Z4_EXAMPLE.shape.zero()).shape.rank == 0


def test_orthogonal_split_examples():
    blocks = orthogonal_split(Z4_EXAMPLE)
    assert len(blocks) == 1 and blocks[0][0].shape.factor_lengths == (2, 2)
    F = GramForm.from_data(Z4, [1, 2], [[2, 2], [2, 1]])
    blocks = orthogonal_split(F)
    assert [(b.shape.factor_lengths, b.gram) for b, _ in blocks] == [((2,), ((1,),)), ((1,), ((2,),))]
    Z27 = LocalPIR(3, 3)
    diag = GramForm(ModuleShape(Z27, (3, 2, 2, 1)), ((2, 0, 0, 0), (0, 3, 0, 0), (0, 0, 6, 0), (0, 0, 0, 9)))
    assert [b.shape.factor_lengths for b, _ in orthogonal_split(diag)] == [(3,), (2, 2), (1,)]
    with pytest.raises(DegenerateFormError):
        orthogonal_split(GramForm(ModuleShape(Z4, (2, 2)), ((2, 0), (0, 2))))


@pytest.mark.parametrize("R,lengths", [(LocalPIR(2, 3), (3, 2, 1)), (LocalPIR(3, 2), (2, 1, 1)),
                                       (LocalPIR(2, 2, Family.FPT), (2, 1, 1)), (LocalPIR(2, 2), (2, 2, 1))])
def test_orthogonal_split_reassembles(R, lengths):
    rng = random.Random(7)
    done = 0
    while done < 25:
        F = random_form(rng, R, lengths)
        if not is_nondegenerate(F):
            continue
        done += 1
        vecs, sizes = [], []
        for block, emb in orthogonal_split(F):
            assert is_nondegenerate(block)
            assert len(set(block.shape.factor_lengths)) == 1
            vecs += emb
            sizes += list(block.shape.factor_lengths)
            assert [[F.pair(x, y) for y in emb] for x in emb] == [list(r) for r in block.gram]
        # blocks are mutually orthogonal and together generate M
        assert sorted(sizes, reverse=True) == list(F.shape.factor_lengths)
        assert Submodule.from_generators(F.shape, vecs) == F.shape.full()
        blocks = orthogonal_split(F)
        for (b1, e1), (b2, e2) in itertools.combinations(blocks, 2):
            assert all(F.pair(x, y) == 0 for x in e1 for y in e2)


SHAPES = [(LocalPIR(2, 2), (2, 2)), (LocalPIR(2, 3), (3, 1)), (LocalPIR(3, 2), (2, 1)),
          (LocalPIR(2, 2, Family.FPT), (2, 1)), (LocalPIR(3, 2, Family.FPT), (2, 2)), (LocalPIR(2, 1), (1, 1, 1))]


@pytest.mark.parametrize("R,lengths", SHAPES, ids=str)
def test_perp_against_brute_force_and_ar1(R, lengths):
    rng = random.Random(11)
    subs = enumerate_submodules(ModuleShape(R, lengths))
    for _ in range(6):
        F = random_form(rng, R, lengths)
        nd = is_nondegenerate(F)
        assert nd == (len(perp_set(F, all_elements(F.shape))) == 1)
        for L in subs:
            P = perp(F, L)
            assert frozenset(P.elements()) == perp_set(F, list(L.elements()))
            if nd:
                assert L.length + P.length == F.shape.length
                assert perp(F, P) == L


def test_localize_examples():
    parts = localize(CompositeForm(12, (12,), ((1,),))).components
    assert [(R.p, R.n, G.gram) for R, G in parts] == [(2, 2, ((1,),)), (3, 1, ((1,),))]
    parts = localize(CompositeForm(6, (6,), ((5,),))).components
    assert [(R.p, G.gram) for R, G in parts] == [(2, ((1,),)), (3, ((2,),))]


def _random_composite(rng):
    N = rng.randrange(2, 61)
    divisors = [d for d in range(2, N + 1) if N % d == 0]
    orders = tuple(rng.choice(divisors) for _ in range(rng.randrange(1, 3)))
    k = len(orders)
    g = [[0] * k for _ in range(k)]
    from math import gcd
    for a in range(k):
        for b in range(a, k):
            step = N // gcd(orders[a], orders[b])
            g[a][b] = g[b][a] = rng.randrange(N // step) * step
    return CompositeForm(N, orders, tuple(map(tuple, g)))


def test_composite_nondegeneracy_is_componentwise():
    rng = random.Random(5)
    for _ in range(100):
        C = _random_composite(rng)
        k = len(C.orders)
        els = list(itertools.product(*(range(c) for c in C.orders)))
        basis = [tuple(int(a == b) for b in range(k)) for a in range(k)]
        ker = [x for x in els if all(sum(x[a] * C.gram[a][b] * e[b] for a in range(k) for b in range(k)) % C.modulus == 0
                                     for e in basis)]
        comps = C.localize().components
        assert (len(ker) == 1) == all(is_nondegenerate(G) for _, G in comps)
        size = 1
        for _, G in comps:
            size *= kernel(G).order
        assert size == len(ker)


def test_composite_validation_and_embedding():
    with pytest.raises(ValueError):
        CompositeForm(12, (4,), ((1,),))  # 4 * 1 is not 0 mod 12
    with pytest.raises(ValueError):
        CompositeForm(12, (5,), ((0,),))
    C = CompositeForm(12, (4, 4, 3), ((6, 3, 0), (3, 6, 0), (0, 0, 4)))
    assert C.embed(2, (1, 0)) == (1, 0, 0) and C.embed(3, (1,)) == (0, 0, 1)
    C = CompositeForm(12, (12,), ((1,),))
    x = C.embed(2, (1,))
    assert x[0] % 4 == 1 and x[0] % 3 == 0
    assert C.project(2, x) == (1,) and C.project(3, x) == (0,)


def test_orthogonal_sum_and_multiform():
    S = orthogonal_sum(GramForm(ModuleShape(Z4, (1,)), ((2,),)), Z4_EXAMPLE)
    assert S.shape.factor_lengths == (2, 2, 1)
    assert S.gram[2][2] == 2 and S.gram[0][2] == 0
    with pytest.raises(ValueError):
        MultiForm(((Z4, Z4_EXAMPLE), (Z4, Z4_EXAMPLE)))


@given(st.data())
@settings(max_examples=40)
def test_scaling_preserves_perp(data):
    R, lengths = data.draw(st.sampled_from(SHAPES))
    F = random_form(random.Random(data.draw(st.integers(0, 10**6))), R, lengths)
    u = data.draw(st.sampled_from(R.units()))
    L = data.draw(st.sampled_from(enumerate_submodules(F.shape)))
    assert perp(F.scaled(u), L) == perp(F, L)
