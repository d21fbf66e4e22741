"""Symmetric bilinear forms ``M x M -> R`` given by Gram matrices.

The value module ``N`` is identified with ``R`` once and for all.  For a
factor pair ``(a, b)`` the entry ``G_ab`` must have valuation at least
``n - min(r_a, r_b)`` so that the form is well defined on
``R/m^{r_a} x R/m^{r_b}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .modules import ModuleShape, Submodule, Subquotient, _coords, preimage
from .ring import LocalPIR, RingElem, crt_decompose


class DegenerateFormError(ValueError):
    """Raised by operations that are only defined for non-degenerate forms."""


@dataclass(frozen=True)
class GramForm:
    shape: ModuleShape
    gram: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        R = self.shape.ring
        k = self.shape.rank
        g = tuple(tuple(R.coerce(v) for v in row) for row in self.gram)
        if len(g) != k or any(len(row) != k for row in g):
            raise ValueError(f"Gram matrix must be {k}x{k}")
        fl = self.shape.factor_lengths
        for a in range(k):
            for b in range(k):
                if g[a][b] != g[b][a]:
                    raise ValueError(f"Gram matrix not symmetric at ({a}, {b})")
                need = R.n - min(fl[a], fl[b])
                if R.valuation(g[a][b]) < need:
                    raise ValueError(
                        f"entry ({a}, {b}) = {g[a][b]} needs valuation >= {need} "
                        f"on factors of length {fl[a]} and {fl[b]}")
        object.__setattr__(self, "gram", g)

    @classmethod
    def from_data(cls, ring: LocalPIR, lengths: Sequence[int], gram) -> "GramForm":
        """Build from factor lengths in any order; factors are sorted descending (stably)."""
        order = sorted(range(len(lengths)), key=lambda a: -lengths[a])
        shape = ModuleShape(ring, tuple(lengths[a] for a in order))
        g = [[ring.coerce(gram[a][b]) for b in order] for a in order]
        return cls(shape, tuple(map(tuple, g)))

    @property
    def ring(self) -> LocalPIR:
        return self.shape.ring

    def pair(self, x, y) -> int:
        R = self.ring
        x, y = _coords(x), _coords(y)
        G = self.gram
        if R.family.value == "Zp":
            s = 0
            for a, xa in enumerate(x):
                if xa:
                    row = G[a]
                    s += xa * sum(row[b] * yb for b, yb in enumerate(y) if yb)
            return s % R.size
        s = 0
        for a, xa in enumerate(x):
            if xa:
                for b, yb in enumerate(y):
                    if yb and G[a][b]:
                        s = R.add(s, R.mul(xa, R.mul(G[a][b], yb)))
        return s

    def scaled(self, u: int) -> "GramForm":
        """The form ``u <,>``."""
        R = self.ring
        return GramForm(self.shape, tuple(tuple(R.mul(u, v) for v in row) for row in self.gram))

    def __repr__(self):
        return f"GramForm({self.ring!r}, {self.shape.factor_lengths}, {[list(r) for r in self.gram]})"


def evaluate(F: GramForm, x, y) -> RingElem:
    return RingElem(F.ring, F.pair(x, y))


def orthogonal_sum(F1: GramForm, F2: GramForm) -> GramForm:
    if F1.ring != F2.ring:
        raise ValueError("forms over different rings")
    k1, k2 = F1.shape.rank, F2.shape.rank
    lengths = F1.shape.factor_lengths + F2.shape.factor_lengths
    g = [[0] * (k1 + k2) for _ in range(k1 + k2)]
    for a in range(k1):
        for b in range(k1):
            g[a][b] = F1.gram[a][b]
    for a in range(k2):
        for b in range(k2):
            g[k1 + a][k1 + b] = F2.gram[a][b]
    return GramForm.from_data(F1.ring, lengths, g)


def perp(F: GramForm, L: Submodule) -> Submodule:
    """``{x in M : <x, L> = 0}``."""
    sh = F.shape
    R = sh.ring
    gens = L.generators()
    if not gens:
        return sh.full()
    f = []
    for a in range(sh.rank):
        e = tuple(int(a == b) for b in range(sh.rank))
        f.append([F.pair(e, h) for h in gens])
    return preimage(sh, f, [], len(gens))


def kernel(F: GramForm) -> Submodule:
    return perp(F, F.shape.full())


def is_nondegenerate(F: GramForm) -> bool:
    return kernel(F).length == 0


def pairs_to_zero(F: GramForm, A: Submodule, B: Submodule) -> bool:
    return all(F.pair(a, b) == 0 for a in A.generators() for b in B.generators())


def induced_form(F: GramForm, A: Submodule, B: Submodule) -> tuple[GramForm, Subquotient]:
    """The form induced on ``A/B``; requires ``<A, B> = 0``."""
    if not pairs_to_zero(F, A, B):
        raise ValueError("the form does not vanish on A x B; no induced form on A/B")
    sq = Subquotient(A, B)
    lifts = sq.lifts
    g = tuple(tuple(F.pair(x, y) for y in lifts) for x in lifts)
    return GramForm(sq.shape, g), sq


def quotient_form(F: GramForm, L: Submodule) -> GramForm:
    """Induced form on ``L^perp / L`` for ``L`` inside ``L^perp``."""
    P = perp(F, L)
    if not L.issubset(P):
        raise ValueError("quotient_form needs L contained in its orthogonal complement")
    return induced_form(F, P, L)[0]


def restrict(F: GramForm, L: Submodule) -> GramForm:
    return induced_form(F, L, F.shape.zero())[0]


def orthogonal_split(F: GramForm) -> list[tuple[GramForm, list[tuple[int, ...]]]]:
    """Write ``M = M_1 _|_ ... _|_ M_n`` with ``M_i`` non-degenerate and free over ``R/m^i``.

    Returns ``(block form, embedding)`` for each ``i`` with ``M_i != 0``, in
    decreasing ``i``.  ``embedding`` lists the images in ``M`` of the block's
    basis vectors.
    """
    if not is_nondegenerate(F):
        raise DegenerateFormError("orthogonal_split needs a non-degenerate form")
    R = F.ring
    M = F.shape
    pieces: dict[int, list[tuple[int, ...]]] = {}
    W = M.full()
    while W.length:
        Fw, sq = induced_form(F, W, M.zero())
        lengths = Fw.shape.factor_lengths
        r = lengths[0]
        top = [a for a, ra in enumerate(lengths) if ra == r]

        def normalized(a, b):
            return R.valuation(Fw.gram[a][b]) - (R.n - r)

        x = min(top, key=lambda a: (normalized(a, a), a))
        if normalized(x, x) == 0:
            block = [x]
        else:
            y = next(b for b in top if normalized(x, b) == 0)
            block = [x, y]
        vecs = [sq.lifts[a] for a in block]
        pieces.setdefault(r, []).extend(vecs)
        N = Submodule.from_generators(M, vecs)
        W = W.intersect(perp(F, N))
    out = []
    for r in sorted(pieces, reverse=True):
        vecs = pieces[r]
        g = tuple(tuple(F.pair(x, y) for y in vecs) for x in vecs)
        out.append((GramForm(ModuleShape(R, (r,) * len(vecs)), g), vecs))
    return out


# --------------------------------------------------------------------------
# composite moduli

@dataclass(frozen=True)
class MultiForm:
    """One local form per prime of ``Spec(R)``."""

    components: tuple[tuple[LocalPIR, GramForm], ...]

    def __post_init__(self):
        rings = [r for r, _ in self.components]
        if len({(r.p, r.family) for r in rings}) != len(rings):
            raise ValueError("component rings must be pairwise distinct")


def as_multiform(F) -> MultiForm:
    if isinstance(F, MultiForm):
        return F
    if isinstance(F, CompositeForm):
        return F.localize()
    return MultiForm(((F.ring, F),))


@dataclass(frozen=True)
class CompositeForm:
    """A form on ``(+)_a Z/c_a`` with values in ``Z/N``; each ``c_a`` divides ``N``."""

    modulus: int
    orders: tuple[int, ...]
    gram: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        N = self.modulus
        if N < 2:
            raise ValueError("modulus must be >= 2")
        k = len(self.orders)
        g = tuple(tuple(int(v) % N for v in row) for row in self.gram)
        if len(g) != k or any(len(row) != k for row in g):
            raise ValueError(f"Gram matrix must be {k}x{k}")
        for c in self.orders:
            if c < 2 or N % c:
                raise ValueError(f"cyclic order {c} must be >= 2 and divide the modulus {N}")
        for a in range(k):
            for b in range(k):
                if g[a][b] != g[b][a]:
                    raise ValueError(f"Gram matrix not symmetric at ({a}, {b})")
                if (g[a][b] * self.orders[a]) % N:
                    raise ValueError(f"entry ({a}, {b}) is not annihilated by the order {self.orders[a]}")
        object.__setattr__(self, "orders", tuple(self.orders))
        object.__setattr__(self, "gram", g)

    def component_indices(self, p: int) -> list[int]:
        """Original factor indices of the ``p``-component, in its sorted factor order."""
        idx = [a for a, c in enumerate(self.orders) if c % p == 0]
        return sorted(idx, key=lambda a: -_pval(self.orders[a], p))

    def localize(self) -> MultiForm:
        comps = []
        for R in crt_decompose(self.modulus):
            idx = self.component_indices(R.p)
            lengths = [_pval(self.orders[a], R.p) for a in idx]
            g = [[self.gram[a][b] % R.size for b in idx] for a in idx]
            comps.append((R, GramForm.from_data(R, lengths, g)))
        return MultiForm(tuple(comps))

    def embed(self, p: int, x) -> tuple[int, ...]:
        """The element of the full module whose ``p``-part is ``x`` and other parts vanish."""
        out = [0] * len(self.orders)
        for a, c in zip(self.component_indices(p), _coords(x)):
            q = p ** _pval(self.orders[a], p)
            cofactor = self.orders[a] // q
            out[a] = c * cofactor * pow(cofactor, -1, q) % self.orders[a]
        return tuple(out)

    def project(self, p: int, x) -> tuple[int, ...]:
        return tuple(x[a] % p ** _pval(self.orders[a], p) for a in self.component_indices(p))


def _pval(c: int, p: int) -> int:
    v = 0
    while c % p == 0:
        c //= p
        v += 1
    return v


def localize(F: CompositeForm) -> MultiForm:
    return F.localize()
