"""Roots, filtrations and the graded residue-field forms of a form.

Everything here is computed from submodule arithmetic, never from the
decomposition of the input.  The lattice helpers take a pair ``(A, B)`` of
submodules with ``B <= A`` and work on the subquotient ``A/B``; results are
returned as preimages in ``A``.  Passing ``(M, 0)`` gives the plain module.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .forms import GramForm, induced_form
from .modules import ModuleShape, Submodule, Subquotient


# --------------------------------------------------------------------------
# forms over F_p

@dataclass(frozen=True)
class FFForm:
    """Symmetric bilinear form on ``F_p^dim``."""

    p: int
    gram: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        g = tuple(tuple(int(v) % self.p for v in row) for row in self.gram)
        if any(len(row) != len(g) for row in g):
            raise ValueError("Gram matrix must be square")
        for a in range(len(g)):
            for b in range(a):
                if g[a][b] != g[b][a]:
                    raise ValueError("Gram matrix not symmetric")
        object.__setattr__(self, "gram", g)

    @property
    def dim(self) -> int:
        return len(self.gram)

    def value(self, x, y) -> int:
        return sum(x[a] * self.gram[a][b] * y[b] for a in range(self.dim) for b in range(self.dim)) % self.p

    def rank(self) -> int:
        return _rank_mod_p([list(r) for r in self.gram], self.p)

    def is_nondegenerate(self) -> bool:
        return self.rank() == self.dim

    def det(self) -> int:
        return _det_mod_p([list(r) for r in self.gram], self.p)

    def invariants(self) -> tuple:
        """A complete isometry invariant.

        Odd ``p``: dimension, rank and the square class of the discriminant of
        the non-degenerate part.  ``p = 2``: dimension, rank and whether the
        form is alternating.
        """
        if self.p == 2:
            alt = all(self.gram[a][a] == 0 for a in range(self.dim))
            return (self.dim, self.rank(), alt)
        diag = _diagonalize(self.gram, self.p)
        prod = 1
        for d in diag:
            if d:
                prod = prod * d % self.p
        return (self.dim, self.rank(), _legendre(prod, self.p))

    def isometric(self, other: "FFForm") -> bool:
        return self.p == other.p and self.invariants() == other.invariants()

    def scaled(self, u: int) -> "FFForm":
        return FFForm(self.p, tuple(tuple(u * v for v in row) for row in self.gram))


def block_sum(p: int, forms: Sequence[FFForm]) -> FFForm:
    dim = sum(f.dim for f in forms)
    g = [[0] * dim for _ in range(dim)]
    off = 0
    for f in forms:
        for a in range(f.dim):
            for b in range(f.dim):
                g[off + a][off + b] = f.gram[a][b]
        off += f.dim
    return FFForm(p, tuple(map(tuple, g)))


def _rank_mod_p(m: list[list[int]], p: int) -> int:
    rows = [r[:] for r in m]
    rank, ncols = 0, len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c] % p), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][c], -1, p)
        rows[rank] = [v * inv % p for v in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][c] % p:
                f = rows[i][c]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def _det_mod_p(m: list[list[int]], p: int) -> int:
    n = len(m)
    a = [r[:] for r in m]
    det = 1
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] % p), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det = det * a[c][c] % p
        inv = pow(a[c][c], -1, p)
        for i in range(c + 1, n):
            f = a[i][c] * inv % p
            a[i] = [(x - f * y) % p for x, y in zip(a[i], a[c])]
    return det % p


def _legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def _diagonalize(gram, p: int) -> list[int]:
    """Diagonal entries of a congruent diagonal form (odd ``p``)."""
    g = [list(r) for r in gram]
    n = len(g)
    out = []
    active = list(range(n))
    while active:
        a = next((i for i in active if g[i][i] % p), None)
        if a is None:
            pair = next(((i, j) for i in active for j in active if i < j and g[i][j] % p), None)
            if pair is None:
                out.extend(0 for _ in active)
                break
            i, j = pair
            # e_i += e_j makes the diagonal entry 2 g_ij != 0
            for t in range(n):
                g[i][t] = (g[i][t] + g[j][t]) % p
            for t in range(n):
                g[t][i] = (g[t][i] + g[t][j]) % p
            a = i
        d = g[a][a] % p
        inv = pow(d, -1, p)
        for b in active:
            if b != a and g[a][b] % p:
                f = g[a][b] * inv % p
                for t in range(n):
                    g[b][t] = (g[b][t] - f * g[a][t]) % p
                for t in range(n):
                    g[t][b] = (g[t][b] - f * g[t][a]) % p
        out.append(d)
        active.remove(a)
    return out


# --------------------------------------------------------------------------
# lattice operations on subquotients

def _as_pair(X) -> tuple[Submodule, Submodule]:
    if isinstance(X, ModuleShape):
        return X.full(), X.zero()
    if isinstance(X, Submodule):
        return X, X.shape.zero()
    if isinstance(X, Subquotient):
        return X.A, X.B
    A, B = X
    return A, B


def _torsion_rel(A: Submodule, B: Submodule, e: int) -> Submodule:
    """Preimage in ``A`` of ``(A/B)[m^e]``; for ``e <= 0`` this is ``B``."""
    if e <= 0:
        return B
    if e >= A.shape.ring.n:
        return A
    return A.intersect(B.preimage_scalar(e))


def _scaled_rel(A: Submodule, B: Submodule, i: int) -> Submodule:
    """Preimage in ``A`` of ``m^i (A/B)``."""
    if i == 0:
        return A
    return A.scale(i).sum(B)


def lower_root(X) -> Submodule:
    """``lr = sum_i (m^i M  cap  M[m^i])``."""
    return lr_s(X, 1)


def upper_root(X) -> Submodule:
    """``ur = cap_i (m^i M + M[m^i])``."""
    A, B = _as_pair(X)
    n = A.shape.ring.n
    out = A
    for i in range(n + 1):
        out = out.intersect(_scaled_rel(A, B, i).sum(_torsion_rel(A, B, i)))
    return out


def lr_s(X, s: int) -> Submodule:
    """``lr_s = sum_{i >= 0} m^i M  cap  M[m^{i-s+1}]`` with ``M[m^e] = 0`` for ``e <= 0``."""
    A, B = _as_pair(X)
    n = A.shape.ring.n
    out = B
    for i in range(n + 1):
        out = out.sum(_scaled_rel(A, B, i).intersect(_torsion_rel(A, B, i - s + 1)))
    return out


def socle(X) -> Submodule:
    A, B = _as_pair(X)
    return _torsion_rel(A, B, 1)


# --------------------------------------------------------------------------
# socle quotient, shaving, graded pieces

def quotient_by_socle(F: GramForm) -> GramForm:
    """The form ``M/M[m] x M/M[m] -> R/m^{n-1}``, on the basis of images of the ``e_a``."""
    R = F.ring
    if R.n < 2:
        raise ValueError("quotient by the socle needs ring length >= 2")
    R1 = R.with_length(R.n - 1)
    keep = [a for a, r in enumerate(F.shape.factor_lengths) if r >= 2]
    shape = ModuleShape(R1, tuple(F.shape.factor_lengths[a] - 1 for a in keep))
    g = tuple(tuple(R.reduce(F.gram[a][b], R.n - 1) for b in keep) for a in keep)
    return GramForm(shape, g)


def _exponent(F: GramForm) -> int:
    return F.shape.exponent


def shave(F: GramForm, with_basis: bool = False):
    """Induced form on ``Sh(M) = M[m^{r-1}] / m^{r-1} M`` where ``m^r = Ann(M)``."""
    r = _exponent(F)
    if r < 2:
        raise ValueError(f"shaving needs exponent >= 2, got {r}")
    M = F.shape
    form, sq = induced_form(F, M.torsion(r - 1), M.scaled(r - 1))
    return (form, sq) if with_basis else form


@dataclass(frozen=True)
class RhoData:
    index: int
    form: FFForm
    lifts: tuple[tuple[int, ...], ...] = field(default=())

    @property
    def dim(self) -> int:
        return self.form.dim


def _ff_gram(F: GramForm, lifts) -> FFForm:
    R = F.ring
    g = []
    for x in lifts:
        row = []
        for y in lifts:
            v = F.pair(x, y)
            if R.valuation(v) < R.n - 1:
                raise ArithmeticError("graded pairing does not land in N[m]")
            row.append(R.divide_pi(v, R.n - 1) % R.p)
        g.append(tuple(row))
    return FFForm(R.p, tuple(g))


def _rho_odd(F: GramForm, i: int) -> RhoData:
    M = F.shape
    k = i // 2
    A = M.torsion(i).scale(k)
    B = M.torsion(i - 1).scale(k).sum(M.torsion(i + 1).scale(k + 1))
    sq = Subquotient(A, B)
    if any(r != 1 for r in sq.shape.factor_lengths):
        raise ArithmeticError("graded piece is not killed by m")
    return RhoData(i, _ff_gram(F, sq.lifts), tuple(sq.lifts))


def rho(F: GramForm, i: int) -> RhoData:
    """The residue-field piece detecting cyclic factors of length exactly ``i``."""
    if i < 1:
        raise ValueError("rho index starts at 1")
    R = F.ring
    if i > _exponent(F):
        return RhoData(i, FFForm(R.p), ())
    if i % 2:
        return _rho_odd(F, i)
    Fq = quotient_by_socle(F)
    inner = _rho_odd(Fq, i - 1)
    pad = F.shape.rank - Fq.shape.rank
    lifts = tuple(tuple(x) + (0,) * pad for x in inner.lifts)
    return RhoData(i, inner.form, lifts)


def graded_sum(F: GramForm, indices) -> tuple[FFForm, list[tuple[int, ...]]]:
    """Orthogonal sum of the ``rho_i`` for ``i`` in ``indices``, with the concatenated lifts."""
    pieces = [rho(F, i) for i in indices]
    lifts = [x for piece in pieces for x in piece.lifts]
    return block_sum(F.ring.p, [piece.form for piece in pieces]), lifts


def _assemble(F: GramForm, indices) -> FFForm:
    return graded_sum(F, indices)[0]


def odd_indices(F: GramForm, d: int = 1) -> list[int]:
    return [i for i in range(max(d, 1), _exponent(F) + 1) if i % 2 == 1]


def even_indices(F: GramForm, d: int = 1) -> list[int]:
    if F.ring.n < 2:
        return []
    return [i for i in range(max(d, 2), _exponent(F) + 1) if i % 2 == 0]


def odd_form(F: GramForm) -> FFForm:
    return _assemble(F, odd_indices(F))


def even_form(F: GramForm) -> FFForm:
    # ring length 1 has no even part: the zero-dimensional form
    return _assemble(F, even_indices(F))


def tail_forms(F: GramForm, d: int) -> tuple[FFForm, FFForm]:
    """``(even tail, odd tail)``: block sums of ``rho_i`` over ``i >= d`` of each parity."""
    return _assemble(F, even_indices(F, d)), _assemble(F, odd_indices(F, d))


def odd_form_direct(F: GramForm) -> tuple[FFForm, Subquotient]:
    """The form on ``ur(M)/lr(M)`` built straight from the roots."""
    M = F.shape
    form, sq = induced_form(F, upper_root(M), lower_root(M))
    return _ff_gram(F, sq.lifts), sq
