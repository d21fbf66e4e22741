"""Finite modules over a local PIR, their submodules and normal forms.

A module is ``M = (+)_a R/m^{r_a} e_a`` with ``r_1 >= r_2 >= ...``.  Vectors
are tuples of canonical ring integers, coordinate ``a`` reduced mod
``pi^{r_a}``.  A submodule ``L`` is stored as the echelon (Howell) form of
``L + K`` inside ``R^k``, where ``K`` is spanned by the relations
``pi^{r_a} e_a``.  Pivots are powers of ``pi``, entries above a pivot are
reduced modulo it, and the span of the rows from column ``j`` on contains
every element of ``L + K`` vanishing before ``j``.  That form is unique, so
submodule equality is tuple equality.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .ring import LocalPIR

DEFAULT_BUDGET = 2**12


class BudgetExceeded(RuntimeError):
    """An exhaustive enumeration would exceed the configured element budget."""

    def __init__(self, needed: int, budget: int, what: str = "elements"):
        super().__init__(f"enumeration needs {needed} {what}, budget is {budget}")
        self.needed = needed
        self.budget = budget


def default_budget() -> int:
    return int(os.environ.get("ANISO_BUDGET", DEFAULT_BUDGET))


# --------------------------------------------------------------------------
# raw echelon machinery over a LocalPIR

def _scale(R: LocalPIR, c: int, row: Sequence[int]) -> list[int]:
    return [R.mul(c, x) for x in row]


def _axpy(R: LocalPIR, row: list[int], c: int, other: Sequence[int], start: int = 0) -> None:
    """``row -= c * other`` in place, from column ``start`` on."""
    if c == 0:
        return
    for t in range(start, len(row)):
        if other[t]:
            row[t] = R.sub(row[t], R.mul(c, other[t]))


def howell(R: LocalPIR, rows: Iterable[Sequence[int]], width: int) -> list[tuple[int, ...] | None]:
    """Unique echelon form of the row span; entry ``j`` is the pivot row of column ``j`` or None."""
    work = [list(r) for r in rows if any(r)]
    H: list[list[int] | None] = [None] * width
    for j in range(width):
        best, best_v = -1, R.n
        for idx, r in enumerate(work):
            v = R.valuation(r[j])
            if v < best_v:
                best, best_v = idx, v
                if v == 0:
                    break
        if best < 0:
            continue
        piv = work.pop(best)
        u = R.inv(R.unit_part(piv[j]))
        if u != 1:
            piv = _scale(R, u, piv)
        rest = []
        for r in work:
            if r[j]:
                _axpy(R, r, R.divide_pi(r[j], best_v), piv, j)
            if any(r):
                rest.append(r)
        # the annihilator multiple of the pivot row vanishes at j but maybe not later
        if best_v > 0:
            extra = _scale(R, R.pi_power(R.n - best_v), piv)
            if any(extra):
                rest.append(extra)
        work = rest
        H[j] = piv
    for j in range(width):
        if H[j] is None:
            continue
        vj = R.valuation(H[j][j])
        for i in range(j):
            if H[i] is not None and H[i][j]:
                q, _ = R.divmod_pi(H[i][j], vj)
                _axpy(R, H[i], q, H[j], j)
    return [tuple(r) if r is not None else None for r in H]


def _reduce(R: LocalPIR, H, x: Sequence[int], stop: int) -> list[int] | None:
    """Reduce ``x`` by the pivot rows of columns ``< stop``; None if ``x`` leaves the span there."""
    x = list(x)
    for j in range(stop):
        if x[j] == 0:
            continue
        if H[j] is None:
            return None
        vj = R.valuation(H[j][j])
        if R.valuation(x[j]) < vj:
            return None
        _axpy(R, x, R.divide_pi(x[j], vj), H[j], j)
    return x


def _tail_span(H, split: int) -> list[tuple[int, ...]]:
    """Rows spanning the elements whose first ``split`` entries vanish, cut to the tail."""
    return [r[split:] for r in H[split:] if r is not None]


def snf_local(R: LocalPIR, A: Sequence[Sequence[int]], ncols: int | None = None):
    """Smith form over a local PIR: returns ``(U, D, V, Vinv)`` with ``U A V = D``.

    Diagonal entries are powers of ``pi`` with nondecreasing exponent.
    """
    m = len(A)
    k = ncols if ncols is not None else (len(A[0]) if A else 0)
    D = [list(r) for r in A]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(k)] for i in range(k)]
    Vinv = [[int(i == j) for j in range(k)] for i in range(k)]
    for t in range(min(m, k)):
        best, best_v = None, R.n
        for i in range(t, m):
            for j in range(t, k):
                v = R.valuation(D[i][j])
                if v < best_v:
                    best, best_v = (i, j), v
        if best is None:
            break
        i, j = best
        if i != t:
            D[i], D[t] = D[t], D[i]
            U[i], U[t] = U[t], U[i]
        if j != t:
            for r in D:
                r[j], r[t] = r[t], r[j]
            for r in V:
                r[j], r[t] = r[t], r[j]
            Vinv[j], Vinv[t] = Vinv[t], Vinv[j]
        u = R.inv(R.unit_part(D[t][t]))
        D[t] = _scale(R, u, D[t])
        U[t] = _scale(R, u, U[t])
        for i in range(m):
            if i != t and D[i][t]:
                c = R.divide_pi(D[i][t], best_v)
                _axpy(R, D[i], c, D[t])
                _axpy(R, U[i], c, U[t])
        for j in range(t + 1, k):
            if D[t][j]:
                c = R.divide_pi(D[t][j], best_v)
                # column op col_j -= c col_t; only row t is nonzero in col t
                D[t][j] = R.sub(D[t][j], R.mul(c, D[t][t]))
                for r in V:
                    r[j] = R.sub(r[j], R.mul(c, r[t]))
                # inverse op: row_t of Vinv += c row_j
                Vinv[t] = [R.add(a, R.mul(c, b)) for a, b in zip(Vinv[t], Vinv[j])]
    return U, D, V, Vinv


def snf_int(A: Sequence[Sequence[int]]):
    """Smith normal form over ``Z``: ``(U, D, V)`` with ``U A V = D``, ``d_1 | d_2 | ...``, ``d_i >= 0``."""
    m = len(A)
    k = len(A[0]) if A else 0
    D = [list(map(int, r)) for r in A]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(k)] for i in range(k)]

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M_ in (D, V):
            for r in M_:
                r[i], r[j] = r[j], r[i]

    def row_op(i, j, q):  # row_i -= q row_j
        D[i] = [a - q * b for a, b in zip(D[i], D[j])]
        U[i] = [a - q * b for a, b in zip(U[i], U[j])]

    def col_op(i, j, q):  # col_i -= q col_j
        for M_ in (D, V):
            for r in M_:
                r[i] -= q * r[j]

    for t in range(min(m, k)):
        nz = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, k) if D[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            changed = False
            for i in range(t + 1, m):
                if D[i][t]:
                    row_op(i, t, D[i][t] // D[t][t])
                    if D[i][t]:
                        swap_rows(t, i)
                        changed = True
            for j in range(t + 1, k):
                if D[t][j]:
                    col_op(j, t, D[t][j] // D[t][t])
                    if D[t][j]:
                        swap_cols(t, j)
                        changed = True
            if changed:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, k) if D[i][j] % D[t][t]), None)
            if bad is None:
                break
            D[t] = [a + b for a, b in zip(D[t], D[bad[0]])]
            U[t] = [a + b for a, b in zip(U[t], U[bad[0]])]
        if D[t][t] < 0:
            D[t] = [-a for a in D[t]]
            U[t] = [-a for a in U[t]]
    return U, D, V


def snf(A: Sequence[Sequence[int]], ring: LocalPIR | None = None):
    """Smith normal form ``(U, D, V)`` with ``U A V = D``; over ``Z`` unless ``ring`` is given."""
    if ring is None:
        return snf_int(A)
    U, D, V, _ = snf_local(ring, A)
    return U, D, V


# --------------------------------------------------------------------------
# modules, elements, submodules

@dataclass(frozen=True)
class ModuleShape:
    """``(+)_a R/m^{r_a}`` with ``factor_lengths`` sorted descending."""

    ring: LocalPIR
    factor_lengths: tuple[int, ...]

    def __post_init__(self):
        fl = tuple(int(r) for r in self.factor_lengths)
        if any(not 1 <= r <= self.ring.n for r in fl):
            raise ValueError(f"factor lengths {fl} must lie in 1..{self.ring.n}")
        if list(fl) != sorted(fl, reverse=True):
            raise ValueError(f"factor lengths {fl} must be sorted descending")
        object.__setattr__(self, "factor_lengths", fl)

    @property
    def rank(self) -> int:
        return len(self.factor_lengths)

    @property
    def length(self) -> int:
        return sum(self.factor_lengths)

    @property
    def exponent(self) -> int:
        return max(self.factor_lengths, default=0)

    @property
    def order(self) -> int:
        return self.ring.p**self.length

    def is_semisimple(self) -> bool:
        return all(r == 1 for r in self.factor_lengths)

    def reduce(self, x: Sequence[int]) -> tuple[int, ...]:
        R = self.ring
        return tuple(R.reduce(R.coerce(c), r) for c, r in zip(x, self.factor_lengths))

    def element(self, coords) -> "ModuleElem":
        coords = tuple(coords)
        if len(coords) != self.rank:
            raise ValueError(f"expected {self.rank} coordinates, got {len(coords)}")
        return ModuleElem(self, self.reduce(coords))

    @cached_property
    def relations(self) -> tuple[tuple[int, ...], ...]:
        R, k = self.ring, self.rank
        rows = []
        for a, r in enumerate(self.factor_lengths):
            if r < R.n:
                rows.append(tuple(R.pi_power(r) if b == a else 0 for b in range(k)))
        return tuple(rows)

    def basis(self) -> list[tuple[int, ...]]:
        return [tuple(int(a == b) for b in range(self.rank)) for a in range(self.rank)]

    def elements(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*(range(self.ring.p**r) for r in self.factor_lengths))

    def zero(self) -> "Submodule":
        return Submodule.from_generators(self, [])

    def full(self) -> "Submodule":
        return Submodule.from_generators(self, self.basis())

    def torsion(self, i: int) -> "Submodule":
        """``M[m^i]``."""
        R = self.ring
        gens = []
        for a, r in enumerate(self.factor_lengths):
            g = [0] * self.rank
            g[a] = R.pi_power(max(r - i, 0))
            gens.append(g)
        return Submodule.from_generators(self, gens)

    def scaled(self, i: int) -> "Submodule":
        """``m^i M``."""
        return self.full().scale(i)


@dataclass(frozen=True)
class ModuleElem:
    shape: ModuleShape
    coords: tuple[int, ...]


def _coords(x) -> tuple[int, ...]:
    return x.coords if isinstance(x, ModuleElem) else tuple(x)


@dataclass(frozen=True, eq=False)
class Submodule:
    shape: ModuleShape
    rows: tuple[tuple[int, ...] | None, ...]
    length: int = field(compare=False)

    def __eq__(self, other):
        return isinstance(other, Submodule) and self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash((self.shape, self.rows))

    def __repr__(self):
        return f"Submodule(length={self.length}, gens={self.generators()})"

    @classmethod
    def from_generators(cls, shape: ModuleShape, gens: Iterable) -> "Submodule":
        R = shape.ring
        rows = [tuple(R.coerce(c) for c in _coords(g)) for g in gens]
        for r in rows:
            if len(r) != shape.rank:
                raise ValueError("generator does not belong to the module")
        H = howell(R, rows + list(shape.relations), shape.rank)
        return cls._from_howell(shape, H)

    @classmethod
    def _from_howell(cls, shape, H) -> "Submodule":
        R = shape.ring
        length = 0
        for j, r in enumerate(shape.factor_lengths):
            v = R.valuation(H[j][j]) if H[j] is not None else R.n
            length += max(r - v, 0)
        return cls(shape, tuple(H), length)

    def _check(self, other: "Submodule") -> None:
        if other.shape != self.shape:
            raise ValueError("submodules of different ambient modules")

    @cached_property
    def pivots(self) -> tuple[int, ...]:
        R = self.shape.ring
        return tuple(R.valuation(h[j]) if h is not None else R.n for j, h in enumerate(self.rows))

    def generators(self) -> list[tuple[int, ...]]:
        """Nonzero rows of the canonical form, reduced into ``M``."""
        out = []
        for r in self.rows:
            if r is None:
                continue
            g = self.shape.reduce(r)
            if any(g):
                out.append(g)
        return out

    def contains(self, x) -> bool:
        x = _coords(x)
        rem = _reduce(self.shape.ring, self.rows, x, self.shape.rank)
        return rem is not None

    def __contains__(self, x) -> bool:
        return self.contains(x)

    def issubset(self, other: "Submodule") -> bool:
        self._check(other)
        return all(other.contains(g) for g in self.generators())

    def __le__(self, other):
        return self.issubset(other)

    def __add__(self, other: "Submodule") -> "Submodule":
        return self.sum(other)

    def sum(self, other: "Submodule") -> "Submodule":
        self._check(other)
        rows = [r for r in self.rows + other.rows if r is not None]
        return Submodule._from_howell(self.shape, howell(self.shape.ring, rows, self.shape.rank))

    def intersect(self, other: "Submodule") -> "Submodule":
        self._check(other)
        R, k = self.shape.ring, self.shape.rank
        z = (0,) * k
        rows = [r + r for r in self.rows if r is not None]
        rows += [r + z for r in other.rows if r is not None]
        H = howell(R, rows, 2 * k)
        return Submodule.from_generators(self.shape, _tail_span(H, k))

    __and__ = intersect

    def scale(self, i: int) -> "Submodule":
        """``m^i L``."""
        R = self.shape.ring
        c = R.pi_power(i)
        return Submodule.from_generators(self.shape, [_scale(R, c, g) for g in self.generators()])

    def torsion(self, i: int) -> "Submodule":
        """``L[m^i]``."""
        return self.intersect(self.shape.torsion(i))

    def preimage_scalar(self, i: int) -> "Submodule":
        """``{x in M : pi^i x in L}``."""
        sh = self.shape
        R = sh.ring
        c = R.pi_power(i)
        f = [[c if a == b else 0 for b in range(sh.rank)] for a in range(sh.rank)]
        return preimage(sh, f, self.rows, sh.rank)

    def elements(self) -> Iterator[tuple[int, ...]]:
        """Every element exactly once."""
        sh = self.shape
        R = sh.ring
        ranges, rows = [], []
        for j, r in enumerate(sh.factor_lengths):
            e = max(r - self.pivots[j], 0)
            if e:
                ranges.append(range(R.p**e))
                rows.append(self.rows[j])
        for cs in itertools.product(*ranges):
            v = [0] * sh.rank
            for c, row in zip(cs, rows):
                if c:
                    for t in range(sh.rank):
                        if row[t]:
                            v[t] = R.add(v[t], R.mul(c, row[t]))
            yield sh.reduce(v)

    @property
    def order(self) -> int:
        return self.shape.ring.p**self.length

    def is_semisimple_over(self, sub: "Submodule") -> bool:
        """Whether ``self / sub`` is killed by ``m`` (needs ``sub`` inside ``self``)."""
        return self.scale(1).issubset(sub)


def preimage(shape: ModuleShape, f, target_rows, target_width: int) -> Submodule:
    """``{x in M : x f in T}`` for a linear map given by the images ``f[a]`` of the basis.

    ``target_rows`` is an echelon row list (relations included) of ``T`` inside
    ``R^target_width``.
    """
    R, k = shape.ring, shape.rank
    rows = [tuple(f[a]) + tuple(int(a == b) for b in range(k)) for a in range(k)]
    rows += [tuple(t) + (0,) * k for t in target_rows if t is not None]
    H = howell(R, rows, target_width + k)
    return Submodule.from_generators(shape, _tail_span(H, target_width))


def submodule_from_generators(shape: ModuleShape, gens) -> Submodule:
    return Submodule.from_generators(shape, gens)


def submodule_sum(L1: Submodule, L2: Submodule) -> Submodule:
    return L1.sum(L2)


def intersect(L1: Submodule, L2: Submodule) -> Submodule:
    return L1.intersect(L2)


def contains(L: Submodule, x) -> bool:
    return L.contains(x)


def length(L: Submodule) -> int:
    return L.length


def scale_submodule(L: Submodule, i: int) -> Submodule:
    return L.scale(i)


def torsion_submodule(L: Submodule, i: int) -> Submodule:
    return L.torsion(i)


# --------------------------------------------------------------------------
# subquotients

class Subquotient:
    """The module ``A/B`` for submodules ``B <= A`` of ``M``, with a cyclic decomposition.

    ``lifts[i]`` is an element of ``A`` whose class generates the ``i``-th
    cyclic factor, of length ``shape.factor_lengths[i]``.
    """

    def __init__(self, A: Submodule, B: Submodule):
        A._check(B)
        if not B.issubset(A):
            raise ValueError("B must be contained in A")
        self.A, self.B = A, B
        M = A.shape
        R, k = M.ring, M.rank
        gens = A.generators()
        m = len(gens)
        self._gens = gens
        z = (0,) * m
        ident = [tuple(int(i == j) for j in range(m)) for i in range(m)]
        rel_rows = [tuple(g) + e for g, e in zip(gens, ident)]
        rel_rows += [tuple(b) + z for b in B.rows if b is not None]
        rel = _tail_span(howell(R, rel_rows, k + m), k)
        _, D, V, Vinv = snf_local(R, rel, m)
        exps = []
        for i in range(m):
            exps.append(R.valuation(D[i][i]) if i < len(D) else R.n)
        order = sorted((e, -i) for i, e in enumerate(exps) if e > 0)
        order.reverse()
        keep = [-i for _, i in order]
        self._V = V
        self._keep = keep
        self._exps = exps
        self.shape = ModuleShape(R, tuple(exps[i] for i in keep))
        self.lifts = []
        for i in keep:
            v = [0] * k
            for c, g in zip(Vinv[i], gens):
                if c:
                    for t in range(k):
                        if g[t]:
                            v[t] = R.add(v[t], R.mul(c, g[t]))
            self.lifts.append(M.reduce(v))
        # solver for x = u . gens mod relations
        srows = [tuple(g) + e for g, e in zip(gens, ident)]
        srows += [tuple(r) + z for r in M.relations]
        self._solver = howell(R, srows, k + m)

    @property
    def length(self) -> int:
        return self.shape.length

    def coords(self, x) -> tuple[int, ...]:
        """Coordinates of the class of ``x`` (an element of ``A``) in the lift basis."""
        M = self.A.shape
        R, k = M.ring, M.rank
        m = len(self._gens)
        rem = _reduce(R, self._solver, tuple(_coords(x)) + (0,) * m, k)
        if rem is None or any(rem[:k]):
            raise ValueError(f"{x} is not in the numerator submodule")
        u = [R.neg(c) for c in rem[k:]]
        out = []
        for i, r in zip(self._keep, self.shape.factor_lengths):
            c = 0
            for j in range(m):
                if u[j] and self._V[j][i]:
                    c = R.add(c, R.mul(u[j], self._V[j][i]))
            out.append(R.reduce(c, r))
        return tuple(out)

    def lift(self, c: Sequence[int]) -> tuple[int, ...]:
        """An element of ``A`` in the class with coordinates ``c``."""
        M = self.A.shape
        R = M.ring
        v = [0] * M.rank
        for ci, l in zip(c, self.lifts):
            ci = R.coerce(ci)
            if ci:
                for t in range(M.rank):
                    if l[t]:
                        v[t] = R.add(v[t], R.mul(ci, l[t]))
        return M.reduce(v)

    def image(self, L: Submodule) -> Submodule:
        """The image of ``L`` (inside ``A``) as a submodule of ``self.shape``."""
        return Submodule.from_generators(self.shape, [self.coords(g) for g in L.generators()])

    def preimage(self, L: Submodule) -> Submodule:
        """Preimage in ``A`` of a submodule of ``self.shape``."""
        return Submodule.from_generators(self.A.shape, [self.lift(g) for g in L.generators()]).sum(self.B)


def quotient_shape(shape: ModuleShape, L: Submodule) -> tuple[ModuleShape, list[tuple[int, ...]]]:
    q = Subquotient(shape.full(), L)
    return q.shape, q.lifts


def enumerate_submodules(shape: ModuleShape, within: Submodule | None = None,
                         budget: int | None = None) -> list[Submodule]:
    """All submodules of ``within`` (default ``M``), deterministically ordered."""
    within = within if within is not None else shape.full()
    budget = default_budget() if budget is None else budget
    if within.order > budget:
        raise BudgetExceeded(within.order, budget)
    cyclic = {}
    for x in within.elements():
        if any(x):
            C = Submodule.from_generators(shape, [x])
            cyclic.setdefault(C, x)
    gens = sorted(cyclic.items(), key=lambda kv: (kv[0].length, _sort_key(kv[0].rows)))
    zero = shape.zero()
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for L in frontier:
            for C, x in gens:
                if L.contains(x):
                    continue
                S = L.sum(C)
                if S not in seen:
                    seen.add(S)
                    nxt.append(S)
        frontier = nxt
    return sorted(seen, key=lambda L: (L.length, _sort_key(L.rows)))


def _sort_key(rows):
    return tuple(r if r is not None else () for r in rows)
