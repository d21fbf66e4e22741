"""Anisotropy, quasi-anisotropy and the radical-root formula."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .forms import CompositeForm, DegenerateFormError, GramForm, MultiForm, as_multiform, is_nondegenerate
from .graded import FFForm, even_indices, graded_sum, lr_s, odd_indices
from .modules import Submodule

BRUTE_FORCE_LIMIT = 2**16


def _colex(p: int, dim: int):
    """Nonzero vectors of ``F_p^dim`` with the first coordinate varying fastest."""
    for v in itertools.product(range(p), repeat=dim):
        v = v[::-1]
        if any(v):
            yield v


def _quad(F: FFForm, v) -> int:
    g, p = F.gram, F.p
    s = 0
    for a, va in enumerate(v):
        if va:
            s += g[a][a] * va * va
            for b in range(a + 1, len(v)):
                if v[b]:
                    s += 2 * g[a][b] * va * v[b]
    return s % p


def first_isotropic(F: FFForm):
    """The first nonzero ``v`` (in colex order) with ``<v, v> = 0``, or None."""
    return next((v for v in _colex(F.p, F.dim) if _quad(F, v) == 0), None)


def ff_is_anisotropic_closed_form(F: FFForm) -> bool:
    p, d = F.p, F.dim
    if p == 2:
        # <v,v> = sum g_aa v_a is linear over F_2
        return d == 0 or (d == 1 and F.gram[0][0] == 1)
    if d == 0:
        return True
    if d == 1:
        return F.gram[0][0] != 0
    if d == 2:
        det = F.det()
        return det != 0 and pow(-det % p, (p - 1) // 2, p) != 1
    return False


def ff_is_anisotropic(F: FFForm, limit: int = BRUTE_FORCE_LIMIT):
    """``(anisotropic, witness)``; brute force up to ``limit`` vectors, closed form beyond."""
    if F.p**F.dim <= limit:
        w = first_isotropic(F)
        return w is None, w
    if ff_is_anisotropic_closed_form(F):
        return True, None
    return False, first_isotropic(F)


@dataclass
class Witness:
    """An isotropic vector of a graded form, with a lift to the module."""

    form: str
    vector: tuple[int, ...]
    lift: tuple[int, ...]


@dataclass
class PrimeVerdict:
    p: int
    odd_anisotropic: bool
    even_anisotropic: bool
    witnesses: list[Witness] = field(default_factory=list)

    @property
    def anisotropic(self) -> bool:
        return self.odd_anisotropic and self.even_anisotropic


@dataclass
class AnisoReport:
    primes: list[PrimeVerdict]
    anisotropic: bool
    quasi_anisotropic: bool


def _lift(F: GramForm, lifts, v) -> tuple[int, ...]:
    R = F.ring
    out = [0] * F.shape.rank
    for c, x in zip(v, lifts):
        for t in range(len(out)):
            if c and x[t]:
                out[t] = R.add(out[t], R.mul(R.from_int(c), x[t]))
    return F.shape.reduce(out)


def _check_part(F: GramForm, name: str, indices, witnesses: list) -> bool:
    form, lifts = graded_sum(F, indices)
    ok, w = ff_is_anisotropic(form)
    if not ok:
        witnesses.append(Witness(name, tuple(w), _lift(F, lifts, w)))
    return ok


def local_verdict(F: GramForm) -> PrimeVerdict:
    wits: list[Witness] = []
    odd = _check_part(F, "odd", odd_indices(F), wits)
    even = _check_part(F, "even", even_indices(F), wits)
    return PrimeVerdict(F.ring.p, odd, even, wits)


def _local_quasi(F: GramForm) -> bool:
    if not is_nondegenerate(F):
        return False
    even_tail, odd_tail = tail_forms_pair(F, 2)
    return ff_is_anisotropic(even_tail)[0] and ff_is_anisotropic(odd_tail)[0]


def tail_forms_pair(F: GramForm, d: int) -> tuple[FFForm, FFForm]:
    return graded_sum(F, even_indices(F, d))[0], graded_sum(F, odd_indices(F, d))[0]


def is_anisotropic(F: GramForm | MultiForm | CompositeForm) -> AnisoReport:
    comps = as_multiform(F).components
    verdicts = [local_verdict(G) for _, G in comps]
    aniso = all(v.anisotropic for v in verdicts)
    quasi = all(_local_quasi(G) for _, G in comps)
    return AnisoReport(verdicts, aniso, quasi)


def is_quasi_anisotropic(F: GramForm | MultiForm | CompositeForm) -> bool:
    return all(_local_quasi(G) for _, G in as_multiform(F).components)


@dataclass
class RadicalRootFormula:
    submodule: Submodule
    d: int
    equality_expected: bool


def minimal_tail_index(F: GramForm) -> int:
    """Smallest ``d >= 2`` with both graded tails from ``d`` on anisotropic."""
    d = 2
    while True:
        even_tail, odd_tail = tail_forms_pair(F, d)
        if ff_is_anisotropic(even_tail)[0] and ff_is_anisotropic(odd_tail)[0]:
            return d
        d += 1


def radical_root_formula(F: GramForm) -> RadicalRootFormula:
    """``lr_{d-1}(M)``, contained in the radical root, equal to it for odd ``p``."""
    if not is_nondegenerate(F):
        raise DegenerateFormError("the radical-root formula needs a non-degenerate form")
    d = minimal_tail_index(F)
    return RadicalRootFormula(lr_s(F.shape, d - 1), d, F.ring.p != 2)


def radical_root(F: MultiForm | CompositeForm | GramForm):
    """Per-prime radical-root formula results.

    Returns ``{p: Submodule}``; for a :class:`CompositeForm` a second value
    carries generators of the direct sum inside the original module.
    """
    mf = as_multiform(F)
    for _, G in mf.components:
        if not is_nondegenerate(G):
            raise DegenerateFormError("the radical root needs a non-degenerate form")
    parts = {R.p: radical_root_formula(G).submodule for R, G in mf.components}
    if isinstance(F, CompositeForm):
        gens = [F.embed(p, g) for p, L in parts.items() for g in L.generators()]
        return parts, gens
    return parts
