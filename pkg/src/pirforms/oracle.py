"""Brute-force checkers and theorem suites.

The checkers here work from definitions: they enumerate submodules or
elements and test the defining predicates directly.  ``run_suite`` drives
them over families of Gram matrices and records every violated relation
with an instance document that can be replayed through the CLI.
"""

from __future__ import annotations

import itertools
import random
import time
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

from .aniso import is_anisotropic, is_quasi_anisotropic, radical_root_formula
from .forms import DegenerateFormError, GramForm, is_nondegenerate, orthogonal_split, orthogonal_sum, perp
from .graded import (FFForm, block_sum, even_form, lower_root, lr_s, odd_form, odd_form_direct,
                     quotient_by_socle, rho, shave, upper_root)
from .modules import BudgetExceeded, ModuleShape, Submodule, default_budget, enumerate_submodules
from .ring import Family, LocalPIR

TAGS = ("I", "II", "III", "IV", "V")
SUITES = ("main1", "ksi", "srt", "ar1", "ji", "per", "moma", "threes", "us")


@dataclass
class ConditionVerdict:
    tag: str
    holds: bool
    witness: object = None


@dataclass
class Failure:
    instance: dict
    relation: str
    observed: str


@dataclass
class SuiteResult:
    suite: str
    params: dict
    instances: int = 0
    skipped: Counter = field(default_factory=Counter)
    failures: list[Failure] = field(default_factory=list)
    stats: Counter = field(default_factory=Counter)
    runtime: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self, timing: bool = True) -> dict:
        d = {
            "suite": self.suite,
            "params": self.params,
            "instances": self.instances,
            "skipped": dict(sorted(self.skipped.items())),
            "passed": self.passed,
            "failures": [f.__dict__ for f in self.failures],
            "stats": {str(k): v for k, v in sorted(self.stats.items(), key=lambda kv: str(kv[0]))},
        }
        if timing:
            d["runtime_seconds"] = round(self.runtime, 3)
        return d


# --------------------------------------------------------------------------
# per-instance context

@lru_cache(maxsize=256)
def _subs(shape: ModuleShape, budget: int) -> tuple[Submodule, ...]:
    return tuple(enumerate_submodules(shape, budget=budget))


class _Instance:
    """Lazily computed data shared by the checkers for one form."""

    def __init__(self, F: GramForm, budget: int | None = None):
        self.F = F
        self.M = F.shape
        self.budget = default_budget() if budget is None else budget
        self._perp: dict[Submodule, Submodule] = {}
        self._nondeg = None
        self._lr = None

    @property
    def nondegenerate(self) -> bool:
        if self._nondeg is None:
            self._nondeg = is_nondegenerate(self.F)
        return self._nondeg

    @property
    def lr(self) -> Submodule:
        if self._lr is None:
            self._lr = lower_root(self.M)
        return self._lr

    @property
    def subs(self) -> tuple[Submodule, ...]:
        return _subs(self.M, self.budget)

    def perp(self, L: Submodule) -> Submodule:
        P = self._perp.get(L)
        if P is None:
            P = self._perp[L] = perp(self.F, L)
        return P

    def isotropic_subs(self) -> list[Submodule]:
        return [L for L in self.subs if L.issubset(self.perp(L))]

    def qualifying(self) -> list[Submodule]:
        """``L`` with ``L <= L^perp`` and ``L^perp / L`` semisimple."""
        return [L for L in self.isotropic_subs() if self.perp(L).scale(1).issubset(L)]


def _ctx(F, budget=None) -> _Instance:
    return F if isinstance(F, _Instance) else _Instance(F, budget)


def _lr_of_quotient(ctx: _Instance, L: Submodule) -> Submodule:
    """Preimage in ``L^perp`` of ``lr(L^perp / L)``."""
    return lower_root((ctx.perp(L), L))


def check_condition(F, tag: str, budget: int | None = None) -> ConditionVerdict:
    """Evaluate one of the five anisotropy conditions straight from its definition."""
    if tag not in TAGS:
        raise ValueError(f"unknown condition {tag!r}")
    ctx = _ctx(F, budget)
    if tag == "I":
        rep = is_anisotropic(ctx.F)
        wit = next((w.lift for v in rep.primes for w in v.witnesses), None)
        return ConditionVerdict(tag, rep.anisotropic, wit)
    if ctx.M.order > ctx.budget:
        raise BudgetExceeded(ctx.M.order, ctx.budget)
    if not ctx.nondegenerate:
        return ConditionVerdict(tag, False, perp(ctx.F, ctx.M.full()))
    lr = ctx.lr
    if tag == "II":
        bad = next((L for L in ctx.qualifying() if L != lr), None)
        return ConditionVerdict(tag, bad is None, bad)
    if tag == "V":
        bad = next((x for x in ctx.M.elements() if ctx.F.pair(x, x) == 0 and x not in lr), None)
        return ConditionVerdict(tag, bad is None, bad)
    for L in ctx.isotropic_subs():
        if not L.issubset(lr):
            return ConditionVerdict(tag, False, L)
        if tag == "III" and _lr_of_quotient(ctx, L) != lr:
            return ConditionVerdict(tag, False, L)
    return ConditionVerdict(tag, True)


def check_all_conditions(F, budget: int | None = None) -> dict[str, ConditionVerdict]:
    ctx = _ctx(F, budget)
    return {t: check_condition(ctx, t) for t in TAGS}


def radical_root_oracle(F, budget: int | None = None) -> Submodule:
    """Intersection of every ``L`` with ``L <= L^perp`` and ``L^perp / L`` semisimple."""
    ctx = _ctx(F, budget)
    if ctx.M.order > ctx.budget:
        raise BudgetExceeded(ctx.M.order, ctx.budget)
    if not ctx.nondegenerate:
        raise DegenerateFormError("the radical root oracle needs a non-degenerate form")
    out = ctx.M.full()
    for L in ctx.qualifying():
        out = out.intersect(L)
    return out


def check_ksi(F, budget: int | None = None) -> tuple[bool, bool, bool]:
    """The three equivalent forms of quasi-anisotropy, each evaluated independently."""
    ctx = _ctx(F, budget)
    if not ctx.nondegenerate:
        raise DegenerateFormError("check_ksi needs a non-degenerate form")
    i = is_quasi_anisotropic(ctx.F)
    if ctx.F.ring.n < 2:
        ii = True  # M / Soc(M) = 0
    else:
        ii = is_anisotropic(quotient_by_socle(ctx.F)).anisotropic
    lr = ctx.lr
    if lr.order > ctx.budget:
        raise BudgetExceeded(lr.order, ctx.budget)
    iii = all(_lr_of_quotient(ctx, L) == lr for L in enumerate_submodules(ctx.M, within=lr, budget=ctx.budget))
    return i, ii, iii


# --------------------------------------------------------------------------
# instance generation

def instance_doc(F: GramForm) -> dict:
    """A replayable instance document for ``F``."""
    R = F.ring
    return {
        "ring": {"family": R.family.value, "p": R.p, "n": R.n},
        "module": [R.p**r for r in F.shape.factor_lengths],
        "gram": [list(row) for row in F.gram],
    }


def partitions(total: int, largest: int):
    """Partitions of ``total`` into parts at most ``largest``, as descending tuples."""
    if total == 0:
        yield ()
        return
    for first in range(min(total, largest), 0, -1):
        for rest in partitions(total - first, first):
            yield (first,) + rest


def shapes_up_to(max_length: int, max_part: int | None = None) -> list[tuple[int, ...]]:
    max_part = max_length if max_part is None else max_part
    return [s for k in range(1, max_length + 1) for s in partitions(k, max_part)]


def gram_count(p: int, lengths) -> int:
    c = 1
    for a in range(len(lengths)):
        for b in range(a, len(lengths)):
            c *= p ** min(lengths[a], lengths[b])
    return c


def _gram_from_entries(R: LocalPIR, lengths, entries) -> tuple[tuple[int, ...], ...]:
    k = len(lengths)
    g = [[0] * k for _ in range(k)]
    it = iter(entries)
    for a in range(k):
        for b in range(a, k):
            # pi^(n - min) times a digit string of length min
            v = next(it) * R.p ** (R.n - min(lengths[a], lengths[b]))
            g[a][b] = g[b][a] = v
    return tuple(map(tuple, g))


def grams(R: LocalPIR, lengths, limit: int, samples: int, rng: random.Random):
    """Exhaustive when at most ``limit`` Gram matrices exist, else ``samples`` seeded draws."""
    k = len(lengths)
    ranges = [R.p ** min(lengths[a], lengths[b]) for a in range(k) for b in range(a, k)]
    shape = ModuleShape(R, tuple(lengths))
    if gram_count(R.p, lengths) <= limit:
        for entries in itertools.product(*(range(q) for q in ranges)):
            yield GramForm(shape, _gram_from_entries(R, lengths, entries))
    else:
        for _ in range(samples):
            entries = [rng.randrange(q) for q in ranges]
            yield GramForm(shape, _gram_from_entries(R, lengths, entries))


def sample_units(R: LocalPIR, rng: random.Random, k: int = 5) -> list[int]:
    out = []
    while len(out) < k:
        u = rng.randrange(1, R.size)
        if R.is_unit(u):
            out.append(u)
    return out


# --------------------------------------------------------------------------
# per-suite relation checks; each returns (relation, observed) pairs that failed

def _decisions(F: GramForm):
    nd = is_nondegenerate(F)
    rep = is_anisotropic(F)
    rrf = radical_root_formula(F) if nd else None
    return (nd, rep.anisotropic, rep.quasi_anisotropic,
            None if rrf is None else (rrf.submodule, rrf.d))


def rescaling_failures(F: GramForm, units) -> list[tuple[str, str]]:
    base = _decisions(F)
    out = []
    for u in units:
        got = _decisions(F.scaled(u))
        if got != base:
            out.append((f"decisions invariant under scaling by unit {u}", f"{base} vs {got}"))
    return out


def _check_main1(ctx: _Instance, res: SuiteResult):
    v = {t: c.holds for t, c in check_all_conditions(ctx).items()}
    bad = []
    if not (v["I"] == v["II"] == v["III"]):
        bad.append(("I <=> II <=> III", str(v)))
    if v["III"] and not v["IV"]:
        bad.append(("III => IV", str(v)))
    if v["IV"] != v["V"]:
        bad.append(("IV <=> V", str(v)))
    if ctx.F.ring.p != 2 and len(set(v.values())) > 1:
        bad.append(("all five equivalent when 2 is a unit", str(v)))
    if ctx.nondegenerate and ctx.lr not in ctx.qualifying():
        bad.append(("lr qualifies: lr <= lr^perp, lr^perp/lr semisimple", "lr not qualifying"))
    if v["IV"] and v["V"] and not v["I"]:
        res.stats["IV and V without I"] += 1
    res.stats["anisotropic" if v["I"] else "not anisotropic"] += 1
    return bad


def _check_ksi(ctx: _Instance, res: SuiteResult):
    if not ctx.nondegenerate:
        res.skipped["degenerate"] += 1
        return []
    v = check_ksi(ctx)
    res.stats["quasi-anisotropic" if v[0] else "not quasi-anisotropic"] += 1
    return [] if len(set(v)) == 1 else [("ksi i <=> ii <=> iii", str(v))]


def _check_srt(ctx: _Instance, res: SuiteResult):
    if not ctx.nondegenerate:
        res.skipped["degenerate"] += 1
        return []
    bad = []
    f = radical_root_formula(ctx.F)
    rr = radical_root_oracle(ctx)
    if not f.submodule.issubset(rr):
        bad.append(("lr_{d-1} <= rr", f"formula {f.submodule} not in oracle {rr}"))
    if not f.submodule.issubset(ctx.lr):
        bad.append(("lr_{d-1} <= lr", str(f.submodule)))
    if ctx.F.ring.p != 2 and f.submodule != rr:
        bad.append(("lr_{d-1} = rr for odd p", f"formula {f.submodule} vs oracle {rr}"))
    res.stats[f"gap {rr.length - f.submodule.length}"] += 1
    return bad


def _check_us(ctx: _Instance, res: SuiteResult):
    if not ctx.nondegenerate:
        res.skipped["degenerate"] += 1
        return []
    quasi = is_quasi_anisotropic(ctx.F)
    rr = radical_root_oracle(ctx)
    eq = rr == ctx.lr
    res.stats["quasi-anisotropic" if quasi else "not quasi-anisotropic"] += 1
    bad = []
    if quasi and not eq:
        bad.append(("quasi-anisotropic => rr = lr", f"rr {rr} vs lr {ctx.lr}"))
    if ctx.F.ring.p != 2 and eq and not quasi:
        bad.append(("rr = lr => quasi-anisotropic for odd p", f"rr {rr}"))
    return bad


def _brute_kernel_trivial(F: GramForm) -> bool:
    basis = F.shape.basis()
    return not any(any(x) and all(F.pair(x, e) == 0 for e in basis) for x in F.shape.elements())


def _check_ar1(ctx: _Instance, res: SuiteResult):
    F, M = ctx.F, ctx.M
    ii = _brute_kernel_trivial(F)
    iii = all(L.length + ctx.perp(L).length == M.length for L in ctx.subs)
    iv = all(ctx.perp(ctx.perp(L)) == L for L in ctx.subs)
    nd = ctx.nondegenerate
    res.stats["nondegenerate" if nd else "degenerate"] += 1
    if len({ii, iii, iv, nd}) > 1:
        return [("nondegenerate <=> M^perp = 0 <=> length formula <=> perp involution",
                 f"nondeg={nd} kernel0={ii} lengths={iii} involution={iv}")]
    return []


def _check_per(ctx: _Instance, res: SuiteResult):
    if not ctx.nondegenerate:
        res.skipped["degenerate"] += 1
        return []
    P = ctx.perp
    for L1, L2 in itertools.combinations_with_replacement(ctx.subs, 2):
        if P(L1.sum(L2)) != P(L1).intersect(P(L2)):
            return [("(L1 + L2)^perp = L1^perp & L2^perp", f"{L1}, {L2}")]
        if P(L1.intersect(L2)) != P(L1).sum(P(L2)):
            return [("(L1 & L2)^perp = L1^perp + L2^perp", f"{L1}, {L2}")]
        res.stats["pairs"] += 1
    return []


def _check_ji(ctx: _Instance, res: SuiteResult):
    lr, ur, F = ctx.lr, upper_root(ctx.M), ctx.F
    bad = []
    if not (lr.issubset(perp(F, ur)) and perp(F, ur).issubset(perp(F, lr))):
        bad.append(("lr <= ur^perp <= lr^perp", f"lr {lr} ur {ur}"))
    if not ctx.nondegenerate:
        res.skipped["degenerate"] += 1
        return bad
    P = perp(F, lr)
    if P != ur:
        bad.append(("lr^perp = ur", f"{P} vs {ur}"))
    if not lr.issubset(P):
        bad.append(("lr <= lr^perp", str(P)))
    if not P.scale(1).issubset(lr):
        bad.append(("lr^perp / lr semisimple", str(P)))
    r = ctx.M.exponent
    for s in range(1 - r, r + 1):
        if perp(F, lr_s(ctx.M, s)) != lr_s(ctx.M, 1 - s):
            bad.append((f"lr_s^perp = lr_(1-s) at s={s}", ""))
    return bad


def _ff_iso(a: FFForm, b: FFForm) -> bool:
    return a.isometric(b)


def decomposition_rho(F: GramForm) -> dict[int, FFForm]:
    """``rho_i`` read off an explicit orthogonal decomposition into homogeneous blocks.

    On a block free over ``R/m^i`` with ``<e_a, e_b> = pi^(n-i) x_ab`` the
    graded piece is ``(x_ab mod m)``.
    """
    R = F.ring
    out = {}
    for block, _ in orthogonal_split(F):
        i = block.shape.factor_lengths[0]
        g = [[R.divide_pi(v, R.n - i) % R.p for v in row] for row in block.gram]
        out[i] = FFForm(R.p, tuple(map(tuple, g)))
    return out


def _check_moma(ctx: _Instance, res: SuiteResult, partner: GramForm):
    F = ctx.F
    bad = []
    o, e = odd_form(F), even_form(F)
    nd = ctx.nondegenerate
    if nd != (o.is_nondegenerate() and e.is_nondegenerate()):
        bad.append(("nondegenerate <=> odd and even forms nondegenerate",
                    f"nondeg={nd} odd={o.rank()}/{o.dim} even={e.rank()}/{e.dim}"))
    fl = F.shape.factor_lengths
    r = F.shape.exponent
    for i in range(1, r + 2):
        if rho(F, i).dim != fl.count(i):
            bad.append((f"dim rho_{i} = number of factors of length {i}", str(rho(F, i).dim)))
    S = orthogonal_sum(F, partner)
    for i in range(1, max(r, partner.shape.exponent) + 1):
        lhs = rho(S, i).form
        rhs = rho(F, i).form, rho(partner, i).form
        if not _ff_iso(lhs, block_sum(F.ring.p, rhs)):
            bad.append((f"rho_{i} additive under orthogonal sums", f"{lhs} vs {rhs}"))
    if nd:
        direct = odd_form_direct(F)[0]
        if not _ff_iso(direct, o):
            bad.append(("odd form on ur/lr isometric to the sum of odd rho_i", f"{direct} vs {o}"))
        for i, block in decomposition_rho(F).items():
            if not _ff_iso(block, rho(F, i).form):
                bad.append((f"rho_{i} matches the homogeneous block of a decomposition", f"{block} vs {rho(F, i).form}"))
    return bad


def _check_threes(ctx: _Instance, res: SuiteResult):
    F = ctx.F
    r = F.shape.exponent
    if r < 2:
        res.skipped["exponent < 2"] += 1
        return []
    bad = []
    Sh, sq = shave(F, with_basis=True)
    for i in range(1, r + 1):
        got = rho(Sh, i).form
        if i >= r:
            want = FFForm(F.ring.p)
        elif i == r - 2:
            want = block_sum(F.ring.p, [rho(F, r - 2).form, rho(F, r).form])
        else:
            want = rho(F, i).form
        if not _ff_iso(got, want):
            bad.append((f"rho_{i}(Sh M) per the shaving merge", f"{got} vs {want}"))
    if sq.preimage(lower_root(Sh.shape)) != ctx.lr:
        bad.append(("lr(M) = phi^-1(lr(Sh M))", ""))
    if sq.preimage(upper_root(Sh.shape)) != upper_root(ctx.M):
        bad.append(("ur(M) = phi^-1(ur(Sh M))", ""))
    if ctx.nondegenerate:
        bad += _sat(ctx, Sh, sq, r)
    else:
        res.skipped["degenerate (correspondence)"] += 1
    return bad


def _sat(ctx: _Instance, Sh: GramForm, sq, r: int):
    M = ctx.M
    top = M.torsion(r - 1)
    core = M.scaled(r - 1)

    def good(P, L):
        return P.scale(1).issubset(L) and L.issubset(P)

    S1 = [L for L in ctx.subs if L.issubset(top) and good(ctx.perp(L), L)]
    sh_ctx = _Instance(Sh, ctx.budget)
    S2 = {L for L in sh_ctx.subs if good(sh_ctx.perp(L), L)}
    images = [sq.image(L.sum(core)) for L in S1]
    bad = []
    if not set(images) <= S2:
        bad.append(("phi maps S1 into S2", ""))
    if set(images) != S2:
        bad.append(("phi: S1 -> S2 surjective", f"{len(set(images))} of {len(S2)}"))
    restricted = [img for L, img in zip(S1, images) if core.issubset(L)]
    if len(restricted) != len(set(restricted)) or set(restricted) != S2:
        bad.append(("phi bijective on L containing m^(r-1) M", ""))
    return bad


_CHECKS = {
    "main1": _check_main1, "ksi": _check_ksi, "srt": _check_srt, "us": _check_us, "ar1": _check_ar1,
    "per": _check_per, "ji": _check_ji, "threes": _check_threes,
}


def run_suite(name: str, p: int = 3, max_length: int = 3, shapes=None, samples: int = 64, seed: int = 0,
              family: str = "Zp", exhaustive_limit: int = 4096, ring_length: int | None = None,
              rescale: bool = True, budget: int | None = None) -> SuiteResult:
    """Check the relations of suite ``name`` over all (or sampled) forms on the given shapes.

    ``shapes`` lists factor-length tuples; by default every shape of total
    length at most ``max_length``.  The ring is ``R/m^n`` with ``n`` the
    largest factor length unless ``ring_length`` is given.
    """
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; expected one of {', '.join(SUITES)}")
    budget = default_budget() if budget is None else budget
    params = {"p": p, "max_length": max_length, "samples": samples, "seed": seed, "family": family,
              "exhaustive_limit": exhaustive_limit, "ring_length": ring_length}
    if shapes is None:
        shapes = shapes_up_to(max_length, ring_length)
    shapes = [tuple(sorted(s, reverse=True)) for s in shapes]
    params["shapes"] = [list(s) for s in shapes]
    res = SuiteResult(name, params)
    t0 = time.perf_counter()
    for lengths in shapes:
        n = ring_length or max(lengths)
        R = LocalPIR(p, n, Family(family))
        rng = random.Random(f"{seed}:{name}:{lengths}")
        if p ** sum(lengths) > budget and name not in ("moma",):
            res.skipped["over budget"] += 1
            continue
        for F in grams(R, lengths, exhaustive_limit, samples, rng):
            res.instances += 1
            ctx = _Instance(F, budget)
            if name == "moma":
                plen = rng.choice([l for l in range(1, n + 1)])
                partner = next(grams(R, (plen,), 0, 1, rng))
                bad = _check_moma(ctx, res, partner)
            else:
                bad = _CHECKS[name](ctx, res)
            if rescale:
                bad += rescaling_failures(F, sample_units(R, rng))
            for rel, obs in bad:
                res.failures.append(Failure(instance_doc(F), rel, obs))
    res.runtime = time.perf_counter() - t0
    return res
