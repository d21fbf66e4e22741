"""Instance documents in, analysis reports out."""

from __future__ import annotations

import json
import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction

from .aniso import is_anisotropic, radical_root_formula
from .forms import CompositeForm, GramForm, is_nondegenerate
from .graded import even_form, lower_root, odd_form, upper_root
from .modules import BudgetExceeded, Submodule, default_budget
from .oracle import check_all_conditions, radical_root_oracle, rescaling_failures, sample_units
from .ring import Family, LocalPIR, factorize, is_prime


class InstanceError(ValueError):
    """A malformed instance document; ``where`` names the offending field."""

    def __init__(self, where: str, msg: str):
        super().__init__(f"{where}: {msg}")
        self.where = where


EXAMPLES = {
    "paper-z4": {"ring": {"family": "Zp", "p": 2, "n": 2}, "module": [4, 4], "gram": [[2, 1], [1, 2]]},
    "semisimple-hyperbolic": {"ring": {"family": "Zp", "p": 3, "n": 1}, "module": [3, 3],
                              "gram": [[0, 1], [1, 0]]},
    "cyclic-unit": {"ring": {"family": "Zp", "p": 3, "n": 2}, "module": [9], "gram": [[1]]},
}


@dataclass
class Component:
    """The ``p``-part of an instance.  ``index[j]`` is the input factor carrying local factor ``j``."""

    p: int
    form: GramForm
    index: list[int]


@dataclass
class Instance:
    doc: dict
    rank: int
    components: list[Component]
    composite: CompositeForm | None = None

    def globalize(self, comp: Component, x) -> list[int]:
        """Local coordinates to a vector in the input's factor order."""
        if self.composite is not None:
            return list(self.composite.embed(comp.p, x))
        out = [0] * self.rank
        for j, c in zip(comp.index, x):
            out[j] = c
        return out


# --------------------------------------------------------------------------
# parsing

def _int(v, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise InstanceError(where, f"expected an integer, got {v!r}")
    return v


def _matrix(m, k: int, where: str) -> list[list]:
    if not isinstance(m, list) or len(m) != k or any(not isinstance(r, list) or len(r) != k for r in m):
        raise InstanceError(where, f"expected a {k}x{k} matrix")
    return m


def _fraction(v, where: str) -> Fraction:
    try:
        if isinstance(v, bool):
            raise TypeError
        return Fraction(v) if isinstance(v, (int, str)) else Fraction(str(v))
    except (ValueError, TypeError, ZeroDivisionError):
        raise InstanceError(where, f"not a rational number: {v!r}") from None


def parse_instance(doc) -> Instance:
    """Validate an instance document and split it into local components."""
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as e:
            raise InstanceError(f"line {e.lineno} column {e.colno}", e.msg) from None
    if not isinstance(doc, dict):
        raise InstanceError("document", "expected a JSON object")
    unknown = set(doc) - {"ring", "module", "gram", "gram_qz"}
    if unknown:
        raise InstanceError(sorted(unknown)[0], "unknown field")
    orders = doc.get("module")
    if not isinstance(orders, list) or not orders:
        raise InstanceError("module", "expected a non-empty list of cyclic orders")
    orders = [_int(c, f"module[{a}]") for a, c in enumerate(orders)]
    for a, c in enumerate(orders):
        if c < 2:
            raise InstanceError(f"module[{a}]", "cyclic orders must be >= 2")
    k = len(orders)
    exponent = math.lcm(*orders)
    ring = doc.get("ring")
    if ring is None:
        if "gram_qz" not in doc:
            raise InstanceError("ring", "missing (only optional together with gram_qz)")
        ring = {"modulus": exponent}
    if not isinstance(ring, dict):
        raise InstanceError("ring", "expected an object")

    if ("gram" in doc) == ("gram_qz" in doc):
        raise InstanceError("gram", "give exactly one of gram and gram_qz")
    if "modulus" in ring:
        if set(ring) != {"modulus"}:
            raise InstanceError("ring", "modulus excludes family/p/n")
        N = _int(ring["modulus"], "ring.modulus")
        if N < 2:
            raise InstanceError("ring.modulus", "must be >= 2")
        family, size = Family.ZP, N
    else:
        for key in ("family", "p", "n"):
            if key not in ring:
                raise InstanceError(f"ring.{key}", "missing")
        try:
            family = Family(ring["family"])
        except ValueError:
            raise InstanceError("ring.family", f"expected 'Zp' or 'Fpt', got {ring['family']!r}") from None
        p, n = _int(ring["p"], "ring.p"), _int(ring["n"], "ring.n")
        if not is_prime(p):
            raise InstanceError("ring.p", f"{p} is not prime")
        if n < 1:
            raise InstanceError("ring.n", "must be >= 1")
        size = p**n
    for a, c in enumerate(orders):
        if size % c:
            raise InstanceError(f"module[{a}]", f"order {c} does not divide the ring size {size}")

    if "gram" in doc:
        raw = _matrix(doc["gram"], k, "gram")
        if family is Family.FPT:
            gram = [[v if isinstance(v, list) else _int(v, f"gram[{a}][{b}]") for b, v in enumerate(row)]
                    for a, row in enumerate(raw)]
        else:
            gram = [[_int(v, f"gram[{a}][{b}]") for b, v in enumerate(row)] for a, row in enumerate(raw)]
    else:
        if family is Family.FPT:
            raise InstanceError("gram_qz", "the Q/Z encoding needs an integer ring")
        raw = _matrix(doc["gram_qz"], k, "gram_qz")
        gram = []
        for a, row in enumerate(raw):
            out = []
            for b, v in enumerate(row):
                q = _fraction(v, f"gram_qz[{a}][{b}]")
                if exponent % q.denominator:
                    raise InstanceError(f"gram_qz[{a}][{b}]",
                                        f"denominator {q.denominator} does not divide the exponent {exponent}")
                out.append(int(q * size) % size)
            gram.append(out)

    try:
        if "modulus" in ring:
            C = CompositeForm(size, tuple(orders), tuple(map(tuple, gram)))
            comps = [Component(R.p, F, C.component_indices(R.p)) for R, F in C.localize().components]
            return Instance(doc, k, comps, C)
        R = LocalPIR(p, n, family)
        lengths = [_plength(c, p, f"module[{a}]") for a, c in enumerate(orders)]
        F = GramForm.from_data(R, lengths, gram)
        index = sorted(range(k), key=lambda a: -lengths[a])
        return Instance(doc, k, [Component(p, F, index)])
    except InstanceError:
        raise
    except ValueError as e:
        raise InstanceError("gram", str(e)) from None


def _plength(c: int, p: int, where: str) -> int:
    f = factorize(c)
    if len(f) != 1 or f[0][0] != p:
        raise InstanceError(where, f"order {c} is not a power of {p}")
    return f[0][1]


# --------------------------------------------------------------------------
# analysis

def _gens(inst: Instance, comp: Component, L: Submodule) -> list[list[int]]:
    return [inst.globalize(comp, g) for g in L.generators()]


def _global(inst: Instance, parts) -> list[list[int]] | None:
    if any(v is None for v in parts.values()):
        return None
    return [g for comp in inst.components for g in parts[comp.p]]


def analyze(inst: Instance, oracle: bool = True, budget: int | None = None, seed: int = 0) -> dict:
    """The analysis report for an instance.  Raises :class:`BudgetExceeded` if the oracle is too big."""
    budget = default_budget() if budget is None else budget
    t0 = time.perf_counter()
    primes = []
    glob = {"lr": {}, "ur": {}, "rr_formula": {}, "rr_oracle": {}}
    rng = random.Random(seed)
    units_used, rescale_ok = {}, True
    for comp in inst.components:
        F = comp.form
        rep = is_anisotropic(F)
        verdict = rep.primes[0]
        nd = is_nondegenerate(F)
        lr, ur = lower_root(F.shape), upper_root(F.shape)
        entry = {
            "p": comp.p,
            "ring": repr(F.ring),
            "factor_lengths": list(F.shape.factor_lengths),
            "nondegenerate": nd,
            "odd_anisotropic": verdict.odd_anisotropic,
            "even_anisotropic": verdict.even_anisotropic,
            "quasi_anisotropic": rep.quasi_anisotropic,
            "odd_form": [list(r) for r in odd_form(F).gram],
            "even_form": [list(r) for r in even_form(F).gram],
            "lr": _gens(inst, comp, lr),
            "ur": _gens(inst, comp, ur),
            "witnesses": [{"form": w.form, "vector": list(w.vector), "lift": inst.globalize(comp, w.lift)}
                          for w in verdict.witnesses],
        }
        glob["lr"][comp.p], glob["ur"][comp.p] = entry["lr"], entry["ur"]
        if nd:
            f = radical_root_formula(F)
            entry["rr_formula"] = {"generators": _gens(inst, comp, f.submodule), "d": f.d,
                                   "equality_expected": f.equality_expected}
            glob["rr_formula"][comp.p] = entry["rr_formula"]["generators"]
        else:
            entry["rr_formula"] = None
            glob["rr_formula"][comp.p] = None
        entry["rr_oracle"] = None
        entry["conditions"] = None
        if oracle:
            if F.shape.order > budget:
                raise BudgetExceeded(F.shape.order, budget)
            if nd:
                entry["rr_oracle"] = _gens(inst, comp, radical_root_oracle(F, budget))
            entry["conditions"] = {t: v.holds for t, v in check_all_conditions(F, budget).items()}
        glob["rr_oracle"][comp.p] = entry["rr_oracle"]
        units = sample_units(F.ring, rng)
        units_used[str(comp.p)] = units
        if rescaling_failures(F, units):
            rescale_ok = False
        primes.append(entry)
    report = {
        "nondegenerate": all(e["nondegenerate"] for e in primes),
        "anisotropic": all(e["odd_anisotropic"] and e["even_anisotropic"] for e in primes),
        "quasi_anisotropic": all(e["quasi_anisotropic"] for e in primes),
        "lr": _global(inst, glob["lr"]),
        "ur": _global(inst, glob["ur"]),
        "rr_formula": _global(inst, glob["rr_formula"]),
        "rr_oracle": _global(inst, glob["rr_oracle"]) if oracle else None,
        "primes": primes,
        "unit_rescaling": {"units": units_used, "invariant": rescale_ok},
        "timing": {"seconds": round(time.perf_counter() - t0, 4)},
    }
    return report


def render_text(report: dict) -> str:
    yn = {True: "yes", False: "no", None: "n/a"}
    lines = [
        f"non-degenerate     {yn[report['nondegenerate']]}",
        f"anisotropic        {yn[report['anisotropic']]}",
        f"quasi-anisotropic  {yn[report['quasi_anisotropic']]}",
        f"lr                 {report['lr']}",
        f"ur                 {report['ur']}",
        f"rr (formula)       {report['rr_formula']}",
        f"rr (oracle)        {report['rr_oracle']}",
    ]
    for e in report["primes"]:
        lines.append(f"-- p = {e['p']}: {e['ring']}, factor lengths {e['factor_lengths']}")
        lines.append(f"   odd form  {e['odd_form']}  anisotropic: {yn[e['odd_anisotropic']]}")
        lines.append(f"   even form {e['even_form']}  anisotropic: {yn[e['even_anisotropic']]}")
        if e["rr_formula"] is not None:
            lines.append(f"   formula index d = {e['rr_formula']['d']}, "
                         f"equality expected: {yn[e['rr_formula']['equality_expected']]}")
        if e["conditions"] is not None:
            lines.append("   conditions " + " ".join(f"{t}={'T' if v else 'F'}" for t, v in e["conditions"].items()))
        for w in e["witnesses"]:
            lines.append(f"   isotropic {w['form']} vector {w['vector']} lifting to {w['lift']}")
    ur = report["unit_rescaling"]
    lines.append(f"unit rescaling     {'invariant' if ur['invariant'] else 'NOT invariant'} "
                 f"(units {ur['units']})")
    lines.append(f"time               {report['timing']['seconds']} s")
    return "\n".join(lines)


def render_suite(res) -> str:
    lines = [f"suite {res.suite}: {res.instances} instances, {len(res.failures)} failures "
             f"({res.runtime:.2f} s)"]
    if res.skipped:
        lines.append("skipped: " + ", ".join(f"{k} {v}" for k, v in sorted(res.skipped.items())))
    if res.stats:
        lines.append("stats: " + ", ".join(f"{k} {v}" for k, v in sorted(res.stats.items(), key=lambda kv: str(kv[0]))))
    for f in res.failures:
        lines.append(f"FAIL {f.relation}: {f.observed}")
        lines.append(f"     replay: {json.dumps(f.instance)}")
    return "\n".join(lines)
