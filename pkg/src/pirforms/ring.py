"""Local artinian principal ideal rings with prime residue field.

Two families are supported: ``Z/p^n`` and ``F_p[t]/(t^n)``.  Elements of
both are stored as integers in ``[0, p^n)``; for the polynomial family the
base-``p`` digits of the integer are the coefficients, lowest degree first.
With that encoding the uniformizer power ``pi^v`` is ``p**v`` in both
families, and valuation, residue and reduction modulo ``pi^v`` are plain
integer operations.  Only addition and multiplication differ.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property


class Family(str, enum.Enum):
    ZP = "Zp"
    FPT = "Fpt"


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    f = 2
    while f * f <= p:
        if p % f == 0:
            return False
        f += 1
    return True


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization of ``n >= 1`` as ``[(p, k), ...]`` sorted by ``p``."""
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            k = 0
            while n % f == 0:
                n //= f
                k += 1
            out.append((f, k))
        f += 1
    if n > 1:
        out.append((n, 1))
    return out


@dataclass(frozen=True)
class LocalPIR:
    """The ring ``Z/p^n`` or ``F_p[t]/(t^n)``; ``m = (pi)`` with ``pi = p`` or ``t``."""

    p: int
    n: int
    family: Family = Family.ZP

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if not is_prime(self.p):
            raise ValueError(f"residue characteristic {self.p} is not prime")
        if self.n < 1:
            raise ValueError(f"nilpotency length must be >= 1, got {self.n}")

    def __repr__(self):
        if self.family is Family.ZP:
            return f"Z/{self.p}^{self.n}"
        return f"F_{self.p}[t]/(t^{self.n})"

    @property
    def size(self) -> int:
        return self.p**self.n

    @cached_property
    def _ppow(self) -> tuple[int, ...]:
        return tuple(self.p**i for i in range(self.n + 1))

    def with_length(self, n: int) -> "LocalPIR":
        return LocalPIR(self.p, n, self.family)

    # raw arithmetic on canonical integers

    def add(self, x: int, y: int) -> int:
        if self.family is Family.ZP:
            return (x + y) % self.size
        if self.p == 2:
            return x ^ y
        return self._from_digits([(a + b) % self.p for a, b in zip(self._digits(x), self._digits(y))])

    def neg(self, x: int) -> int:
        if self.family is Family.ZP:
            return -x % self.size
        if self.p == 2:
            return x
        return self._from_digits([-a % self.p for a in self._digits(x)])

    def sub(self, x: int, y: int) -> int:
        return self.add(x, self.neg(y))

    def mul(self, x: int, y: int) -> int:
        if self.family is Family.ZP:
            return x * y % self.size
        if x == 0 or y == 0:
            return 0
        a, b = self._digits(x), self._digits(y)
        c = [0] * self.n
        for i, ai in enumerate(a):
            if ai:
                for j in range(self.n - i):
                    c[i + j] += ai * b[j]
        return self._from_digits([v % self.p for v in c])

    def from_int(self, k: int) -> int:
        """Image of the integer ``k`` under ``Z -> R``."""
        if self.family is Family.ZP:
            return k % self.size
        return k % self.p

    def _digits(self, x: int) -> list[int]:
        d = []
        for _ in range(self.n):
            x, r = divmod(x, self.p)
            d.append(r)
        return d

    def _from_digits(self, d) -> int:
        x = 0
        for v in reversed(d):
            x = x * self.p + v
        return x

    def valuation(self, x: int) -> int:
        """Largest ``v`` with ``x`` in ``m^v``; ``n`` for zero."""
        if x == 0:
            return self.n
        v = 0
        while x % self.p == 0:
            x //= self.p
            v += 1
        return v

    def pi_power(self, v: int) -> int:
        return self._ppow[v] if v < self.n else 0

    def divmod_pi(self, x: int, v: int) -> tuple[int, int]:
        """``x = q * pi^v + r`` with ``r`` the canonical representative mod ``pi^v``."""
        if v >= self.n:
            return 0, x
        # for F_p[t] this is a digit shift: q*t^v + r has no carries
        return divmod(x, self._ppow[v])

    def divide_pi(self, x: int, j: int) -> int:
        """The canonical ``y`` with ``pi^j * y = x`` and ``unit_part(y) = unit_part(x)``."""
        if self.valuation(x) < j:
            raise ValueError(f"{x} is not divisible by pi^{j} in {self!r}")
        return x // self._ppow[j] if j <= self.n else 0

    def unit_part(self, x: int) -> int:
        if x == 0:
            raise ValueError("zero has no unit part")
        while x % self.p == 0:
            x //= self.p
        return x

    def is_unit(self, x: int) -> bool:
        return x % self.p != 0

    def inv(self, u: int) -> int:
        if not self.is_unit(u):
            raise ValueError(f"{u} is not a unit in {self!r}")
        if self.family is Family.ZP:
            return pow(u, -1, self.size)
        # unit group has order p^(n-1) (p-1)
        e = self.p ** (self.n - 1) * (self.p - 1) - 1
        result, base = 1, u
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def residue(self, x: int) -> int:
        return x % self.p

    def reduce(self, x: int, n: int) -> int:
        """Image under ``R -> R/m^n`` (``n`` at most the ring length)."""
        return x % self._ppow[min(n, self.n)]

    def units(self) -> list[int]:
        return [u for u in range(self.size) if u % self.p]

    def elem(self, value) -> "RingElem":
        return RingElem(self, self.coerce(value))

    def coerce(self, value) -> int:
        """Canonical integer for an int (``Zp``) or coefficient list / encoded int (``Fpt``)."""
        if isinstance(value, RingElem):
            return value.value
        if isinstance(value, (list, tuple)):
            if self.family is not Family.FPT:
                raise TypeError("coefficient lists only make sense for F_p[t]/(t^n)")
            coeffs = [c % self.p for c in value][: self.n]
            return self._from_digits(coeffs + [0] * (self.n - len(coeffs)))
        value = int(value)
        if self.family is Family.ZP:
            return value % self.size
        if not 0 <= value < self.size:
            raise ValueError(f"encoded polynomial {value} out of range for {self!r}")
        return value


@dataclass(frozen=True)
class RingElem:
    ring: LocalPIR
    value: int

    def _other(self, other) -> int:
        if isinstance(other, RingElem):
            if other.ring != self.ring:
                raise ValueError("elements of different rings")
            return other.value
        return self.ring.from_int(other)

    def __add__(self, other):
        return RingElem(self.ring, self.ring.add(self.value, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return RingElem(self.ring, self.ring.sub(self.value, self._other(other)))

    def __neg__(self):
        return RingElem(self.ring, self.ring.neg(self.value))

    def __mul__(self, other):
        return RingElem(self.ring, self.ring.mul(self.value, self._other(other)))

    __rmul__ = __mul__

    def __repr__(self):
        return f"{self.value} in {self.ring!r}"


def valuation(x: RingElem) -> int:
    return x.ring.valuation(x.value)


def unit_part(x: RingElem) -> RingElem:
    return RingElem(x.ring, x.ring.unit_part(x.value))


def invert_unit(u: RingElem) -> RingElem:
    return RingElem(u.ring, u.ring.inv(u.value))


def residue(x: RingElem) -> int:
    return x.ring.residue(x.value)


def divide_by_pi_power(x: RingElem, j: int) -> RingElem:
    return RingElem(x.ring, x.ring.divide_pi(x.value, j))


def crt_decompose(N: int) -> list[LocalPIR]:
    """Local components ``Z/p^k`` of ``Z/N``, one per prime power exactly dividing ``N``."""
    if N < 2:
        raise ValueError(f"modulus must be >= 2, got {N}")
    return [LocalPIR(p, k) for p, k in factorize(N)]
