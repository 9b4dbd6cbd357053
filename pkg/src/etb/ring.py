"""Exact arithmetic in small finite commutative rings.

Three kinds are supported: prime fields ``fq:p``, extension fields ``fq:p^k``
(elements encoded as integers whose base-p digits are polynomial coefficients,
lowest degree first) and residue rings ``zmod:m``.  Every element is a plain
``int`` in ``range(cardinality)``; :class:`RingElement` is a thin operator
wrapper for interactive use.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

MAX_CARDINALITY = 2**16


class RingError(ValueError):
    """Invalid ring descriptor or modulus."""


class NotInvertible(ArithmeticError):
    """Raised when inverting a non-unit."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization as ``[(p, e), ...]`` with increasing p."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


def euler_phi(m: int) -> int:
    out = m
    for p, _ in factorize(m):
        out = out // p * (p - 1)
    return out


# polynomials over F_p: coefficient lists, lowest degree first, no trailing zeros

def _ptrim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a, b, p):
    a = _ptrim(a)
    b = _ptrim(b)
    inv_lead = pow(b[-1], -1, p)
    while len(a) >= len(b):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(b)
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bi) % p
        a = _ptrim(a)
    return a


def _monic_polys(p: int, deg: int):
    for tail in product(range(p), repeat=deg):
        # tail is (c_{deg-1}, ..., c_0); yields in lexicographic order of that tuple
        yield list(reversed(tail)) + [1]


def is_irreducible(poly: list[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    poly = _ptrim([c % p for c in poly])
    deg = len(poly) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for g in _monic_polys(p, d):
            if not _pmod(poly, g, p):
                return False
    return True


def default_modulus(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically least irreducible monic of degree k over F_p.

    Candidates are ordered by the coefficient tuple (c_{k-1}, ..., c_0).
    """
    for g in _monic_polys(p, k):
        if is_irreducible(g, p):
            return tuple(g)
    raise RingError(f"no irreducible polynomial of degree {k} over F_{p}")  # pragma: no cover


_DESCRIPTOR = re.compile(r"^\s*(fq|zmod)\s*:\s*(\d+)(?:\s*\^\s*(\d+))?\s*$")


@dataclass(frozen=True)
class FiniteRing:
    """A finite commutative ring with integer-encoded elements.

    ``kind`` is one of ``"prime"``, ``"ext"``, ``"zmod"``.  For ``"ext"`` the
    modulus is the monic defining polynomial (lowest degree first).
    """

    kind: str
    p: int  # characteristic prime for fields, m for zmod
    k: int = 1
    modulus: tuple[int, ...] | None = None
    _tables: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    # -- construction -------------------------------------------------------------
    def __post_init__(self):
        if self.kind == "ext":
            self._build_ext_tables()

    @property
    def cardinality(self) -> int:
        return self.p**self.k if self.kind == "ext" else self.p

    @property
    def is_field(self) -> bool:
        return self.kind in ("prime", "ext")

    @property
    def descriptor(self) -> str:
        if self.kind == "prime":
            return f"fq:{self.p}"
        if self.kind == "ext":
            return f"fq:{self.p}^{self.k}"
        return f"zmod:{self.p}"

    def __str__(self) -> str:
        return self.descriptor

    def _build_ext_tables(self):
        p, k, q = self.p, self.k, self.p**self.k
        mod = list(self.modulus)

        def to_poly(a):
            out = []
            for _ in range(k):
                out.append(a % p)
                a //= p
            return out

        def from_poly(c):
            v = 0
            for x in reversed(c):
                v = v * p + x
            return v

        def pmul(a, b):
            prod_ = [0] * (2 * k - 1)
            for i, x in enumerate(a):
                if x:
                    for j, y in enumerate(b):
                        prod_[i + j] = (prod_[i + j] + x * y) % p
            r = _pmod(prod_, mod, p)
            return r + [0] * (k - len(r))

        polys = [to_poly(a) for a in range(q)]
        # find a generator of the multiplicative group
        exp = log = None
        for g in range(2, q) if q > 2 else [1]:
            seq = [1]
            cur = polys[1]
            gp = polys[g]
            ok = True
            for _ in range(q - 2):
                cur = pmul(cur, gp)
                v = from_poly(cur)
                if v == 1:
                    ok = False
                    break
                seq.append(v)
            if ok and len(set(seq)) == q - 1:
                exp = seq
                break
        assert exp is not None
        log = [0] * q
        for i, v in enumerate(exp):
            log[v] = i
        self._tables["exp"] = exp
        self._tables["log"] = log
        self._tables["digits"] = polys

    # -- arithmetic on encoded ints -------------------------------------------------
    def add(self, a: int, b: int) -> int:
        if self.kind != "ext":
            return (a + b) % self.p
        p = self.p
        out, mult = 0, 1
        while a or b:
            out += ((a % p + b % p) % p) * mult
            a //= p
            b //= p
            mult *= p
        return out

    def neg(self, a: int) -> int:
        if self.kind != "ext":
            return -a % self.p
        p = self.p
        out, mult = 0, 1
        while a:
            out += (-(a % p) % p) * mult
            a //= p
            mult *= p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.kind != "ext":
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        t = self._tables
        return t["exp"][(t["log"][a] + t["log"][b]) % (self.cardinality - 1)]

    def is_unit(self, a: int) -> bool:
        if self.is_field:
            return a != 0
        return math.gcd(a, self.p) == 1

    def inv(self, a: int) -> int:
        if not self.is_unit(a):
            raise NotInvertible(f"{a} is not invertible in {self.descriptor}")
        if self.kind == "ext":
            t = self._tables
            return t["exp"][(-t["log"][a]) % (self.cardinality - 1)]
        return pow(a, -1, self.p)

    def from_int(self, n: int) -> int:
        """Image of the integer n under Z -> ring."""
        if self.kind == "ext":
            return n % self.p
        return n % self.p

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return 1

    def elements(self) -> range:
        return range(self.cardinality)

    @cached_property
    def unit_values(self) -> tuple[int, ...]:
        return tuple(a for a in self.elements() if self.is_unit(a))

    @property
    def unit_count(self) -> int:
        return len(self.unit_values)

    def units(self) -> list["RingElement"]:
        return [RingElement(self, a) for a in self.unit_values]

    def elem(self, value: int) -> "RingElement":
        if not 0 <= value < self.cardinality:
            raise RingError(f"{value} is not a canonical element of {self.descriptor}")
        return RingElement(self, value)

    # -- local decomposition (CRT) ------------------------------------------------------
    @cached_property
    def local_factors(self) -> tuple["FiniteRing", ...]:
        """Local factor rings; the ring is their product via CRT.

        Fields are their own single factor; ``zmod:m`` splits into ``zmod:p^e``.
        """
        if self.is_field:
            return (self,)
        return tuple(FiniteRing("zmod", p**e) for p, e in factorize(self.p))

    @cached_property
    def residue_prime(self) -> int:
        """For a local ``zmod:p^e`` the prime p (unit test is ``a % p``)."""
        if self.is_field:
            return self.p
        f = factorize(self.p)
        if len(f) != 1:
            raise RingError(f"{self.descriptor} is not local")
        return f[0][0]

    def to_local(self, a: int, i: int) -> int:
        if self.is_field:
            return a
        return a % self.local_factors[i].p

    @cached_property
    def _crt_coeffs(self) -> tuple[int, ...]:
        if self.is_field:
            return (1,)
        m = self.p
        coeffs = []
        for lf in self.local_factors:
            qi = lf.p
            mi = m // qi
            coeffs.append(mi * pow(mi, -1, qi) % m)
        return tuple(coeffs)

    def from_locals(self, parts) -> int:
        if self.is_field:
            return parts[0]
        return sum(c * x for c, x in zip(self._crt_coeffs, parts)) % self.p


@dataclass(frozen=True)
class RingElement:
    ring: FiniteRing
    value: int

    def _coerce(self, other) -> int:
        if isinstance(other, RingElement):
            if other.ring != self.ring:
                raise RingError("elements of different rings")
            return other.value
        if isinstance(other, int):
            return self.ring.from_int(other)
        return NotImplemented

    def __add__(self, other):
        return RingElement(self.ring, self.ring.add(self.value, self._coerce(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return RingElement(self.ring, self.ring.sub(self.value, self._coerce(other)))

    def __rsub__(self, other):
        return RingElement(self.ring, self.ring.sub(self._coerce(other), self.value))

    def __mul__(self, other):
        return RingElement(self.ring, self.ring.mul(self.value, self._coerce(other)))

    __rmul__ = __mul__

    def __neg__(self):
        return RingElement(self.ring, self.ring.neg(self.value))

    def inv(self) -> "RingElement":
        return RingElement(self.ring, self.ring.inv(self.value))

    def is_unit(self) -> bool:
        return self.ring.is_unit(self.value)

    def __repr__(self) -> str:
        return f"{self.value}@{self.ring.descriptor}"


def inv(x: RingElement) -> RingElement:
    return x.inv()


def units(ring: FiniteRing) -> list[RingElement]:
    return ring.units()


def ring_make(descriptor: str, modulus: list[int] | tuple[int, ...] | None = None) -> FiniteRing:
    """Parse a descriptor such as ``fq:2``, ``fq:3^2``, ``fq:4`` or ``zmod:6``.

    ``modulus`` (lowest degree first, monic) overrides the default for
    extension fields and must be irreducible of the right degree.
    """
    if isinstance(descriptor, FiniteRing):
        return descriptor
    mt = _DESCRIPTOR.match(descriptor)
    if not mt:
        raise RingError(f"bad ring descriptor {descriptor!r}")
    kind, base, exp = mt.group(1), int(mt.group(2)), mt.group(3)
    if kind == "zmod":
        if exp is not None:
            base = base ** int(exp)
        if base < 2:
            raise RingError("zmod:m requires m >= 2")
        if base > MAX_CARDINALITY:
            raise RingError("ring too large")
        return FiniteRing("zmod", base)
    if exp is not None:
        p, k = base, int(exp)
        if not is_prime(p):
            raise RingError(f"{p} is not prime")
    else:
        f = factorize(base) if base >= 2 else []
        if len(f) != 1:
            raise RingError(f"{base} is not a prime power")
        p, k = f[0]
    if k < 1:
        raise RingError("field degree must be >= 1")
    if p**k > MAX_CARDINALITY:
        raise RingError("ring too large")
    if k == 1:
        if modulus is not None:
            raise RingError("a prime field takes no modulus")
        return FiniteRing("prime", p)
    if modulus is None:
        mod = default_modulus(p, k)
    else:
        mod = tuple(c % p for c in modulus)
        if len(_ptrim(mod)) != k + 1 or mod[-1] != 1:
            raise RingError("modulus must be monic of the field degree")
        if not is_irreducible(list(mod), p):
            raise RingError("modulus is reducible")
    return FiniteRing("ext", p, k, mod)
