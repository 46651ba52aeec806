"""Exact scalars: rationals, the extended depth line, finite fields, fourth
roots of unity, quadratic characters and Gauss sums.

Everything here is immutable and exact; floats never appear on the main path.
"""

from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import ValidationError

Rational = Fraction


def parity_sign(n: int) -> int:
    """(-1)^n as an int, for any integer n."""
    return -1 if int(n) % 2 else 1


def rational(x) -> Fraction:
    """Coerce ints, Fractions and strings like ``"-3/2"`` to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise ValidationError(f"not a rational: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except ValueError:
            raise ValidationError(f"not a rational: {x!r}") from None
    raise ValidationError(f"not a rational: {x!r}")


def fmt_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# Depths


@functools.total_ordering
@dataclass(frozen=True)
class Depth:
    """A point of R~ = Q u {r+}; ``value=None`` encodes +infinity.

    ``Depth(r)`` is r and ``Depth(r, plus=True)`` is r+. The order is
    lexicographic on (value, plus) with infinity above everything.
    """

    value: Fraction | None
    plus: bool = False

    def __post_init__(self):
        if self.value is not None and not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", rational(self.value))
        if self.value is None and self.plus:
            raise ValidationError("infinity has no plus variant")

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def _key(self):
        if self.value is None:
            return (1, Fraction(0), False)
        return (0, self.value, self.plus)

    def __lt__(self, other):
        if not isinstance(other, Depth):
            return NotImplemented
        return self._key() < other._key()

    def tilde(self) -> "Depth":
        return depth_tilde(self)

    def shift(self, r) -> "Depth":
        if self.value is None:
            return self
        return Depth(self.value + rational(r), self.plus)

    def with_plus(self) -> "Depth":
        """r -> r+ ; r+ stays r+ (x+ is only ever applied to real values)."""
        if self.value is None:
            return self
        return Depth(self.value, True)

    def __str__(self):
        if self.value is None:
            return "inf"
        return fmt_rational(self.value) + ("+" if self.plus else "")


INFINITY = Depth(None)


def depth(x) -> Depth:
    """Parse ``3/2``, ``"3/2+"``, ``"inf"`` or pass a Depth through."""
    if isinstance(x, Depth):
        return x
    if isinstance(x, str):
        s = x.strip()
        if s in ("inf", "+inf", "infinity"):
            return INFINITY
        if s.endswith("+"):
            return Depth(rational(s[:-1]), True)
        return Depth(rational(s))
    return Depth(rational(x))


def depth_tilde(d: Depth) -> Depth:
    """The order-reversing involution r -> (-r)+, r+ -> -r."""
    if d.is_infinite:
        raise ValidationError("tilde is undefined at infinity")
    if d.plus:
        return Depth(-d.value, False)
    return Depth(-d.value, True)


# ---------------------------------------------------------------------------
# Fourth roots of unity


@dataclass(frozen=True)
class FourthRoot:
    """i**k for k mod 4, kept symbolic."""

    k: int

    def __post_init__(self):
        object.__setattr__(self, "k", self.k % 4)

    @classmethod
    def sign(cls, s: int) -> "FourthRoot":
        if s not in (1, -1):
            raise ValidationError(f"not a sign: {s!r}")
        return cls(0 if s == 1 else 2)

    @classmethod
    def parse(cls, s: str) -> "FourthRoot":
        table = {"+1": 0, "1": 0, "+i": 1, "i": 1, "-1": 2, "-i": 3}
        try:
            return cls(table[s.strip()])
        except KeyError:
            raise ValidationError(f"not a fourth root of unity: {s!r}") from None

    def __mul__(self, other):
        if isinstance(other, FourthRoot):
            return FourthRoot(self.k + other.k)
        if isinstance(other, int) and other in (1, -1):
            return self * FourthRoot.sign(other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, int):
            other = FourthRoot.sign(other)
        return FourthRoot(self.k - other.k)

    def __neg__(self):
        return FourthRoot(self.k + 2)

    def __pow__(self, n: int):
        return FourthRoot(self.k * n)

    @property
    def is_sign(self) -> bool:
        return self.k % 2 == 0

    def as_sign(self) -> int:
        if not self.is_sign:
            raise ValidationError(f"{self} is not real")
        return 1 if self.k == 0 else -1

    def to_complex(self) -> complex:
        return (1, 1j, -1, -1j)[self.k]

    def __str__(self):
        return ("+1", "+i", "-1", "-i")[self.k]


ONE = FourthRoot(0)
I = FourthRoot(1)


# ---------------------------------------------------------------------------
# Exact values in Q(i), optionally carrying symbolic oracle tags


@dataclass(frozen=True)
class QI:
    """An element re + im*i of Q(i)."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __add__(self, o):
        o = as_qi(o)
        return QI(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __sub__(self, o):
        return self + (-as_qi(o))

    def __mul__(self, o):
        if isinstance(o, FourthRoot):
            o = QI(*[Fraction(v) for v in ((1, 0), (0, 1), (-1, 0), (0, -1))[o.k]])
        o = as_qi(o)
        return QI(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __str__(self):
        if self.im == 0:
            return fmt_rational(self.re)
        im = "i" if abs(self.im) == 1 else f"{fmt_rational(abs(self.im))} i"
        if self.re == 0:
            return ("-" if self.im < 0 else "") + im
        return f"{fmt_rational(self.re)} {'-' if self.im < 0 else '+'} {im}"


def as_qi(x) -> QI:
    if isinstance(x, QI):
        return x
    if isinstance(x, FourthRoot):
        return QI(Fraction(1)) * x
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return QI(Fraction(x))
    raise TypeError(f"cannot convert {x!r} to Q(i)")


_QI_TERM = re.compile(r"^\s*([+-]?)\s*([0-9]+(?:/[0-9]+)?)?\s*(i?)\s*$")


def parse_qi(s: str) -> QI:
    """Parse strings such as ``"3"``, ``"-1/2"``, ``"i"``, ``"1/2 - 3/4 i"``."""
    if not isinstance(s, str):
        return as_qi(rational(s))
    text = s.replace(" ", "")
    if not text:
        raise ValidationError("empty Q(i) literal")
    terms = re.findall(r"[+-]?[^+-]+", text)
    if "".join(terms) != text:
        raise ValidationError(f"bad Q(i) literal: {s!r}")
    total = QI()
    for term in terms:
        m = _QI_TERM.match(term)
        if not m or (m.group(2) is None and not m.group(3)):
            raise ValidationError(f"bad Q(i) literal: {s!r}")
        sign = -1 if m.group(1) == "-" else 1
        mag = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        total = total + (QI(Fraction(0), sign * mag) if m.group(3) else QI(sign * mag))
    return total


@dataclass(frozen=True)
class Exact:
    """A Q(i)-linear combination of symbols; the symbol ``""`` is the unit.

    Oracle values may be opaque (e.g. an uncomputed orbital integral); keeping
    them symbolic lets sums be compared exactly without inventing numbers.
    """

    terms: tuple = ()  # sorted tuple of (symbol, QI) with nonzero QI

    @classmethod
    def of(cls, x, symbol: str = "") -> "Exact":
        q = as_qi(x)
        return cls(() if q.is_zero() else ((symbol, q),))

    @classmethod
    def symbol(cls, name: str) -> "Exact":
        if not name:
            raise ValidationError("symbol name must be non-empty")
        return cls(((name, QI(Fraction(1))),))

    def _dict(self):
        return dict(self.terms)

    def __add__(self, o):
        o = as_exact(o)
        d = self._dict()
        for k, v in o.terms:
            d[k] = d.get(k, QI()) + v
        return Exact(tuple(sorted((k, v) for k, v in d.items() if not v.is_zero())))

    __radd__ = __add__

    def __neg__(self):
        return Exact(tuple((k, -v) for k, v in self.terms))

    def __sub__(self, o):
        return self + (-as_exact(o))

    def scale(self, c) -> "Exact":
        c = as_qi(c)
        return Exact(tuple((k, v * c) for k, v in self.terms if not (v * c).is_zero()))

    def __mul__(self, o):
        if not isinstance(o, Exact):
            return self.scale(o)
        # symbols multiply as commutative monomials "a*b"
        total = Exact()
        for s1, c1 in self.terms:
            for s2, c2 in o.terms:
                total = total + Exact.of(c1 * c2, _monomial(s1, s2))
        return total

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.terms

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for sym, q in self.terms:
            if sym == "":
                parts.append(str(q))
            elif q == QI(Fraction(1)):
                parts.append(sym)
            else:
                parts.append(f"({q})*{sym}")
        return " + ".join(parts)

    def to_json(self):
        if all(sym == "" for sym, _ in self.terms):
            return str(self)
        return {"terms": [{"symbol": s, "coeff": str(q)} for s, q in self.terms]}


def _monomial(a: str, b: str) -> str:
    factors = [f for f in a.split("*") + b.split("*") if f]
    return "*".join(sorted(factors))


def as_exact(x) -> Exact:
    if isinstance(x, Exact):
        return x
    return Exact.of(x)


def parse_exact(obj) -> Exact:
    """JSON form: a Q(i) string, ``{"symbol": name}`` or ``{"terms": [...]}``."""
    if isinstance(obj, dict):
        if "symbol" in obj:
            base = Exact.symbol(str(obj["symbol"]))
            return base.scale(parse_qi(str(obj.get("coeff", "1"))))
        if "terms" in obj:
            total = Exact()
            for t in obj["terms"]:
                sym = t.get("symbol", "")
                coeff = parse_qi(str(t.get("coeff", "1")))
                total = total + Exact.of(coeff, sym)
            return total
        raise ValidationError(f"bad exact value: {obj!r}")
    if isinstance(obj, (int, Fraction)) and not isinstance(obj, bool):
        return Exact.of(obj)
    if isinstance(obj, str):
        return Exact.of(parse_qi(obj))
    raise ValidationError(f"bad exact value: {obj!r}")


# ---------------------------------------------------------------------------
# Finite fields


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Return (p, k) with q = p**k, or raise."""
    if q < 2:
        raise ValidationError(f"{q} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    k, m = 0, q
    while m % p == 0:
        m //= p
        k += 1
    if m != 1:
        raise ValidationError(f"{q} is not a prime power")
    return p, k


def _poly_mod(a: list[int], m: Sequence[int], p: int) -> list[int]:
    """Remainder of a modulo the monic polynomial m (coefficients low first)."""
    a = list(a)
    dm = len(m) - 1
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i] % p
        if c:
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] - c * m[j]) % p
    return [c % p for c in a[:dm]] + [0] * max(0, dm - len(a))


def _monic_polys(p: int, d: int) -> Iterator[tuple[int, ...]]:
    for low in itertools.product(range(p), repeat=d):
        yield low + (1,)


def _is_irreducible(m: tuple[int, ...], p: int) -> bool:
    k = len(m) - 1
    if k == 1:
        return True
    for d in range(1, k // 2 + 1):
        for g in _monic_polys(p, d):
            if not any(_poly_mod(list(m), g, p)):
                return False
    return True


@functools.lru_cache(maxsize=None)
def canonical_modulus(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree k over F_p.

    Coefficient tuples are compared low degree first; the leading 1 is kept
    as the last entry.
    """
    for m in _monic_polys(p, k):
        if k == 1 or m[0] != 0:
            if _is_irreducible(m, p):
                return m
    raise AssertionError("unreachable: irreducibles exist in every degree")


class GF:
    """The field F_{p^k} in the canonical power basis.

    Use :func:`field` to get the cached instance.
    """

    def __init__(self, p: int, k: int):
        if not is_prime(p):
            raise ValidationError(f"{p} is not prime")
        if p == 2:
            raise ValidationError("characteristic 2 is not supported")
        if k < 1:
            raise ValidationError(f"degree must be positive, got {k}")
        self.p = p
        self.k = k
        self.q = p**k
        self.modulus = canonical_modulus(p, k)

    def __repr__(self):
        return f"GF({self.p}^{self.k})"

    def __reduce__(self):
        return (field, (self.p, self.k))

    def __call__(self, x) -> "FqElem":
        if isinstance(x, FqElem):
            if x.field is not self:
                raise ValidationError(f"{x} is not in {self}")
            return x
        if isinstance(x, int):
            return FqElem(self, (x % self.p,) + (0,) * (self.k - 1))
        coeffs = tuple(int(c) % self.p for c in x)
        if len(coeffs) > self.k:
            raise ValidationError(f"too many coefficients for {self}: {list(x)}")
        return FqElem(self, coeffs + (0,) * (self.k - len(coeffs)))

    @property
    def zero(self) -> "FqElem":
        return self(0)

    @property
    def one(self) -> "FqElem":
        return self(1)

    def from_index(self, n: int) -> "FqElem":
        """Element whose base-p digits (low first) are its coefficients."""
        coeffs = []
        for _ in range(self.k):
            n, c = divmod(n, self.p)
            coeffs.append(c)
        return FqElem(self, tuple(coeffs))

    def elements(self) -> Iterator["FqElem"]:
        for n in range(self.q):
            yield self.from_index(n)

    def units(self) -> Iterator["FqElem"]:
        for n in range(1, self.q):
            yield self.from_index(n)

    @functools.cached_property
    def primitive(self) -> "FqElem":
        """The smallest (by index) generator of the multiplicative group."""
        n = self.q - 1
        primes = [d for d in range(2, n + 1) if n % d == 0 and is_prime(d)]
        for x in self.units():
            if all(x ** (n // ell) != self.one for ell in primes):
                return x
        raise AssertionError("unreachable")

    @functools.cached_property
    def norm_one_generator(self) -> "FqElem":
        """Generator of the kernel of the norm to the index-2 subfield."""
        if self.k % 2:
            raise ValidationError(f"{self} has no quadratic subfield")
        q0 = self.p ** (self.k // 2)
        return self.primitive ** (q0 - 1)

    @functools.cached_property
    def _trace_vector(self) -> tuple[int, ...]:
        out = []
        for i in range(self.k):
            b = self((0,) * i + (1,))
            out.append(fq_absolute_trace_slow(b))
        return tuple(out)

    def trace(self, x: "FqElem") -> int:
        """Absolute trace to F_p as an integer in [0, p)."""
        return sum(c * t for c, t in zip(x.coeffs, self._trace_vector)) % self.p


def field(p: int, k: int = 1) -> GF:
    return _field(int(p), int(k))


@functools.lru_cache(maxsize=None)
def _field(p: int, k: int) -> GF:
    return GF(p, k)


@dataclass(frozen=True)
class FqElem:
    """An element of a finite field, stored as power-basis coefficients."""

    field: GF
    coeffs: tuple[int, ...]

    def _coerce(self, o) -> "FqElem":
        if isinstance(o, FqElem):
            if o.field is not self.field:
                raise ValidationError(f"mixing {self.field} and {o.field}")
            return o
        if isinstance(o, int):
            return self.field(o)
        raise TypeError(f"cannot combine FqElem with {type(o).__name__}")

    def __add__(self, o):
        o = self._coerce(o)
        p = self.field.p
        return FqElem(self.field, tuple((a + b) % p for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FqElem(self.field, tuple((-a) % p for a in self.coeffs))

    def __sub__(self, o):
        return self + (-self._coerce(o))

    def __rsub__(self, o):
        return self._coerce(o) - self

    def __mul__(self, o):
        o = self._coerce(o)
        F = self.field
        k, p = F.k, F.p
        prod = [0] * (2 * k - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    if b:
                        prod[i + j] += a * b
        return FqElem(F, tuple(_poly_mod(prod, F.modulus, p)))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "FqElem":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in a finite field")
        return self ** (self.field.q - 2)

    def __truediv__(self, o):
        return self * self._coerce(o).inverse()

    def __rtruediv__(self, o):
        return self._coerce(o) * self.inverse()

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def frobenius(self, j: int = 1) -> "FqElem":
        return self ** (self.field.p**j)

    def index(self) -> int:
        n = 0
        for c in reversed(self.coeffs):
            n = n * self.field.p + c
        return n

    def order(self) -> int:
        if self.is_zero():
            raise ValidationError("zero has no multiplicative order")
        n = self.field.q - 1
        best = n
        for d in range(1, n + 1):
            if n % d == 0 and self**d == self.field.one:
                best = d
                break
        return best

    def in_subfield(self, d: int) -> bool:
        return self ** (self.field.p**d) == self

    def __str__(self):
        if self.field.k == 1:
            return str(self.coeffs[0])
        return "[" + ",".join(map(str, self.coeffs)) + "]"

    def __repr__(self):
        return f"FqElem({self.field!r}, {list(self.coeffs)})"

    def to_json(self):
        return list(self.coeffs)


def fq_absolute_trace_slow(x: FqElem) -> int:
    """Sum of Galois conjugates down to F_p, computed from the definition."""
    total = x.field.zero
    y = x
    for _ in range(x.field.k):
        total = total + y
        y = y.frobenius()
    if any(total.coeffs[1:]):
        raise AssertionError("trace did not land in the prime field")
    return total.coeffs[0]


def _unit_power_sign(v: FqElem) -> int:
    if v == v.field.one:
        return 1
    if v == -v.field.one:
        return -1
    raise AssertionError(f"expected +-1, got {v}")


def fq_sgn(x: FqElem) -> int:
    """The quadratic character of F_q^x: +1 on squares, -1 otherwise."""
    if x.is_zero():
        raise ValidationError("sgn is undefined at 0")
    return _unit_power_sign(x ** ((x.field.q - 1) // 2))


def fq_norm(x: FqElem, subfield_degree: int) -> FqElem:
    """Norm from x's field down to F_{p^d}; the result stays in x's field."""
    k = x.field.k
    d = subfield_degree
    if d < 1 or k % d:
        raise ValidationError(f"subfield degree {d} does not divide {k}")
    p = x.field.p
    return x ** ((p**k - 1) // (p**d - 1))


def fq_norm_one_sgn(x: FqElem) -> int:
    """Nontrivial +-1 character of the norm-one subgroup f^1 of F_{q^2}."""
    F = x.field
    if F.k % 2:
        raise ValidationError(f"{F} is not a quadratic extension of a subfield")
    q0 = F.p ** (F.k // 2)
    if x ** (q0 + 1) != F.one:
        raise ValidationError(f"{x} does not have norm 1 in {F}")
    return _unit_power_sign(x ** ((q0 + 1) // 2))


def gauss_sum(q: int) -> FourthRoot:
    """Normalized quadratic Gauss sum q^{-1/2} sum_t psi(t^2) over F_q.

    psi(t) = exp(2 pi i Tr(t)/p). Over F_p this is +1 for p = 1 mod 4 and
    +i for p = 3 mod 4; over F_{p^k} the lifting relation gives
    (-1)^(k-1) times the k-th power.
    """
    p, k = prime_power(q)
    if p == 2:
        raise ValidationError("Gauss sums are only defined here for odd q")
    base = ONE if p % 4 == 1 else I
    return FourthRoot.sign(parity_sign(k - 1)) * base**k
