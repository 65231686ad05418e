"""Exact numerics for stage evaluation.

Values are either exact rationals or symbolic expressions over rationals
and named ternary digit streams.  Symbolic values are compared and floored
by interval refinement: every enclosure is a closed rational interval that
provably contains the true value, and refinement only ever shrinks it.
Digit streams use base 3 with digits restricted to {0, 1}, so a stream's
value lies in [0, 3/2] and partial sums approach it from below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DivisionByZero, OracleQueryLimit, UnresolvedComparison

LT, EQ, GT = "LT", "EQ", "GT"

# Digit-query budget for a single comparison / floor / divisor check.
DEFAULT_FUEL = 4096


class Fuel:
    """Counts digit queries issued by one operation; trips at the limit."""

    def __init__(self, limit=DEFAULT_FUEL):
        self.limit = limit
        self.used = 0

    def spend(self, n=1):
        self.used += n
        if self.used > self.limit:
            raise OracleQueryLimit(
                f"digit queries exceeded the configured bound of {self.limit}"
            )


class QueryRecorder:
    """Set of distinct oracle queries made during one stage evaluation."""

    def __init__(self):
        self._seen = set()

    def record(self, key):
        """Record a query key; returns True when it is new."""
        if key in self._seen:
            return False
        self._seen.add(key)
        return True

    @property
    def count(self):
        return len(self._seen)


class OracleReal:
    """A real constant whose base-3 digits come from a 0/1 digit stream.

    The represented value is sum(3**-i * d(i) for i >= 0), always in
    [0, 3/2].  Digits are memoized: repeated queries at an index return
    the same digit and the partial-sum cache grows monotonically.
    """

    def __init__(self, name, digit_fn):
        self.name = name
        self._digit_fn = digit_fn
        self._digits = []
        self._psums = [Fraction(0)]  # _psums[m] = sum of first m terms

    def digit(self, i, fuel=None, recorder=None):
        if i < 0:
            raise ValueError("digit index must be >= 0")
        if fuel is not None:
            fuel.spend()
        if recorder is not None:
            recorder.record((self.name, "digit", i))
        while len(self._digits) <= i:
            j = len(self._digits)
            d = self._digit_fn(j)
            if d not in (0, 1):
                raise ValueError(
                    f"oracle {self.name!r} produced digit {d!r} at index {j};"
                    " digits must be 0 or 1"
                )
            self._digits.append(d)
            self._psums.append(self._psums[-1] + Fraction(d, 3**j))
        return self._digits[i]

    def prefix_sum(self, m, fuel=None, recorder=None):
        """Exact value of the first m digit terms."""
        if m > 0:
            self.digit(m - 1, fuel, recorder)
            if fuel is not None and m > 1:
                fuel.spend(m - 1)
            if recorder is not None:
                for i in range(m - 1):
                    recorder.record((self.name, "digit", i))
        return self._psums[m]

    def __repr__(self):
        return f"OracleReal({self.name!r})"


def tail_bound(m):
    """Upper bound of the digit-stream tail from index m on."""
    return Fraction(3, 2 * 3**m)


@dataclass(frozen=True, slots=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"inverted interval [{self.lo}, {self.hi}]")

    @property
    def width(self):
        return self.hi - self.lo

    def __contains__(self, x):
        return self.lo <= x <= self.hi

    def is_point(self):
        return self.lo == self.hi

    def __repr__(self):
        return f"[{self.lo}, {self.hi}]"


class ExactReal:
    """Base class; use the module functions or operators to combine values."""

    def __add__(self, other):
        return add(self, _coerce(other))

    def __radd__(self, other):
        return add(_coerce(other), self)

    def __sub__(self, other):
        return sub(self, _coerce(other))

    def __rsub__(self, other):
        return sub(_coerce(other), self)

    def __mul__(self, other):
        return mul(self, _coerce(other))

    def __rmul__(self, other):
        return mul(_coerce(other), self)

    def __truediv__(self, other):
        return div(self, _coerce(other))

    def __rtruediv__(self, other):
        return div(_coerce(other), self)

    def __neg__(self):
        return neg(self)


@dataclass(frozen=True, slots=True)
class Rat(ExactReal):
    value: Fraction

    def __repr__(self):
        return f"Rat({self.value})"


@dataclass(frozen=True, slots=True)
class Affine(ExactReal):
    """offset + coeff * stream-value, with coeff != 0.

    This shape is closed under +/- of rationals and scaling by rationals,
    which is exactly what oracle-decoding programs produce.  It admits a
    digit-exact refinement path: with m digits read, the value lies in
    offset + coeff * [S_m, S_m + tail_bound(m)].
    """

    offset: Fraction
    coeff: Fraction
    stream: OracleReal

    def __repr__(self):
        return f"Affine({self.offset} + {self.coeff}*{self.stream.name})"


@dataclass(frozen=True, slots=True)
class SymExpr(ExactReal):
    """General binary node; op is one of '+', '-', '*', '/'."""

    op: str
    lhs: ExactReal
    rhs: ExactReal
    # For '/': a refinement depth at which the divisor's enclosure is known
    # to exclude zero.  Not part of the value.
    den_prec: int = field(default=0, compare=False)

    def __repr__(self):
        return f"SymExpr({self.lhs!r} {self.op} {self.rhs!r})"


def exact(x) -> Rat:
    """Wrap an int, Fraction, or exact-decimal/fraction string."""
    return Rat(Fraction(x))


def oracle_const(stream: OracleReal) -> Affine:
    return Affine(Fraction(0), Fraction(1), stream)


def _coerce(x):
    if isinstance(x, ExactReal):
        return x
    if isinstance(x, (int, Fraction, str)):
        return exact(x)
    raise TypeError(f"cannot use {type(x).__name__} as ExactReal")


def _affine(offset, coeff, stream):
    if coeff == 0:
        return Rat(offset)
    return Affine(offset, coeff, stream)


def add(a, b, affine=True):
    if isinstance(a, Rat) and isinstance(b, Rat):
        return Rat(a.value + b.value)
    if affine:
        if isinstance(a, Rat) and isinstance(b, Affine):
            return _affine(a.value + b.offset, b.coeff, b.stream)
        if isinstance(a, Affine) and isinstance(b, Rat):
            return _affine(a.offset + b.value, a.coeff, a.stream)
        if (
            isinstance(a, Affine)
            and isinstance(b, Affine)
            and a.stream is b.stream
        ):
            return _affine(a.offset + b.offset, a.coeff + b.coeff, a.stream)
    return SymExpr("+", a, b)


def sub(a, b, affine=True):
    if isinstance(a, Rat) and isinstance(b, Rat):
        return Rat(a.value - b.value)
    if affine:
        if isinstance(a, Rat) and isinstance(b, Affine):
            return _affine(a.value - b.offset, -b.coeff, b.stream)
        if isinstance(a, Affine) and isinstance(b, Rat):
            return _affine(a.offset - b.value, a.coeff, a.stream)
        if (
            isinstance(a, Affine)
            and isinstance(b, Affine)
            and a.stream is b.stream
        ):
            return _affine(a.offset - b.offset, a.coeff - b.coeff, a.stream)
    return SymExpr("-", a, b)


def mul(a, b, affine=True):
    if isinstance(a, Rat) and isinstance(b, Rat):
        return Rat(a.value * b.value)
    if affine:
        if isinstance(a, Rat) and isinstance(b, Affine):
            if a.value == 0:
                return Rat(Fraction(0))
            return _affine(a.value * b.offset, a.value * b.coeff, b.stream)
        if isinstance(a, Affine) and isinstance(b, Rat):
            return mul(b, a)
    if isinstance(a, Rat) and a.value == 0 or isinstance(b, Rat) and b.value == 0:
        return Rat(Fraction(0))
    return SymExpr("*", a, b)


def neg(a):
    if isinstance(a, Rat):
        return Rat(-a.value)
    if isinstance(a, Affine):
        return Affine(-a.offset, -a.coeff, a.stream)
    return sub(Rat(Fraction(0)), a)


def div(a, b, affine=True, fuel_limit=DEFAULT_FUEL, recorder=None):
    """Exact division; the divisor must be provably nonzero.

    A rational divisor is checked directly.  A symbolic divisor is refined
    until its enclosure excludes zero; if the budget runs out first the
    division is rejected with UnresolvedComparison.
    """
    if isinstance(b, Rat):
        if b.value == 0:
            raise DivisionByZero("division by zero")
        if isinstance(a, Rat):
            return Rat(a.value / b.value)
        if affine and isinstance(a, Affine):
            return _affine(a.offset / b.value, a.coeff / b.value, a.stream)
        return SymExpr("/", a, b)
    prec = _separate_from_zero(b, fuel_limit, recorder)
    return SymExpr("/", a, b, den_prec=prec)


def _separate_from_zero(x, fuel_limit, recorder):
    fuel = Fuel(fuel_limit)
    last = None
    for j in _depths():
        try:
            last = _enclose(x, j, fuel, recorder)
        except OracleQueryLimit:
            raise UnresolvedComparison(
                "divisor cannot be separated from zero within fuel"
                f" {fuel_limit}; last enclosure {last}",
                fuel=fuel_limit,
                witnesses=(last,),
            ) from None
        if Fraction(0) not in last:
            return j


def _depths():
    """Refinement depths for sign/floor searches: 0, 1, 2, 4, 8, ...

    The answers these searches produce are depth-independent, so the
    schedule only affects how fast the budget is spent.
    """
    j = 0
    while True:
        yield j
        j = max(j + 1, 2 * j)


def _sign_enclosures(d, fuel, recorder):
    """Shrinking enclosures of d for sign searches.

    Affine values advance one digit at a time (so decoding programs issue
    exactly the digits they need); general DAGs use the geometric depth
    schedule.
    """
    if isinstance(d, Affine):
        m = 0
        while True:
            s = d.stream.prefix_sum(m, fuel, recorder)
            a = d.offset + d.coeff * s
            b = d.offset + d.coeff * (s + tail_bound(m))
            yield Interval(min(a, b), max(a, b))
            m += 1
    else:
        for j in _depths():
            yield _enclose(d, j, fuel, recorder)


def _enclose(x, j, fuel=None, recorder=None) -> Interval:
    """Raw enclosure at refinement depth j (nested, shrinking in j)."""
    if isinstance(x, Rat):
        return Interval(x.value, x.value)
    if isinstance(x, Affine):
        m = j + 1
        s = x.stream.prefix_sum(m, fuel, recorder)
        a = x.offset + x.coeff * s
        b = x.offset + x.coeff * (s + tail_bound(m))
        return Interval(min(a, b), max(a, b))
    if isinstance(x, SymExpr):
        li = _enclose(x.lhs, j, fuel, recorder)
        if x.op == "/":
            ri = _enclose(x.rhs, max(j, x.den_prec), fuel, recorder)
        else:
            ri = _enclose(x.rhs, j, fuel, recorder)
        return _combine(x.op, li, ri)
    raise TypeError(f"not an ExactReal: {x!r}")


def _combine(op, a, b):
    if op == "+":
        return Interval(a.lo + b.lo, a.hi + b.hi)
    if op == "-":
        return Interval(a.lo - b.hi, a.hi - b.lo)
    if op == "*":
        prods = (a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi)
        return Interval(min(prods), max(prods))
    if op == "/":
        if b.lo <= 0 <= b.hi:
            # Construction certifies separation at den_prec; reaching this
            # means the caller bypassed div().
            raise DivisionByZero("divisor enclosure straddles zero")
        quots = (a.lo / b.lo, a.lo / b.hi, a.hi / b.lo, a.hi / b.hi)
        return Interval(min(quots), max(quots))
    raise ValueError(f"unknown operator {op!r}")


def refine(x, k, fuel=None, recorder=None) -> Interval:
    """Enclosure of width at most 3**-k, nested as k grows."""
    if k < 0:
        raise ValueError("precision must be >= 0")
    x = _coerce(x)
    if isinstance(x, Rat):
        return Interval(x.value, x.value)
    target = Fraction(1, 3**k)
    if isinstance(x, Affine):
        # Smallest m with |coeff| * tail_bound(m) <= 3**-k, found exactly.
        m = max(0, k)
        c = abs(x.coeff)
        while c * tail_bound(m) > target:
            m += 1
        s = x.stream.prefix_sum(m, fuel, recorder)
        a = x.offset + x.coeff * s
        b = x.offset + x.coeff * (s + tail_bound(m))
        return Interval(min(a, b), max(a, b))
    j = k
    while True:
        iv = _enclose(x, j, fuel, recorder)
        if iv.width <= target:
            return iv
        j += 1


def structural_eq(a, b):
    """Equality of representations, not of mathematical values."""
    return _coerce(a) == _coerce(b)


def _witnesses(a, b, recorder=None):
    # Small fixed-depth enclosures for error payloads; bounded work.
    try:
        return (_enclose(a, 4, None, recorder), _enclose(b, 4, None, recorder))
    except Exception:
        return None


def compare(a, b, fuel_limit=DEFAULT_FUEL, recorder=None):
    """Three-way exact comparison.

    EQ is returned only for equal rationals or structurally identical
    expressions; numerically equal but distinct symbolic values refine
    forever and surface as UnresolvedComparison.
    """
    a, b = _coerce(a), _coerce(b)
    if isinstance(a, Rat) and isinstance(b, Rat):
        if a.value < b.value:
            return LT
        if a.value > b.value:
            return GT
        return EQ
    if structural_eq(a, b):
        return EQ
    d = sub(a, b)
    if isinstance(d, Rat):
        if d.value < 0:
            return LT
        if d.value > 0:
            return GT
        return EQ
    fuel = Fuel(fuel_limit)
    enclosures = _sign_enclosures(d, fuel, recorder)
    while True:
        try:
            iv = next(enclosures)
        except OracleQueryLimit:
            raise UnresolvedComparison(
                f"comparison unresolved after {fuel_limit} digit queries",
                fuel=fuel_limit,
                witnesses=_witnesses(a, b, recorder),
            ) from None
        if iv.lo > 0:
            return GT
        if iv.hi < 0:
            return LT


_PREDICATES = {
    # op: (truth when sign of lhs-rhs is certified negative / zero-or-pos ...)
    "<": lambda lo, hi: (True if hi < 0 else (False if lo >= 0 else None)),
    "<=": lambda lo, hi: (True if hi <= 0 else (False if lo > 0 else None)),
    ">": lambda lo, hi: (True if lo > 0 else (False if hi <= 0 else None)),
    ">=": lambda lo, hi: (True if lo >= 0 else (False if hi < 0 else None)),
}


def cmp_holds(op, a, b, fuel_limit=DEFAULT_FUEL, recorder=None):
    """Certified truth value of `a op b`.

    Unlike compare(), this resolves one-sided cases exactly: for example
    `x >= 1` is certified true as soon as the enclosure's closed lower end
    reaches 1, even when x may equal 1 exactly.
    """
    a, b = _coerce(a), _coerce(b)
    if isinstance(a, Rat) and isinstance(b, Rat):
        return _rat_cmp(op, a.value, b.value)
    if structural_eq(a, b):
        return op in ("<=", ">=", "=")
    d = sub(a, b)
    if isinstance(d, Rat):
        return _rat_cmp(op, d.value, Fraction(0))
    fuel = Fuel(fuel_limit)
    enclosures = _sign_enclosures(d, fuel, recorder)
    while True:
        try:
            iv = next(enclosures)
        except OracleQueryLimit:
            raise UnresolvedComparison(
                f"guard `{op}` unresolved after {fuel_limit} digit queries",
                fuel=fuel_limit,
                witnesses=_witnesses(a, b, recorder),
            ) from None
        if op in _PREDICATES:
            verdict = _PREDICATES[op](iv.lo, iv.hi)
        elif op == "=":
            # Can only ever be refuted numerically.
            verdict = False if (iv.lo > 0 or iv.hi < 0) else None
        elif op == "!=":
            verdict = True if (iv.lo > 0 or iv.hi < 0) else None
        else:
            raise ValueError(f"unknown comparison operator {op!r}")
        if verdict is not None:
            return verdict


def _rat_cmp(op, x, y):
    if op == "<":
        return x < y
    if op == "<=":
        return x <= y
    if op == ">":
        return x > y
    if op == ">=":
        return x >= y
    if op == "=":
        return x == y
    if op == "!=":
        return x != y
    raise ValueError(f"unknown comparison operator {op!r}")


def floor_value(x, fuel_limit=DEFAULT_FUEL, recorder=None) -> Rat:
    """Exact floor; raises UnresolvedComparison at unseparable boundaries."""
    x = _coerce(x)
    if isinstance(x, Rat):
        return Rat(Fraction(math.floor(x.value)))
    fuel = Fuel(fuel_limit)
    if isinstance(x, Affine):
        return _floor_affine(x, fuel, recorder, fuel_limit)
    last = None
    for j in _depths():
        try:
            last = _enclose(x, j, fuel, recorder)
        except OracleQueryLimit:
            raise UnresolvedComparison(
                f"floor sits at an integer boundary beyond fuel {fuel_limit};"
                f" last enclosure {last}",
                fuel=fuel_limit,
                witnesses=(last,),
            ) from None
        lo, hi = math.floor(last.lo), math.floor(last.hi)
        if lo == hi:
            return Rat(Fraction(lo))


def _floor_affine(x, fuel, recorder, fuel_limit):
    # Digit-exact path: extend the prefix one digit at a time until both
    # enclosure ends share a floor.  For offset 0 and coeff 3**k this reads
    # exactly the digits d_0..d_k.
    m = 0
    while True:
        try:
            s = x.stream.prefix_sum(m, fuel, recorder)
        except OracleQueryLimit:
            raise UnresolvedComparison(
                f"floor sits at an integer boundary beyond fuel {fuel_limit}",
                fuel=fuel_limit,
                witnesses=_witnesses(x, Rat(Fraction(0)), recorder),
            ) from None
        a = x.offset + x.coeff * s
        b = x.offset + x.coeff * (s + tail_bound(m))
        lo, hi = min(a, b), max(a, b)
        fl, fh = math.floor(lo), math.floor(hi)
        if fl == fh:
            return Rat(Fraction(fl))
        m += 1


def digit_extract(x, k, recorder=None):
    """Digit d_k of a value known to be 3**k times a digit stream.

    The provenance is checked structurally: x must be Affine with offset 0
    and coefficient exactly 3**k.
    """
    x = _coerce(x)
    if k < 0:
        raise ValueError("digit index must be >= 0")
    if not (
        isinstance(x, Affine)
        and x.offset == 0
        and x.coeff == Fraction(3) ** k
    ):
        raise ValueError(
            f"value {x!r} is not tagged as 3**{k} times an oracle constant"
        )
    return x.stream.digit(k, None, recorder)
