"""
Prime field arithmetic over F_q, q an odd prime.

Heavy enumeration code works on plain ints in [0, q); FieldElement is the
checked, operator-friendly wrapper used at API boundaries.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Tuple, Union

from errors import EvenCharacteristic, NotPrime

logger = logging.getLogger(__name__)

# Upper bound on q for the exhaustive square-root search
SQRT_SEARCH_LIMIT = 10_000


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


@dataclass(frozen=True)
class PrimeField:
    """The field F_q"""
    q: int

    def __post_init__(self):
        if not is_prime(self.q):
            raise NotPrime(f"{self.q} is not prime")
        if self.q == 2:
            raise EvenCharacteristic("characteristic 2 is not supported")

    def __call__(self, value: Union[int, "FieldElement"]) -> "FieldElement":
        return self.element(value)

    def element(self, value: Union[int, "FieldElement"]) -> "FieldElement":
        if isinstance(value, FieldElement):
            value = value.value
        return FieldElement(int(value) % self.q, self)

    def zero(self) -> "FieldElement":
        return FieldElement(0, self)

    def one(self) -> "FieldElement":
        return FieldElement(1, self)

    def elements(self) -> Iterator["FieldElement"]:
        for v in range(self.q):
            yield FieldElement(v, self)

    def inv(self, a: int) -> int:
        a %= self.q
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in F_q")
        return pow(a, self.q - 2, self.q)

    def legendre(self, a: int) -> int:
        """Euler's criterion: 0, 1 or -1"""
        a %= self.q
        if a == 0:
            return 0
        return 1 if pow(a, (self.q - 1) // 2, self.q) == 1 else -1

    def is_square(self, a: int) -> bool:
        return self.legendre(a) >= 0

    def sqrt(self, a: int) -> Optional[int]:
        """Smaller of the two roots, or None for a nonsquare"""
        return _sqrt_table(self.q).get(a % self.q)

    def squares(self) -> Tuple[int, ...]:
        """Nonzero squares in increasing order"""
        return tuple(sorted({(x * x) % self.q for x in range(1, self.q)}))

    def nonsquare(self) -> int:
        """Least nonsquare"""
        for a in range(2, self.q):
            if self.legendre(a) == -1:
                return a
        raise AssertionError("odd prime field without a nonsquare")

    def __str__(self) -> str:
        return f"F_{self.q}"


@lru_cache(maxsize=64)
def _sqrt_table(q: int) -> dict:
    if q > SQRT_SEARCH_LIMIT:
        logger.warning(f"Exhaustive square-root table for q={q} exceeds the search limit")
    table = {}
    for x in range(q):
        table.setdefault((x * x) % q, x)
    return table


@lru_cache(maxsize=64)
def make_field(q: int) -> PrimeField:
    """Validated field constructor (NotPrime, EvenCharacteristic)"""
    field = PrimeField(q)
    logger.debug(f"Constructed {field}")
    return field


@dataclass(frozen=True)
class FieldElement:
    value: int
    field: PrimeField

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError(f"cannot mix {self.field} and {other.field}")
            return other.value
        if isinstance(other, int):
            return other % self.field.q
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement((self.value + o) % self.field.q, self.field)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement((self.value - o) % self.field.q, self.field)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement((o - self.value) % self.field.q, self.field)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement((self.value * o) % self.field.q, self.field)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement((self.value * self.field.inv(o)) % self.field.q, self.field)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement((o * self.field.inv(self.value)) % self.field.q, self.field)

    def __neg__(self):
        return FieldElement((-self.value) % self.field.q, self.field)

    def __pow__(self, exponent: int):
        if exponent < 0:
            return FieldElement(pow(self.field.inv(self.value), -exponent, self.field.q), self.field)
        return FieldElement(pow(self.value, exponent, self.field.q), self.field)

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field.inv(self.value), self.field)

    def is_zero(self) -> bool:
        return self.value == 0

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"{self.value} (mod {self.field.q})"


def legendre(a: FieldElement) -> int:
    return a.field.legendre(a.value)


def sqrt(a: FieldElement) -> Optional[FieldElement]:
    root = a.field.sqrt(a.value)
    return None if root is None else FieldElement(root, a.field)
