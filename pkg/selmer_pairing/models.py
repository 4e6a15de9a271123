"""Data models for selmer_pairing.

Mathematical values (places, square classes, curves, points, Selmer
elements) are frozen pydantic models so they can be hashed, cached and
compared by value.
"""

from enum import Enum
from fractions import Fraction
from math import gcd
from typing import Any, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, field_validator, model_validator
from sympy import factorint, isprime


def _as_fraction(value: Any) -> Any:
    if isinstance(value, Fraction) or value is None:
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    return value


class PlaceKind(str, Enum):
    """Kind of a place of Q."""

    REAL = "real"
    FINITE = "finite"


class Place(BaseModel):
    """A place of Q: the real place or a finite prime.

    Attributes:
        kind: real or finite.
        prime: The prime, present iff kind is finite.
    """

    model_config = ConfigDict(frozen=True)

    kind: PlaceKind
    prime: Optional[int] = None

    @model_validator(mode="after")
    def _check_prime(self) -> "Place":
        if self.kind == PlaceKind.REAL:
            if self.prime is not None:
                raise ValueError("the real place carries no prime")
        else:
            if self.prime is None or not isprime(self.prime):
                raise ValueError(f"finite place needs a prime, got {self.prime}")
        return self

    @classmethod
    def real(cls) -> "Place":
        return cls(kind=PlaceKind.REAL)

    @classmethod
    def finite(cls, prime: int) -> "Place":
        return cls(kind=PlaceKind.FINITE, prime=prime)

    @property
    def is_real(self) -> bool:
        return self.kind == PlaceKind.REAL

    @property
    def is_dyadic(self) -> bool:
        return self.prime == 2

    @property
    def label(self) -> str:
        return "inf" if self.is_real else str(self.prime)

    @property
    def sort_key(self) -> Tuple[int, int]:
        return (0, 0) if self.is_real else (1, self.prime or 0)

    def __str__(self) -> str:
        return self.label


class SquareClass(BaseModel):
    """An element of Q*/(Q*)^2, canonically a squarefree nonzero integer with sign."""

    model_config = ConfigDict(frozen=True)

    rep: int

    @field_validator("rep")
    @classmethod
    def _check_squarefree(cls, v: int) -> int:
        if v == 0:
            raise ValueError("a square class cannot be zero")
        if any(e > 1 for e in factorint(abs(v)).values()):
            raise ValueError(f"{v} is not squarefree")
        return v

    @classmethod
    def trusted(cls, rep: int) -> "SquareClass":
        """Build from a representative already known to be squarefree."""
        return cls.model_construct(rep=rep)

    @property
    def is_trivial(self) -> bool:
        return self.rep == 1

    def support(self) -> List[int]:
        """Primes dividing the representative."""
        return sorted(factorint(abs(self.rep)))

    def __mul__(self, other: "SquareClass") -> "SquareClass":
        g = gcd(self.rep, other.rep)
        return SquareClass.trusted(self.rep * other.rep // (g * g))

    def __str__(self) -> str:
        return str(self.rep)


class AlgebraClass(BaseModel):
    """An element of A*/(A*)^2 for the split algebra A = Q x Q x Q.

    Component j is indexed by the 2-torsion point T_j = (e_j, 0).
    """

    model_config = ConfigDict(frozen=True)

    components: Tuple[SquareClass, SquareClass, SquareClass]

    @classmethod
    def from_reps(cls, r1: int, r2: int, r3: int) -> "AlgebraClass":
        return cls(components=(SquareClass(rep=r1), SquareClass(rep=r2), SquareClass(rep=r3)))

    @classmethod
    def identity(cls) -> "AlgebraClass":
        one = SquareClass.trusted(1)
        return cls.model_construct(components=(one, one, one))

    @property
    def reps(self) -> Tuple[int, int, int]:
        return (self.components[0].rep, self.components[1].rep, self.components[2].rep)

    @property
    def norm(self) -> SquareClass:
        return self.components[0] * self.components[1] * self.components[2]

    @property
    def is_trivial(self) -> bool:
        return all(c.is_trivial for c in self.components)

    def __mul__(self, other: "AlgebraClass") -> "AlgebraClass":
        a, b = self.components, other.components
        return AlgebraClass.model_construct(components=(a[0] * b[0], a[1] * b[1], a[2] * b[2]))

    def __str__(self) -> str:
        return "(" + ", ".join(str(r) for r in self.reps) + ")"


class Curve2T(BaseModel):
    """Elliptic curve y^2 = (x - e1)(x - e2)(x - e3) with distinct integer roots.

    Use :func:`selmer_pairing.descent.new_curve` to build one; it rejects
    repeated roots with an InvalidInputError and sorts the roots.
    """

    model_config = ConfigDict(frozen=True)

    roots: Tuple[int, int, int]

    @model_validator(mode="after")
    def _check_distinct(self) -> "Curve2T":
        if len(set(self.roots)) != 3:
            raise ValueError(f"roots must be pairwise distinct, got {self.roots}")
        return self

    @property
    def a2(self) -> int:
        e1, e2, e3 = self.roots
        return -(e1 + e2 + e3)

    @property
    def a4(self) -> int:
        e1, e2, e3 = self.roots
        return e1 * e2 + e1 * e3 + e2 * e3

    @property
    def a6(self) -> int:
        e1, e2, e3 = self.roots
        return -e1 * e2 * e3

    @property
    def discriminant(self) -> int:
        e1, e2, e3 = self.roots
        return 16 * ((e1 - e2) * (e1 - e3) * (e2 - e3)) ** 2

    @property
    def label(self) -> str:
        return ",".join(str(e) for e in self.roots)

    def rhs(self, x: Fraction) -> Fraction:
        """F(x) = (x - e1)(x - e2)(x - e3)."""
        e1, e2, e3 = self.roots
        return (x - e1) * (x - e2) * (x - e3)

    def derivative_at_root(self, j: int) -> int:
        """F'(e_j) for j in {0, 1, 2}."""
        ej = self.roots[j]
        out = 1
        for k, ek in enumerate(self.roots):
            if k != j:
                out *= ej - ek
        return out

    @property
    def torsion_points(self) -> List["CurvePoint"]:
        return [CurvePoint(x=Fraction(e), y=Fraction(0)) for e in self.roots]

    def __str__(self) -> str:
        return f"y^2 = x^3 + ({self.a2})x^2 + ({self.a4})x + ({self.a6})"


class CurvePoint(BaseModel):
    """A point of E(Q) or E(Q_v): the point at infinity, or affine (x, y)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    x: Optional[Fraction] = None
    y: Optional[Fraction] = None

    @field_validator("x", "y", mode="before")
    @classmethod
    def _coerce(cls, v: Any) -> Any:
        return _as_fraction(v)

    @model_validator(mode="after")
    def _check_shape(self) -> "CurvePoint":
        if (self.x is None) != (self.y is None):
            raise ValueError("affine points need both coordinates")
        return self

    @classmethod
    def infinity(cls) -> "CurvePoint":
        return cls()

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    @property
    def naive_height(self) -> int:
        if self.x is None:
            return 0
        return max(abs(self.x.numerator), self.x.denominator)

    def __str__(self) -> str:
        if self.is_infinity:
            return "O"
        return f"({self.x}, {self.y})"


class SelmerStatus(str, Enum):
    """Status of a square-class triple with respect to S^2(Q, E)."""

    CANDIDATE = "candidate"
    SELMER = "selmer"
    RATIONAL_POINT_IMAGE = "rational-point-image"


class SelmerElement(BaseModel):
    """A triple of square classes (d1, d2, d3), a candidate or member of S^2(Q, E)."""

    model_config = ConfigDict(frozen=True)

    classes: AlgebraClass
    status: SelmerStatus = SelmerStatus.CANDIDATE

    @classmethod
    def from_reps(cls, d1: int, d2: int, d3: int, status: SelmerStatus = SelmerStatus.CANDIDATE) -> "SelmerElement":
        return cls(classes=AlgebraClass.from_reps(d1, d2, d3), status=status)

    @property
    def reps(self) -> Tuple[int, int, int]:
        return self.classes.reps

    @property
    def satisfies_norm_condition(self) -> bool:
        return self.classes.norm.is_trivial

    @property
    def is_trivial(self) -> bool:
        return self.classes.is_trivial

    def __mul__(self, other: "SelmerElement") -> "SelmerElement":
        status = SelmerStatus.CANDIDATE
        if self.status != SelmerStatus.CANDIDATE and other.status != SelmerStatus.CANDIDATE:
            status = SelmerStatus.SELMER
        return SelmerElement(classes=self.classes * other.classes, status=status)

    def __str__(self) -> str:
        return str(self.classes)


class SelmerGroup(BaseModel):
    """S^2(Q, E) given by an F2-basis.

    Attributes:
        curve: The curve.
        basis: F2-independent Selmer elements.
        support: Sign marker -1 followed by the primes allowed in the classes.
    """

    model_config = ConfigDict(frozen=True)

    curve: Curve2T
    basis: List[SelmerElement]
    support: List[int]

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def vector(self, classes: AlgebraClass) -> int:
        """Bitmask of (d1, d2) over the support; d3 is determined by the norm condition."""
        from .arith import class_vector

        n = len(self.support)
        return class_vector(classes.reps[0], self.support) | (class_vector(classes.reps[1], self.support) << n)

    def coordinates(self, classes: AlgebraClass) -> Optional[List[int]]:
        """Coordinates of classes in the basis, or None if outside the span."""
        from .arith import span_coordinates

        return span_coordinates([self.vector(b.classes) for b in self.basis], self.vector(classes))

    def contains(self, classes: AlgebraClass) -> bool:
        if not classes.norm.is_trivial:
            return False
        from .arith import in_span

        try:
            return in_span([self.vector(b.classes) for b in self.basis], self.vector(classes))
        except ValueError:
            return False

    def element(self, coordinates: List[int]) -> SelmerElement:
        """The element with the given F2 coordinates in the basis."""
        out = AlgebraClass.identity()
        for bit, b in zip(coordinates, self.basis):
            if bit:
                out = out * b.classes
        return SelmerElement(classes=out, status=SelmerStatus.SELMER)

    def elements(self) -> List[SelmerElement]:
        """All 2^dimension elements, in binary-counting order of coordinates."""
        n = self.dimension
        return [self.element([(mask >> i) & 1 for i in range(n)]) for mask in range(1 << n)]
