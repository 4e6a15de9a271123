"""Report models for descent runs, property verification and corpus scans.

These models are what the CLI serializes. Field order and names of
DescentReport are stable; square classes appear as squarefree integers and
the pairing matrix as rows of 0/1 characters.
"""

from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, model_validator

from .models import SelmerElement


class OutputFormat(str, Enum):
    """Output format of the CLI."""

    TEXT = "text"
    JSON = "json"


class LocalTerm(BaseModel):
    """One factor (f(P_v), M)_v of a pairing value.

    Attributes:
        place: Place label ("inf" or the prime).
        value: +1 or -1.
        f_classes: Square-class representatives of f(P_v).
    """

    place: str
    value: int
    f_classes: Tuple[int, int, int]


class PairingValue(BaseModel):
    """Global pairing value with its local terms over the places used."""

    value: int
    local_terms: List[LocalTerm] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_product(self) -> "PairingValue":
        product = 1
        for term in self.local_terms:
            product *= term.value
        if self.local_terms and product != self.value:
            raise ValueError(f"pairing value {self.value} differs from the product of local terms {product}")
        return self

    @property
    def bit(self) -> int:
        return 0 if self.value == 1 else 1


class PairingMatrix(BaseModel):
    """Basis pairings over F2: entry (i, j) is 0 iff <a_i, a_j> = +1."""

    basis: List[SelmerElement]
    entries: List[List[int]]

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def rank(self) -> int:
        from .arith import matrix_rank

        return matrix_rank(self.entries)

    def is_symmetric(self) -> bool:
        n = self.size
        return all(self.entries[i][j] == self.entries[j][i] for i in range(n) for j in range(n))

    def has_zero_diagonal(self) -> bool:
        return all(self.entries[i][i] == 0 for i in range(self.size))

    def rows(self) -> List[str]:
        return ["".join(str(v) for v in row) for row in self.entries]


class PointImage(BaseModel):
    """A searched rational point and its descent image."""

    point: Tuple[str, str]
    image: Tuple[int, int, int]


class DescentReport(BaseModel):
    """Outcome of a full run on one curve.

    Attributes:
        curve: Roots "e1,e2,e3" in increasing order. Input triples are sorted, and every
            component triple in the report (basis, images, f classes) follows this order.
        discriminant: Discriminant of the curve.
        selmer_basis: Basis of S^2 as representative triples.
        selmer_dimension: dim S^2 over F2.
        point_images: Searched non-torsion points, lowest height first, and their images.
        pairing_matrix: Rows of the pairing matrix as 0/1 strings.
        matrix_rank: Rank of the pairing matrix.
        rank_upper_bound: dim S^2 - 2 - matrix_rank.
        sha2_lower_bound: matrix_rank.
        places_used: Places used by any pairing entry.
        certificates: Local point certificates, keyed "d1,d2,d3@place".
        plain_rank_bound: dim S^2 - 2, the bound without the pairing.
        independent_points: Rank of the searched points' images modulo torsion.
        contradiction: True iff searched points exceed rank_upper_bound.
        second_coverings: Per basis element "d1,d2,d3", the 4-covering system in
            z0..z3, u1..u3, one "... = 0" equation per line.
    """

    curve: str
    discriminant: int
    selmer_basis: List[Tuple[int, int, int]]
    selmer_dimension: int
    point_images: List[PointImage]
    pairing_matrix: List[str]
    matrix_rank: int
    rank_upper_bound: int
    sha2_lower_bound: int
    places_used: List[str]
    certificates: Dict[str, Dict[str, str]]
    plain_rank_bound: int
    independent_points: int
    contradiction: bool = False
    second_coverings: Dict[str, List[str]] = Field(default_factory=dict)


class RunConfig(BaseModel):
    """Configuration of a run or verify invocation.

    Exactly one of ``roots`` and ``ab`` is set; ``ab = (a, b)`` means
    y^2 = x(x - a)(x + b).
    """

    roots: Optional[Tuple[int, int, int]] = None
    ab: Optional[Tuple[int, int]] = None
    height_bound: int = Field(default=10**4, ge=1)
    precision: Optional[int] = Field(default=None, ge=1)
    output_format: OutputFormat = OutputFormat.TEXT
    seed: int = 0
    max_workers: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _exactly_one_curve(self) -> "RunConfig":
        if (self.roots is None) == (self.ab is None):
            raise ValueError("exactly one of roots and ab must be given")
        return self


class PropertyResult(BaseModel):
    """Verdict of one property check.

    Attributes:
        name: Property name.
        passed: Whether every instance passed.
        checked: Number of instances checked.
        details: First failure, or a summary.
    """

    name: str
    passed: bool
    checked: int = 0
    details: Optional[str] = None


class VerifyReport(BaseModel):
    """Property-suite results for one curve."""

    curve: str
    properties: List[PropertyResult]

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.properties)


class ErrorInfo(BaseModel):
    """Error information printed on failure.

    Attributes:
        code: Error code identifier.
        message: Human-readable error message.
        details: Additional error context.
    """

    code: str
    message: str
    details: Optional[str] = None


class CorpusEntry(BaseModel):
    """Scan summary for one corpus curve."""

    curve: str
    selmer_dimension: int
    matrix_rank: int
    plain_rank_bound: int
    rank_upper_bound: int
    independent_points: int
    extended_points: int = 0
    parity_ok: bool = True
    error: Optional[str] = None


class ScanReport(BaseModel):
    """Corpus scan results and the curves where the pairing improved the bound."""

    curves: List[CorpusEntry]
    improved: List[str] = Field(default_factory=list)
