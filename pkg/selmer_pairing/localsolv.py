"""Local solvability of the 2-coverings x - e_j = c_j * w_j^2.

A covering has a point over Q_v iff some x in Q_v (or x = infinity) makes
every (x - e_j) / c_j a square, zero allowed. At the real place this is
exact sign analysis on the four intervals cut out by the roots. At a prime
p the x-line is split into the far region v(x) < -m and residue discs
a + p^k Z_p, refined until the square class of every c_j (x - e_j) is
constant on the disc. Solvable regions double as certificates and as the
seed for local point construction.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, Tuple

from .arith import padic_split
from .exceptions import PrecisionExhaustedError
from .metrics import record_local_solvability
from .models import Place
from .symbols import is_local_square

logger = logging.getLogger(__name__)

REGION_DISC = "disc"
REGION_ROOT = "root"
REGION_FAR = "far"
REGION_INTERVAL = "interval"


@dataclass(frozen=True)
class SolvableRegion:
    """A region of the x-line over which the covering certainly has points.

    kind:
        disc     every c_j (x - e_j) is a nonzero square on a + p^k Z_p
        root     the disc contains e_j for j = root_index; the other two are squares
        far      v(x) < -level and c_1 x is a square there
        interval the real interval (lower, upper); None marks an infinite end
    """

    kind: str
    centre: Fraction = Fraction(0)
    level: int = 0
    root_index: Optional[int] = None
    lower: Optional[Fraction] = None
    upper: Optional[Fraction] = None

    def describe(self) -> str:
        if self.kind == REGION_INTERVAL:
            lo = "-inf" if self.lower is None else str(self.lower)
            hi = "+inf" if self.upper is None else str(self.upper)
            return f"interval({lo}, {hi})"
        if self.kind == REGION_FAR:
            return f"far(v(x) < {-self.level})"
        if self.kind == REGION_ROOT:
            return f"root(e{(self.root_index or 0) + 1}, {self.centre} + p^{self.level})"
        return f"disc({self.centre} + p^{self.level})"


def hensel_margin(p: int) -> int:
    """Relative precision beyond which 1 + t is a square in Q_p."""
    return 3 if p == 2 else 1


def _val(q: Fraction, p: int) -> int:
    return padic_split(q, p)[0]


def _real_regions(roots: Sequence[int], coeffs: Sequence[int]) -> Iterator[SolvableRegion]:
    ordered = sorted(roots)
    bounds: List[Tuple[Optional[Fraction], Optional[Fraction]]] = [
        (None, Fraction(ordered[0])),
        (Fraction(ordered[0]), Fraction(ordered[1])),
        (Fraction(ordered[1]), Fraction(ordered[2])),
        (Fraction(ordered[2]), None),
    ]
    for lower, upper in bounds:
        if lower is None:
            sample = upper - 1  # type: ignore[operator]
        elif upper is None:
            sample = lower + 1
        else:
            sample = (lower + upper) / 2
        if all(c * (sample - e) > 0 for e, c in zip(roots, coeffs)):
            yield SolvableRegion(kind=REGION_INTERVAL, lower=lower, upper=upper)


def _padic_regions(roots: Sequence[int], coeffs: Sequence[int], p: int, precision: int) -> Iterator[SolvableRegion]:
    m = hensel_margin(p)
    place = Place.finite(p)

    # far region: c_j x ~ c_j c_1 * square, so c1*c2 and c1*c3 must be squares
    if is_local_square(coeffs[0] * coeffs[1], place) and is_local_square(coeffs[0] * coeffs[2], place):
        yield SolvableRegion(kind=REGION_FAR, level=m)

    discs: List[Tuple[Fraction, int]] = [(Fraction(0), -m)]
    exhausted = False
    while discs:
        refined: List[Tuple[Fraction, int]] = []
        for centre, level in discs:
            squares = {}
            dead = False
            for j, (e, c) in enumerate(zip(roots, coeffs)):
                offset = centre - e
                if offset != 0 and _val(offset, p) + m <= level:
                    if is_local_square(c * offset, place):
                        squares[j] = True
                    else:
                        dead = True
                        break
            if dead:
                continue
            if len(squares) == 3:
                yield SolvableRegion(kind=REGION_DISC, centre=centre, level=level)
                continue
            if len(squares) == 2:
                j0 = next(j for j in range(3) if j not in squares)
                offset = centre - roots[j0]
                if offset == 0 or _val(offset, p) >= level:
                    yield SolvableRegion(kind=REGION_ROOT, centre=centre, level=level, root_index=j0)
                    continue
            if level >= precision:
                exhausted = True
                continue
            step = Fraction(p) ** level
            refined.extend((centre + t * step, level + 1) for t in range(p))
        discs = refined

    if exhausted:
        raise PrecisionExhaustedError(
            f"local solvability at p={p} undecided for coefficients {tuple(coeffs)}",
            place=str(p),
            precision=precision,
        )


def solvable_regions(
    roots: Sequence[int], coeffs: Sequence[int], place: Place, precision: int
) -> Iterator[SolvableRegion]:
    """Yield certified solvable regions of x - e_j = c_j w_j^2 over Q_v, in search order.

    Raises PrecisionExhaustedError after the last region if some disc was left
    undecided at ``precision``.
    """
    if place.is_real:
        return _real_regions(roots, coeffs)
    assert place.prime is not None
    return _padic_regions(roots, coeffs, place.prime, precision)


def collect_regions(
    roots: Sequence[int], coeffs: Sequence[int], place: Place, precision: int, limit: int = 16
) -> List[SolvableRegion]:
    """Up to ``limit`` solvable regions; exhaustion only raises when none was found."""
    found: List[SolvableRegion] = []
    try:
        for region in solvable_regions(roots, coeffs, place, precision):
            found.append(region)
            if len(found) >= limit:
                break
    except PrecisionExhaustedError:
        if not found:
            raise
    return found


def is_locally_solvable(roots: Sequence[int], coeffs: Sequence[int], place: Place, precision: int) -> bool:
    """Certified verdict; PrecisionExhaustedError when undecided at ``precision``."""
    try:
        verdict = next(iter(solvable_regions(roots, coeffs, place, precision)), None) is not None
    except PrecisionExhaustedError:
        record_local_solvability("exhausted")
        raise
    record_local_solvability("solvable" if verdict else "unsolvable")
    return verdict
