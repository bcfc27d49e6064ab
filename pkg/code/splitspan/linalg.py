"""
Exact linear algebra over the rationals.

Elimination is fraction-free (Bareiss): rows are scaled to integers and
every entry produced afterwards is an integer minor of that matrix.
Fractions only appear in back substitution. Nothing here ever compares
against a tolerance.
"""
import math
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

IntMatrix = List[List[int]]
Vector = List[Fraction]


def _integer_rows(rows: Sequence[Sequence]) -> IntMatrix:
    """Each row multiplied by the lcm of its denominators."""
    out = []
    for row in rows:
        values = [Fraction(v) for v in row]
        scale = math.lcm(*(v.denominator for v in values)) if values else 1
        out.append([int(v * scale) for v in values])
    return out


def echelon(rows: Sequence[Sequence], ncols: Optional[int] = None) -> Tuple[IntMatrix, List[int]]:
    """
    Integer row echelon form by Bareiss elimination.

    Returns the nonzero rows and the pivot column of each of them. The
    division by the previous pivot is always exact.
    """
    m = _integer_rows(rows)
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots: List[int] = []
    previous = 1
    r = 0
    for c in range(ncols):
        if r == len(m):
            break
        pivot_row = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        p = m[r][c]
        for i in range(r + 1, len(m)):
            factor = m[i][c]
            m[i] = [(p * a - factor * b) // previous for a, b in zip(m[i], m[r])]
        previous = p
        pivots.append(c)
        r += 1
    return m[:r], pivots


def _back_substitute(reduced: IntMatrix, pivots: List[int], v: Vector,
                     rhs: Optional[Sequence[int]] = None) -> Vector:
    """Fill the pivot entries of v, last pivot first; free entries are kept."""
    for k in range(len(pivots) - 1, -1, -1):
        row, p = reduced[k], pivots[k]
        s = Fraction(rhs[k]) if rhs is not None else Fraction(0)
        s -= sum(row[j] * v[j] for j in range(p + 1, len(v)))
        v[p] = s / row[p]
    return v


def rank(rows: Sequence[Sequence], ncols: Optional[int] = None) -> int:
    if not rows:
        return 0
    return len(echelon(rows, ncols)[1])


def nullspace(rows: Sequence[Sequence], ncols: int) -> List[Vector]:
    """Basis of {v : rows · v = 0}, one vector per free column."""
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    reduced, pivots = echelon(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        basis.append(_back_substitute(reduced, pivots, v))
    return basis


def solve(rows: Sequence[Sequence], rhs: Sequence) -> Optional[Vector]:
    """
    Unique solution of rows · v = rhs, or None when the system is
    inconsistent or underdetermined.
    """
    if not rows:
        return None
    ncols = len(rows[0])
    augmented = [list(row) + [b] for row, b in zip(rows, rhs)]
    reduced, pivots = echelon(augmented, ncols + 1)
    if ncols in pivots:
        return None
    if len(pivots) != ncols:
        return None
    coefficients = [row[:ncols] for row in reduced]
    return _back_substitute(coefficients, pivots, [Fraction(0)] * ncols, [row[ncols] for row in reduced])


def affine_rank(points: Sequence[Sequence]) -> int:
    """Dimension of the affine hull of the points (-1 for no points)."""
    if not points:
        return -1
    origin = [Fraction(v) for v in points[0]]
    differences = [[Fraction(v) - o for v, o in zip(point, origin)] for point in points[1:]]
    differences = [d for d in differences if any(d)]
    if not differences:
        return 0
    return rank(differences, len(origin))
