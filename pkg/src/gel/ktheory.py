"""Integer Smith normal form and the K-groups of a finite graph algebra.

K-groups come from the integer matrix I - A^t built on the adjacency
matrix A: the zeroth group is its cokernel, the first its kernel.  The
Smith form is computed with full unimodular transforms over arbitrary
precision integers, with least-absolute-value pivoting to keep the
intermediate entries small, and is re-verified by multiplication before
being returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ValidationError
from .graphs import Graph, validate


@dataclass(frozen=True)
class SNFResult:
    diag: tuple[int, ...]
    U: tuple[tuple[int, ...], ...]
    V: tuple[tuple[int, ...], ...]


def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _matmul(A, B):
    rows = len(A)
    inner = len(B)
    cols = len(B[0]) if B else 0
    out = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        for t in range(inner):
            a = A[i][t]
            if a:
                row_b = B[t]
                row_o = out[i]
                for j in range(cols):
                    row_o[j] += a * row_b[j]
    return out


def _det(M) -> int:
    """Bareiss fraction-free determinant; exact for integer matrices."""
    n = len(M)
    if n == 0:
        return 1
    A = [list(map(Fraction, row)) for row in M]
    sign = 1
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            sign = -sign
        for r in range(c + 1, n):
            factor = A[r][c] / A[c][c]
            for j in range(c, n):
                A[r][j] -= factor * A[c][j]
    prod = Fraction(sign)
    for i in range(n):
        prod *= A[i][i]
    assert prod.denominator == 1
    return int(prod)


def smith_normal_form(M) -> SNFResult:
    """Exact Smith normal form with transforms U M V = D.

    D is diagonal with nonnegative entries in a divisibility chain, and
    both transforms are unimodular.  The result is verified by
    re-multiplication before it is returned.
    """
    A = [list(map(int, row)) for row in M]
    m = len(A)
    n = len(A[0]) if m else 0
    U = _identity(m)
    V = _identity(n)

    def row_op(i, j, q):
        # row i minus q times row j
        A[i] = [a - q * b for a, b in zip(A[i], A[j])]
        U[i] = [a - q * b for a, b in zip(U[i], U[j])]

    def col_op(i, j, q):
        for row in A:
            row[i] -= q * row[j]
        for row in V:
            row[i] -= q * row[j]

    def row_swap(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def col_swap(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def row_neg(i):
        A[i] = [-a for a in A[i]]
        U[i] = [-a for a in U[i]]

    t = 0
    while t < min(m, n):
        # least absolute nonzero entry in the remaining block as pivot
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        if best[0] != t:
            row_swap(t, best[0])
        if best[1] != t:
            col_swap(t, best[1])
        if A[t][t] < 0:
            row_neg(t)
        dirty = False
        for i in range(t + 1, m):
            if A[i][t]:
                q = A[i][t] // A[t][t]
                row_op(i, t, q)
                if A[i][t]:
                    dirty = True
        for j in range(t + 1, n):
            if A[t][j]:
                q = A[t][j] // A[t][t]
                col_op(j, t, q)
                if A[t][j]:
                    dirty = True
        if dirty:
            continue
        # enforce the divisibility chain before moving on
        stuck = False
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if A[i][j] % A[t][t]:
                    row_op(t, i, -1)
                    stuck = True
                    break
            if stuck:
                break
        if stuck:
            continue
        t += 1

    diag = tuple(A[i][i] for i in range(min(m, n)))
    result = SNFResult(
        diag,
        tuple(tuple(row) for row in U),
        tuple(tuple(row) for row in V),
    )
    _verify_snf(M, result, m, n)
    return result


def _verify_snf(M, res: SNFResult, m: int, n: int) -> None:
    prod = _matmul(_matmul([list(r) for r in res.U], [list(map(int, r)) for r in M]),
                   [list(r) for r in res.V])
    for i in range(m):
        for j in range(n):
            want = res.diag[i] if i == j and i < len(res.diag) else 0
            assert prod[i][j] == want, "transform product does not match the diagonal"
    for d, e in zip(res.diag, res.diag[1:]):
        assert d >= 0 and e >= 0
        if d == 0:
            assert e == 0, "divisibility chain broken"
        else:
            assert e % d == 0, "divisibility chain broken"
    assert abs(_det(res.U)) == 1 and abs(_det(res.V)) == 1, "transforms not unimodular"


@dataclass(frozen=True)
class AbelianGroup:
    """Finitely generated abelian group as torsion orders plus a free rank."""

    torsion: tuple[int, ...]
    free_rank: int

    @property
    def is_trivial(self) -> bool:
        return not self.torsion and self.free_rank == 0

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts += [f"Z/{d}" for d in self.torsion]
        return " ⊕ ".join(parts) if parts else "0"


def k_groups(g: Graph) -> tuple[AbelianGroup, AbelianGroup]:
    """K0 and K1 of the graph algebra via the matrix I - A^t.

    K0 is the cokernel (torsion orders are the invariant factors above 1,
    free rank the number of zero factors), K1 the kernel, which is free of
    rank equal to the nullity.
    """
    if not validate(g).no_sinks:
        raise ValidationError("K-group computation requires a graph without sinks")
    adj = g.adjacency()
    n = len(g.vertices)
    M = [[(1 if i == j else 0) - adj[j][i] for j in range(n)] for i in range(n)]
    snf = smith_normal_form(M)
    torsion = tuple(d for d in snf.diag if d > 1)
    zeros = sum(1 for d in snf.diag if d == 0)
    return AbelianGroup(torsion, zeros), AbelianGroup((), zeros)
