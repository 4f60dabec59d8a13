"""Small dense solves in two backends.

``"rational"`` works on :class:`fractions.Fraction` entries and never rounds:
rows are scaled to integers and eliminated fraction-free (Bareiss), so every
intermediate is an exact integer minor.  ``"float"`` uses Cholesky from scipy.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

import numpy as np
from scipy import linalg as sla

from .tolerances import SINGULAR_RCOND

BACKENDS = ("float", "rational")


class SingularSystemError(ArithmeticError):
    pass


class NotPositiveDefiniteError(SingularSystemError):
    pass


def check_backend(backend: str) -> str:
    if backend not in BACKENDS:
        raise ValueError(f"backend must be one of {BACKENDS}, got {backend!r}")
    return backend


def to_fraction_array(a) -> np.ndarray:
    a = np.asarray(a, dtype=object)
    out = np.empty(a.shape, dtype=object)
    for idx, v in np.ndenumerate(a):
        out[idx] = v if isinstance(v, Fraction) else Fraction(v)
    return out


def zeros(shape, backend: str) -> np.ndarray:
    if backend == "float":
        return np.zeros(shape)
    out = np.empty(shape, dtype=object)
    out.fill(Fraction(0))
    return out


def _integer_rows(A, b):
    """Scale each row of ``[A | b]`` by the lcm of its denominators."""
    rows = []
    for arow, bi in zip(A, b):
        entries = [Fraction(x) for x in arow] + [Fraction(bi)]
        m = lcm(*(x.denominator for x in entries))
        rows.append([int(x * m) for x in entries])
    return rows


def bareiss_eliminate(A, b, pivoting: bool = False):
    """Fraction-free forward elimination of ``A x = b``.

    Returns the integer upper-triangular augmented matrix, the pivots in
    order, and the row permutation used.  Without pivoting a zero pivot
    raises :class:`SingularSystemError`.
    """
    M = _integer_rows(A, b)
    n = len(M)
    perm = list(range(n))
    pivots = []
    prev = 1
    for k in range(n):
        if M[k][k] == 0:
            if not pivoting:
                raise SingularSystemError(f"zero pivot at step {k}")
            swap = next((r for r in range(k + 1, n) if M[r][k] != 0), None)
            if swap is None:
                raise SingularSystemError(f"matrix is singular (column {k})")
            M[k], M[swap] = M[swap], M[k]
            perm[k], perm[swap] = perm[swap], perm[k]
        p = M[k][k]
        pivots.append(p)
        for i in range(k + 1, n):
            mik = M[i][k]
            row_i, row_k = M[i], M[k]
            for j in range(k + 1, n + 1):
                # exact division is guaranteed by Sylvester's identity
                row_i[j] = (p * row_i[j] - mik * row_k[j]) // prev
            row_i[k] = 0
        prev = p
    return M, pivots, perm


def _back_substitute(M) -> list[Fraction]:
    n = len(M)
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        s = Fraction(M[i][n])
        for j in range(i + 1, n):
            s -= M[i][j] * x[j]
        x[i] = s / M[i][i]
    return x


def exact_solve(A, b) -> np.ndarray:
    """Solve a nonsingular system exactly (row pivoting allowed)."""
    M, _, _ = bareiss_eliminate(A, b, pivoting=True)
    return np.array(_back_substitute(M), dtype=object)


def exact_spd_solve(A, b) -> tuple[np.ndarray, Fraction]:
    """Exact solve of a symmetric positive-definite system.

    No pivoting is done, so the Bareiss pivots are (positive multiples of)
    the leading principal minors; all of them must be positive.  Returns the
    solution and the smallest pivot.
    """
    M, pivots, _ = bareiss_eliminate(A, b, pivoting=False)
    if min(pivots) <= 0:
        raise NotPositiveDefiniteError(f"non-positive pivot {min(pivots)}")
    return np.array(_back_substitute(M), dtype=object), min(pivots)


def independent_rows(G) -> list[int]:
    """Indices of a maximal linearly independent set of rows of the exact
    Gram matrix ``G``, greedily in order."""
    keep: list[int] = []
    for i in range(len(G)):
        trial = keep + [i]
        sub = [[G[r][c] for c in trial] for r in trial]
        try:
            bareiss_eliminate(sub, [0] * len(trial), pivoting=False)
        except SingularSystemError:
            continue
        keep = trial
    return keep


def float_spd_solve(A, b) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.shape == (1, 1):
        # plain division is exact where sqrt-then-divide twice is not
        if not A[0, 0] > 0:
            raise NotPositiveDefiniteError("1x1 system with non-positive entry")
        return np.asarray(b, dtype=float) / A[0, 0]
    try:
        factor = sla.cho_factor(np.asarray(A, dtype=float), lower=True, check_finite=True)
    except sla.LinAlgError as exc:
        raise NotPositiveDefiniteError(str(exc)) from None
    return sla.cho_solve(factor, np.asarray(b, dtype=float))


def spd_solve(A, b, backend: str) -> np.ndarray:
    if backend == "rational":
        return exact_spd_solve(A, b)[0]
    return float_spd_solve(A, b)


def gram_solve(G, rhs, backend: str):
    """Solve ``G x = rhs`` for a Gram matrix that may be singular.

    Returns ``(x, degenerate)``.  Nonsingular systems go through the SPD path.
    For singular ones the float backend returns the minimum-norm least-squares
    solution and the rational backend a basic solution supported on a maximal
    independent subset; both give the same ``x @ rows`` combination.
    """
    if backend == "rational":
        try:
            return exact_spd_solve(G, rhs)[0], False
        except SingularSystemError:
            keep = independent_rows(G)
            x = np.empty(len(G), dtype=object)
            x.fill(Fraction(0))
            if keep:
                sub = [[G[r][c] for c in keep] for r in keep]
                x[keep] = exact_spd_solve(sub, [rhs[r] for r in keep])[0]
            return x, True
    G = np.asarray(G, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if G.size and np.linalg.cond(G) < 1.0 / SINGULAR_RCOND:
        try:
            return float_spd_solve(G, rhs), False
        except NotPositiveDefiniteError:
            pass
    x, *_ = np.linalg.lstsq(G, rhs, rcond=SINGULAR_RCOND)
    return x, True
