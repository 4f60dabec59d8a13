"""Independent reference computations used only by the tests.

Nothing here calls the package's solvers: rational systems use a plain
Gauss-Jordan sweep over ``Fraction`` and the float path uses
``numpy.linalg.solve`` on conditional moments with an explicit sigma^2.
"""

from fractions import Fraction

import numpy as np

from aggnet.netcore import Network


def gauss_jordan(A, b):
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(y)] for row, y in zip(A, b)]
    for col in range(n):
        piv = next(r for r in range(col, n) if M[r][col] != 0)
        M[col], M[piv] = M[piv], M[col]
        p = M[col][col]
        M[col] = [x / p for x in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [M[r][n] for r in range(n)]


def moment_path(net: Network, sigma2: float):
    """Equilibrium rows from conditional moments of observed log-actions:
    beta = 2 Cov^{-1} mu with mu = (2/s2) W 1 and Cov = (4/s2) W W'."""
    n = net.n
    W = np.zeros((n, n))
    betas = []
    for i in range(n):
        W[i, i] = 1.0
        nb = [j - 1 for j in net.neighbors[i]]
        if not nb:
            betas.append(np.zeros(0))
            continue
        obs = W[nb]
        mu = 2.0 / sigma2 * obs.sum(axis=1)
        cov = 4.0 / sigma2 * obs @ obs.T
        beta = 2.0 * np.linalg.solve(cov, mu)
        W[i] += beta @ obs
        betas.append(beta)
    return W, betas


def rational_path(net: Network):
    """Same recursion in exact arithmetic with sigma^2 = 1."""
    n = net.n
    W = [[Fraction(0)] * n for _ in range(n)]
    betas = []
    for i in range(n):
        W[i][i] = Fraction(1)
        nb = [j - 1 for j in net.neighbors[i]]
        if not nb:
            betas.append([])
            continue
        rows = [W[j] for j in nb]
        G = [[sum(a * b for a, b in zip(r1, r2)) * 4 for r2 in rows] for r1 in rows]
        mu = [sum(r) * 2 for r in rows]
        beta = [2 * x for x in gauss_jordan(G, mu)]
        for b, r in zip(beta, rows):
            W[i] = [x + b * y for x, y in zip(W[i], r)]
        betas.append(beta)
    return W, betas


def random_dag(rng: np.random.Generator, n: int, p: float = 0.4) -> Network:
    neighbors = []
    for i in range(1, n + 1):
        nb = [j for j in range(1, i) if rng.random() < p]
        neighbors.append(nb)
    return Network(n, neighbors)
