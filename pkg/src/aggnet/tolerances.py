"""Numerical tolerances shared across the package."""

# signal-counting identity sum(w) == sum(w^2) in the float backend
IDENTITY_RTOL = 1e-8
IDENTITY_ATOL = 1e-12

# Gram matrices with reciprocal condition number below this are treated as singular
SINGULAR_RCOND = 1e-12

# stationary distribution by repeated squaring
STATIONARY_TOL = 1e-12
STATIONARY_MAX_SQUARINGS = 10_000

# quadrature for expected utility
QUAD_NODES = 201
QUAD_TOL = 1e-10
QUAD_MAX_NODES = 201 * 2**4

# gamma_inf limit proxy warns when |v_n - v_{n-K}| exceeds this
WELFARE_CONVERGENCE_TOL = 1e-6


def close(a: float, b: float, rtol: float = IDENTITY_RTOL, atol: float = IDENTITY_ATOL) -> bool:
    return abs(a - b) <= max(atol, rtol * max(abs(a), abs(b)))
