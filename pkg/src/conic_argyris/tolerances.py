"""Numerical tolerances shared by the library, the CLI and the test-suite.

Algebraic identities that are exact in exact arithmetic (reproduction, C1
continuity, interpolation conditions) are checked at ``IDENTITY_RTOL``.
"""

IDENTITY_RTOL = 1e-8
BOUNDARY_RTOL = 1e-9
UNISOLVENCE_MIN_SV = 1e-8

ON_CURVE_TOL = 1e-10
GRAD_EPS = 1e-12
UNIT_VECTOR_TOL = 1e-12
QUOTIENT_Q_EPS = 1e-10

ARC_VANISH_TOL = 1e-8
CURVED_QUAD_TOL = 1e-11

ORDER_SLACK = 0.5
