"""Tabulated values from the literature that computed results are compared against.

Nothing here feeds a computation.  Reports add a discrepancy note whenever a
computed value differs from an entry below.
"""

from fractions import Fraction

F = Fraction

# shift k -> (generic dim H¹, {λ: dim at λ}) as tabulated in the case list
TABLE_CASES = {
    0: (0, {}),
    1: (0, {}),
    2: (1, {F(-1, 2): 0}),
    3: (1, {F(-1): 0}),
    4: (1, {F(-1, 2): 0}),
    5: (0, {F(-4): 1, F(0): 1}),
    6: (0, {}),
}

# cocycle -> {source label: tabulated λ where it becomes a coboundary}
COBOUNDARY_EXCEPTIONS = {
    "J3": {"case list": [F(-1, 2)], "uniqueness statement": [F(-1, 2)]},
    "J4": {"case list": [F(-1)], "uniqueness statement": [F(-1)]},
    "J5": {"case list": [F(-1, 2)], "uniqueness statement": [F(-3, 2)]},
    "J6_0": {"case list": [], "uniqueness statement": []},
    "J6_m4": {"case list": [], "uniqueness statement": []},
}

# tabulated trivializing operator for J3 at λ = -1/2, as coefficients of d^i
COBOUNDARY_WITNESS = {"J3": (F(-1, 2), {2: F(-2)})}
