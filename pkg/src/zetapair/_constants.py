"""Transcendental constants used at run time.

All values were computed once with mpmath at 40 significant digits
(``mpmath.euler``, ``mpmath.stieltjes(n)``) and are stored rounded to
double precision.
"""
from fractions import Fraction

EULER_GAMMA = 0.57721566490153286061

# Stieltjes constants gamma_0 .. gamma_12 (mpmath.stieltjes, dps=40).
# zeta(s) = 1/(s-1) + sum_n (-1)^n gamma_n / n! (s-1)^n
STIELTJES = (
    0.5772156649015328606065,
    -0.07281584548367672486059,
    -0.00969036319287231848453,
    0.00205383442030334586616,
    0.002325370065467300057468,
    0.0007933238173010627017533,
    -0.0002387693454301996098724,
    -0.0005272895670577510460741,
    -0.0003521233538030395096021,
    -0.00003439477441808804817791,
    0.0002053328149090647946837,
    0.0002701844395439035266729,
    0.0001672729121051401933535,
)

# Trudgian (2011): |int_{t1}^{t2} S(t) dt| <= 2.067 + 0.059 log t2, t2 > t1 > 168 pi
TURING_A = 2.067
TURING_B = 0.059
TURING_MIN_T = 168 * 3.141592653589793

# Gabcke: |R_k(t)| <= c_k t^{-(2k+3)/4} for t >= 200 after including C_0..C_k
RS_REMAINDER = (0.127, 0.053, 0.011, 0.031, 0.017)


def _bernoulli_even(count):
    """B_2, B_4, ..., B_{2 count} as exact fractions (Akiyama-Tanigawa)."""
    n_max = 2 * count
    out = []
    a = [Fraction(0)] * (n_max + 1)
    for m in range(n_max + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        if m >= 2 and m % 2 == 0:
            out.append(a[0])
    return out


BERNOULLI_EVEN = tuple(_bernoulli_even(20))  # B_2 .. B_40
