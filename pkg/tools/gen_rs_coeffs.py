"""Generate power-series coefficients of the Riemann-Siegel correction terms.

C_k(p) are polynomials in z = p - 1/2 built from derivatives of
Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p).  Output is pasted into
src/zetapair/_rs_coeffs.py.
"""
import mpmath as mp

mp.mp.dps = 60
DEG = 80


def series_mul(a, b):
    out = [mp.mpf(0)] * DEG
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j in range(DEG - i):
            out[i + j] += ai * b[j]
    return out


def series_div(a, b):
    out = [mp.mpf(0)] * DEG
    for n in range(DEG):
        acc = a[n] - sum(out[k] * b[n - k] for k in range(n))
        out[n] = acc / b[0]
    return out


def cos_series(c):
    # cos(c z) as a power series in z
    return [(-1) ** (n // 2) * c ** n / mp.factorial(n) if n % 2 == 0 else mp.mpf(0) for n in range(DEG)]


def sin_series(c):
    return [(-1) ** (n // 2) * c ** n / mp.factorial(n) if n % 2 == 1 else mp.mpf(0) for n in range(DEG)]


def compose_z2(ser):
    out = [mp.mpf(0)] * DEG
    for n, c in enumerate(ser):
        if 2 * n < DEG:
            out[2 * n] = c
    return out


pi = mp.pi
num = [mp.cos(5 * pi / 8) * x + mp.sin(5 * pi / 8) * y
       for x, y in zip(compose_z2(cos_series(2 * pi)), compose_z2(sin_series(2 * pi)))]
den = [-x for x in cos_series(2 * pi)]
psi = series_div(num, den)


def deriv(ser, k):
    out = list(ser)
    for _ in range(k):
        out = [out[n + 1] * (n + 1) for n in range(len(out) - 1)] + [mp.mpf(0)]
    return out


def lin(*terms):
    out = [mp.mpf(0)] * DEG
    for coef, k in terms:
        d = deriv(psi, k)
        for n in range(DEG):
            out[n] += coef * d[n]
    return out


C = [
    lin((1, 0)),
    lin((-1 / (96 * pi**2), 3)),
    lin((1 / (64 * pi**2), 2), (1 / (18432 * pi**4), 6)),
    lin((-1 / (64 * pi**2), 1), (-1 / (3840 * pi**4), 5), (-1 / (5308416 * pi**6), 9)),
    lin((1 / (128 * pi**2), 0), (19 / (24576 * pi**4), 4), (11 / (5898240 * pi**6), 8),
        (1 / (2038431744 * pi**8), 12)),
]

print("RS_COEFFS = (")
for ck in C:
    # truncate once terms are negligible on |z| <= 1/2
    last = max(n for n in range(DEG - 14) if abs(ck[n]) * mp.mpf(0.5) ** n > mp.mpf(10) ** -22)
    print("    (")
    for n in range(last + 1):
        print(f"        {mp.nstr(ck[n], 20, min_fixed=-1, max_fixed=0)},")
    print("    ),")
print(")")
