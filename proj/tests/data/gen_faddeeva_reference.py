"""Regenerates faddeeva_reference.inc: w(z) and Taylor coefficients
w^(j)(z)/j! at 60 significant digits (mpmath), rounded to double.

Run: python3 gen_faddeeva_reference.py > faddeeva_reference.inc
"""
import random

import mpmath as mp

mp.mp.dps = 60
ORDER = 8


def w(z):
    return mp.exp(-z * z) * mp.erfc(-1j * z)


def taylor(z, order):
    d = [w(z), -2 * z * w(z) + 2j / mp.sqrt(mp.pi)]
    for n in range(1, order):
        d.append(-2 * z * d[n] - 2 * n * d[n - 1])
    return [d[n] / mp.factorial(n) for n in range(order + 1)]


def points():
    pts = [complex(1, 1), complex(0, 0), complex(0.5, 0), complex(-3, 0), complex(0, 5), complex(0, -2),
           complex(10, 0.01), complex(-25, 3), complex(40, 30), complex(3.5, -1.2), complex(-0.2, -0.7),
           complex(6, 6), complex(1e-3, 1e-3), complex(49, 0.5)]
    rng = random.Random(20240611)
    while len(pts) < 64:
        r = rng.choice([0.3, 2.0, 6.0, 15.0, 50.0]) * rng.random()
        th = rng.uniform(-0.6, 3.1416 + 0.6)
        pts.append(complex(r * mp.cos(th), r * mp.sin(th)))
    return pts


def fmt(c):
    c = complex(c)
    return f"{{{c.real:.17e}, {c.imag:.17e}}}"


print("// Generated by gen_faddeeva_reference.py; do not edit.")
print(f"// {{z, w(z), w^(j)(z)/j! for j = 1..{ORDER}}}")
for z in points():
    zz = mp.mpc(z.real, z.imag)
    coeffs = taylor(zz, ORDER)
    print("{" + fmt(z) + ", {" + ", ".join(fmt(c) for c in coeffs) + "}},")
