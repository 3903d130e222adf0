"""Stable-manifold graph of the cubic saddle fixture by high-precision shooting.

Dynamics in the diagonal frame (a = 0.1, alpha_k = 1/(k+2)):
    z1' = (1 - alpha) z1 - alpha * 2a z1 z2
    z2' = (1 + alpha) z2 - alpha * a z1^2
phi(x) is the z2(0) whose trajectory stays bounded; found by bisection on the
sign of z2 when the orbit leaves |z| <= delta (or after `steps`).
"""
import mpmath as mp

mp.mp.dps = 40
A = mp.mpf("0.1")
DELTA = mp.mpf("0.1")


def side(x, y, steps):
    z1, z2 = mp.mpf(x), mp.mpf(y)
    for k in range(steps):
        al = mp.mpf(1) / (k + 2)
        z1, z2 = (1 - al) * z1 - al * 2 * A * z1 * z2, (1 + al) * z2 - al * A * z1 * z1
        if z1 * z1 + z2 * z2 > DELTA * DELTA:
            break
    return z2 >= 0


def phi(x, steps=4000, bracket=mp.mpf("0.05")):
    lo, hi = -bracket, bracket
    s_lo = side(x, lo, steps)
    assert s_lo != side(x, hi, steps)
    for _ in range(70):
        mid = (lo + hi) / 2
        if side(x, mid, steps) == s_lo:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


if __name__ == "__main__":
    for x in ["0.05", "-0.05", "0.03", "0.01"]:
        print(x, mp.nstr(phi(mp.mpf(x)), 20))
