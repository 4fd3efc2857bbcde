"""Regenerate the frozen kernel-norm references used in tests/test_oracle.py.

High-precision mpmath route, independent of the scipy quadrature in
``mfstable.oracle``: each unit gap between filter nodes is split at its
midpoint and mapped from the singular end with ``s - p = t^q``, which makes
the integrand bounded; tails use ``s = edge +- 1/u``. Slow (minutes).
"""

import time

import mpmath as mp

mp.mp.dps = 30


def kernel_norm(alpha, H, a, unit=False):
    """``(int |sum_p a_p atom(|p - s|)|^alpha ds)^(1/alpha)`` to ~25 digits."""
    alpha = mp.mpf(alpha)
    d = mp.mpf(H) - 1 / alpha
    K = len(a) - 1

    def atom(x):
        if unit:
            return mp.log(x) / mp.pi if d == 0 else mp.expm1(d * mp.log(x)) / (mp.pi * d)
        return x**d

    def G(s):
        return sum(ap * atom(abs(p - s)) for p, ap in enumerate(a))

    e = d * alpha if d < 0 else mp.mpf(0)  # local exponent of |G|^alpha
    q = 1 / (1 + e)

    def roots(lo, hi, N=300):
        xs = [lo + (hi - lo) * k / N for k in range(1, N)]
        v = [G(x) for x in xs]
        return [mp.findroot(G, (x0, x1), solver="illinois")
                for x0, x1, v0, v1 in zip(xs, xs[1:], v, v[1:]) if v0 * v1 < 0]

    def g_off(end, sgn, dl):
        # atom at ``end`` taken from dl exactly, so no cancellation near the node
        tot = mp.mpf(0)
        for p, ap in enumerate(a):
            tot += ap * atom(dl if p == end else abs(end + sgn * dl - p))
        return abs(tot) ** alpha

    def mapped(end, sgn, cuts, top):
        tp = [mp.mpf(0)] + [c ** (1 / q) for c in cuts] + [top ** (1 / q)]
        return mp.quad(lambda t: g_off(end, sgn, t**q) * q * t ** (q - 1), tp)

    total = mp.mpf(0)
    for p in range(K):
        lo, hi = mp.mpf(p), mp.mpf(p + 1)
        mid = (lo + hi) / 2
        rs = roots(lo, hi)
        for end, sgn in ((lo, 1), (hi, -1)):
            L = abs(mid - end)
            cuts = sorted(abs(r - end) for r in rs if (r - end) * sgn > 0 and abs(r - end) < L)
            total += mapped(end, sgn, cuts, L)
    for end, sgn in ((mp.mpf(K), 1), (mp.mpf(0), -1)):
        rs = roots(end + sgn * mp.mpf("1e-9"), end + sgn * 60, 3000)
        total += mapped(end, sgn, sorted(abs(r - end) for r in rs if abs(r - end) < 1), mp.mpf(1))
        up = [mp.mpf(0)] + sorted(1 / abs(r - end) for r in rs if abs(r - end) > 1) + [mp.mpf(1)]
        total += mp.quad(lambda u: abs(G(end + sgn / u)) ** alpha / u**2, up)
    return total ** (1 / alpha)


if __name__ == "__main__":
    cases = [((a, H), [-1, 3, -3, 1], False) for a, H in
             [(1.2, 0.2), (0.7, 0.05), (1.5, 0.8), (0.5, 0.3), (1.9, 0.95)]]
    cases += [((2, 0.3), [-1, 1], False), ((2, 0.7), [-1, 1], False),
              ((1.5, 0.5), [1, -2, 1], True)]
    for (alpha, H), a, unit in cases:
        t = time.time()
        r = kernel_norm(alpha, H, a, unit)
        print(f"alpha={alpha} H={H} a={a} unit={unit}: {mp.nstr(r, 22)} ({time.time() - t:.0f} s)",
              flush=True)
