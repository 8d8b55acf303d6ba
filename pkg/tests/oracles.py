"""Independent high-precision reference implementations for the tests.

Everything here is re-derived from the defining sums and products with
mpmath at 60 digits and shares no code with the package; it is the oracle
side of every dual-route check.
"""

from __future__ import annotations

import mpmath as mp

mp.mp.dps = 60

#: q values x (l, lambda) pairs exercised by the acceptance criteria
Q_VALUES = (0.25, 0.5, 0.9, 1.1, 2.0, 5.0)
L_LAMBDA = ((1.0, 0.0), (2.0, 1.0))
PARAM_TRIPLES = [(q, l, lam) for q in Q_VALUES for (l, lam) in L_LAMBDA]


def q_number(n: int, q) -> mp.mpf:
    """[n]_q by brute-force power sum 1 + q + ... + q^{n-1}."""
    q = mp.mpf(q)
    return mp.fsum(q ** k for k in range(n)) if n else mp.mpf(0)


def q_factorial(n: int, q) -> mp.mpf:
    out = mp.mpf(1)
    for k in range(1, n + 1):
        out *= q_number(k, q)
    return out


def phi(q, l, lam, n: int) -> mp.mpf:
    """Structure function l^2 q^{lambda-n} [n]_q via the brute-force sum."""
    q, l, lam = mp.mpf(q), mp.mpf(l), mp.mpf(lam)
    return l ** 2 * q ** (lam - n) * q_number(n, q)


def scale(q, l, lam) -> mp.mpf:
    return mp.mpf(l) ** 2 * mp.mpf(q) ** mp.mpf(lam)


def norm_eval(q, l, lam, x, terms: int = 300):
    """(N(x), N'(x), N''(x)) by direct term summation."""
    q, x = mp.mpf(q), mp.mpf(x)
    s = scale(q, l, lam)
    v = mp.mpf(0)
    d1 = mp.mpf(0)
    d2 = mp.mpf(0)
    for n in range(terms):
        c = q ** (mp.mpf(n) * (n + 1) / 2) / (s ** n * q_factorial(n, q))
        v += c * x ** n
        if n >= 1:
            d1 += c * n * x ** (n - 1)
        if n >= 2:
            d2 += c * n * (n - 1) * x ** (n - 2)
    return v, d1, d2


def norm_complex(q, l, lam, w, terms: int = 300) -> mp.mpc:
    q = mp.mpf(q)
    s = scale(q, l, lam)
    w = mp.mpc(w)
    return mp.fsum(q ** (mp.mpf(n) * (n + 1) / 2) / (s ** n * q_factorial(n, q)) * w ** n
                   for n in range(terms))


def photon_pdf(q, l, lam, x, n: int, terms: int = 300) -> mp.mpf:
    q, x = mp.mpf(q), mp.mpf(x)
    s = scale(q, l, lam)
    v, _, _ = norm_eval(q, l, lam, x, terms)
    return q ** (mp.mpf(n) * (n + 1) / 2) * x ** n / (s ** n * q_factorial(n, q) * v)


def moment_target(q, l, lam, n: int) -> mp.mpf:
    q = mp.mpf(q)
    return scale(q, l, lam) ** n * q ** (-mp.mpf(n) * (n + 1) / 2) * q_factorial(n, q)
