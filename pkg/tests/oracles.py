"""Reference values computed independently of hopfkit.

FROZEN holds the numbers the tests compare against; ``derive()`` recomputes
every entry symbolically with sympy so that test_oracles.py can confirm the
frozen table has not drifted.  Nothing here imports hopfkit.
"""

import math

FROZEN = {
    # d/dx of (1 + x)/(1 - x) at 0
    "quotient_jet": [1.0, 2.0],
    # f = (1 - x)/(1 - x + x^2/2), the k = 2 reduction with zero coefficients
    "f_half": 0.8,
    "f_one": 0.0,
    "b_closed_form_at_0": [1.0, -1.0],          # [b_0, b_1]
    # factorization d^3 + a2 d^2 + a1 d + a0 = (d^2 + b1 d + b0)(d + f), f = 1, f' = 0
    "b_zero_coeffs": [1.0, -1.0],
    "b_a2_three": [-2.0, 2.0],
    # barrier parameters for C = 1 (and b - a = 1)
    "gamma": 3.0,
    "delta": 0.9 * math.log(3.0) / 3.0,
    "lambda": 1.0 + (1.0 + math.sqrt(5.0)) / 2.0,
    "theta": 3.0,
    "eta": 0.9 * math.log(4.0) / 6.0,
    # c_0 for K = z4 + z2^2, u = x, v = 0 at x = 1: int_0^1 2 t dt
    "c0_square": 1.0,
    # sharp family n = 3, alpha = 1/2
    "lambda3_half": 1.0 / 14400.0,
    "u3_at_one": -1.0 / 14400.0,
    "u3_third_at_one": -1.0 / 120.0,
    # RK4 global error ratio when h halves
    "rk4_ratio": 16.0,
}


def derive() -> dict:
    import sympy as sp

    x, t = sp.symbols("x t")
    out = {}

    q = (1 + x) / (1 - x)
    out["quotient_jet"] = [float(q.subs(x, 0)), float(sp.diff(q, x).subs(x, 0))]

    f = (1 - x) / (1 - x + x ** 2 / 2)
    assert sp.simplify(sp.diff(f, x, 2) - (3 * f * sp.diff(f, x) - f ** 3)) == 0
    out["f_half"] = float(f.subs(x, sp.Rational(1, 2)))
    out["f_one"] = float(f.subs(x, 1))

    def factor_b(a2, a1, fexpr):
        b0, b1 = sp.symbols("b0 b1")
        # (D^2 + b1 D + b0)(D + f) = D^3 + (f + b1) D^2 + (2 f' + b1 f + b0) D + ...
        sol = sp.solve([fexpr + b1 - a2, 2 * sp.diff(fexpr, x) + b1 * fexpr + b0 - a1], [b0, b1], dict=True)[0]
        return [float(sol[b0].subs(x, 0)), float(sol[b1].subs(x, 0))]

    out["b_closed_form_at_0"] = factor_b(0, 0, f)
    out["b_zero_coeffs"] = factor_b(0, 0, sp.Integer(1))
    out["b_a2_three"] = factor_b(3, 0, sp.Integer(1))

    C = 1
    g = max(sp.solve(t ** 2 - C * t - 2 * C, t)) + 1
    out["gamma"] = float(g)
    out["delta"] = float(sp.Rational(9, 10) * sp.log(3) / g)
    out["lambda"] = float(max(sp.solve(t ** 2 - C * t - C, t)) + 1)
    th = max(sp.solve(t ** 2 - C * t - (1 + 1) * C, t)) + 1  # b - a = 1
    out["theta"] = float(th)
    out["eta"] = float(sp.Rational(9, 10) * sp.log(4) / (2 * th))

    # segment s(t) = v + t (u - v); dK/dz2 = 2 z2 evaluated on it, times u - v
    out["c0_square"] = float(sp.integrate(2 * (t * 1), (t, 0, 1)))

    n, alpha = 3, sp.Rational(1, 2)
    p = n / (1 - alpha)
    beta = n * alpha / (1 - alpha)
    lam = sp.prod([beta + j for j in range(1, n + 1)]) ** (1 / (alpha - 1))
    out["lambda3_half"] = float(lam)
    assert sp.simplify(lam - (sp.factorial(n) / sp.factorial(2 * n)) ** 2) == 0
    xp = sp.symbols("xp", positive=True)
    u = -lam * xp ** p
    out["u3_at_one"] = float(u.subs(xp, 1))
    out["u3_third_at_one"] = float(sp.diff(u, xp, 3).subs(xp, 1))
    assert sp.simplify(sp.diff(u, xp, 3) + sp.sqrt(-u)) == 0

    out["rk4_ratio"] = float(2 ** 4)
    return out
