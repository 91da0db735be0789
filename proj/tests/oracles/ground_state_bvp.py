"""Independent collocation oracle for the radial ground state.

Solves -u'' - (2/r) u' + lam*u = u^p on [0, R] with scipy's collocation
BVP solver (singular-term form, which enforces u'(0) = 0) and the Yukawa
tail condition u'(R) = -(sqrt(lam) + 1/R) u(R).  Integrals are taken with
adaptive Gauss-Kronrod quadrature on the collocation interpolant, and the
whole computation is repeated with a longer interval as a refinement
check.  The printed values are frozen into tests/golden_values.hpp.
"""
import numpy as np
from scipy.integrate import solve_bvp, quad


def solve(lam, p, R=30.0, tol=1e-10):
    S = np.array([[0.0, 0.0], [0.0, -2.0]])
    s = np.sqrt(lam)

    def f(r, y):
        u, v = y
        return np.vstack([v, lam * u - np.abs(u) ** (p - 1) * u])

    def make_bc(Rc):
        return lambda ya, yb: np.array([ya[1], yb[1] + (s + 1.0 / Rc) * yb[0]])

    # continuation: short interval and loose tolerance first, then extend
    Rc = 12.0 / s
    r = np.linspace(0.0, Rc, 400)
    guess_u = 4.3 * lam ** (1.0 / (p - 1.0)) / np.cosh(1.5 * s * r)
    y = np.vstack([guess_u, np.gradient(guess_u, r)])
    sol = solve_bvp(f, make_bc(Rc), r, y, S=S, tol=1e-4, max_nodes=200000)
    assert sol.success, sol.message
    for Rn, t in [(R, 1e-6), (R, 1e-8), (R, tol)]:
        r = np.concatenate([sol.x, np.linspace(sol.x[-1], Rn, 400)[1:]]) if Rn > sol.x[-1] else sol.x
        inside = r <= sol.x[-1]
        uu = np.where(inside, sol.sol(np.minimum(r, sol.x[-1]))[0],
                      sol.y[0, -1] * sol.x[-1] / np.maximum(r, 1e-300) * np.exp(-s * (r - sol.x[-1])))
        vv = np.where(inside, sol.sol(np.minimum(r, sol.x[-1]))[1], -(s + 1.0 / r) * uu)
        sol = solve_bvp(f, make_bc(Rn), r, np.vstack([uu, vv]), S=S, tol=t, bc_tol=1e-14,
                        max_nodes=2000000)
        assert sol.success, sol.message
    return sol


def moments(sol, p, R):
    u = lambda r: sol.sol(r)[0]
    du = lambda r: sol.sol(r)[1]
    brk = np.linspace(0.0, R, 121)

    def integ(g):
        tot = 0.0
        for a, b in zip(brk[:-1], brk[1:]):
            tot += quad(g, a, b, epsabs=0, epsrel=1e-13, limit=200)[0]
        return 4 * np.pi * tot

    return {
        "u0": u(0.0),
        "grad": integ(lambda r: du(r) ** 2 * r * r),
        "l2": integ(lambda r: u(r) ** 2 * r * r),
        "l4": integ(lambda r: u(r) ** 4 * r * r),
        "lp1": integ(lambda r: np.abs(u(r)) ** (p + 1) * r * r),
        "u_at_2": u(2.0),
    }


if __name__ == "__main__":
    for lam, p in [(1.0, 3.0), (1.0, 2.0)]:
        for R in [30.0, 36.0]:
            sol = solve(lam, p, R=R)
            m = moments(sol, p, R)
            print(f"lam={lam} p={p} R={R} nodes={len(sol.x)}: " +
                  " ".join(f"{k}={v:.15g}" for k, v in m.items()))
