"""Independent reference values frozen into the unit tests.

Run with python3; needs mpmath and scipy. Every value here is computed without
the C++ code: closed forms in high precision, 1-D iterations and scipy.
"""
import math

import mpmath as mp
from scipy import stats

mp.mp.dps = 40


def laplace_exact(eps, w):
    # E exp(-eps w (1 + sin theta)) over a full period.
    return mp.e ** (-eps * w) * mp.besseli(0, eps * w)


def core(am, eps):
    return mp.mpf(am) ** 1.5 * mp.sqrt(mp.pi / (2 * 4 * mp.pi ** 2 * eps))


def c2(am, eps):
    return 1 / (2 ** mp.mpf(am) * core(am, eps)) ** (1 / mp.mpf(am))


def const_a(am, eps, slice_):
    return slice_ / (4 * core(am, eps) ** (1 / mp.mpf(am)))


def t_alpha(x, a):
    return x * (1 + (2 * x) ** a) if x <= 0.5 else 2 * x - 1


def left_inverse(y, a):
    return mp.findroot(lambda x: x * (1 + (2 * x) ** a) - y, (mp.mpf(0), mp.mpf(0.5)),
                       solver="bisect")


def xn_constant_alpha(a, n):
    x = mp.mpf(0.5)
    for _ in range(n - 1):
        x = left_inverse(x, a)
    return x


def mean_field(am, eps, n):
    def rate(t):
        w = -mp.log(2) - t
        g = mp.e ** (-eps * w) * mp.besseli(0, eps * w)
        return 1 / (mp.e ** (am * (mp.log(2) + t)) * g)

    top = mp.log(0.5)
    steps = lambda t: mp.quad(rate, [t, top])
    t = mp.findroot(lambda t: steps(t) - n, top - 10, tol=1e-30)
    return mp.e ** t


def theorem_scale(am, a, c):
    p = 1 / mp.mpf(am)
    return a * abs(mp.mpf(c)) ** p * mp.gamma(1 - p) * mp.cos(mp.pi / (2 * am))


def stable_cdf(p, c, beta, x):
    # Gil-Pelaez inversion of exp(-c|t|^p (1 - i beta sgn t tan(p pi/2))).
    tan = mp.tan(p * mp.pi / 2)
    cf = lambda t: mp.e ** (-c * t ** p * (1 - 1j * beta * tan))
    f = lambda t: mp.im(mp.e ** (-1j * t * x) * cf(t)) / t
    return mp.mpf(0.5) - mp.quad(f, [0, 1, 5, mp.inf]) / mp.pi


def main():
    print("laplace exact am=.75 eps=.1:",
          {w: float(laplace_exact(0.1, w)) for w in (1, 10, 100, 1e4)})
    for am, eps in ((0.75, 0.1), (0.6, 0.1)):
        print(f"C2 am={am} eps={eps}:", float(c2(am, eps)),
              "A(slice=1):", float(const_a(am, eps, 1)))
    print("left inverse a=1 y=1/2:", float((mp.sqrt(5) - 1) / 4))
    print("left inverse a=.5 y=.1:", float(left_inverse(mp.mpf("0.1"), mp.mpf("0.5"))))
    print("X_n constant a=.5:", {n: float(xn_constant_alpha(mp.mpf("0.5"), n)) for n in (2, 10, 100)})
    for am, n in ((0.6, 1e4), (0.75, 1e3)):
        x = mean_field(am, 0.1, n)
        scale = (n / mp.sqrt(mp.log(n))) ** (1 / mp.mpf(am))
        print(f"mean field am={am} n={n}: x={float(x)} ratio_verbatim={float(scale * x / c2(am, 0.1))}"
              f" ratio_two_sided={float(scale * x * 2 ** (1 / mp.mpf(am)) / c2(am, 0.1))}")
    print("theorem scale am=.75 A=.4 c=-.23:", float(theorem_scale(0.75, 0.4, -0.23)))
    print("gamma(-1/3):", math.gamma(-1 / 3), "gamma(2.5):", math.gamma(2.5))
    for p, c, beta, xs in ((1.6, 1.0, 1.0, (-2, -1, 0, 1, 3)), (4 / 3, 1.0, 1.0, (0,)),
                           (1.5, 1.0, -1.0, (0,)), (1.5, 0.5, 0.3, (-1, 0.5))):
        for x in xs:
            mpv = float(stable_cdf(mp.mpf(p), mp.mpf(c), mp.mpf(beta), mp.mpf(x)))
            sp = stats.levy_stable.cdf(x, p, beta, scale=c ** (1 / p))
            print(f"stable cdf p={p:.4f} c={c} beta={beta} x={x}: {mpv:.12f} scipy {sp:.8f}")
    print("normal cdf x=1 var=2:", float(mp.ncdf(1 / mp.sqrt(2))))
    # Decorrelation: omega(1-omega) has Fourier coefficients -1/(2 pi^2 k^2), k != 0.
    print("quad corr N=1,2:", [float(sum(2 * (1 / (2 * mp.pi ** 2 * (4 ** N * k) ** 2)) *
                                         (1 / (2 * mp.pi ** 2 * k ** 2)) for k in range(1, 20000)))
                               for N in (1, 2)], "vs 16^-N/180:", [16 ** -1 / 180, 16 ** -2 / 180])


if __name__ == "__main__":
    main()
