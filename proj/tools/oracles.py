#!/usr/bin/env python3
"""High-precision oracles for the constants frozen into the C++ test suite.

Every [frozen] number in tests/ that is not a hand-checkable identity comes from
this script. Run `python3 tools/oracles.py` and compare against the comments in
the tests. mpmath is used at 40 significant digits; printed at 20.
"""
import mpmath as mp

mp.mp.dps = 40


def phi(x):
    return mp.npdf(x)


def Phi(x):
    return mp.ncdf(x)


def show(name, value, digits=20):
    print(f"{name:58s} = {mp.nstr(mp.mpf(value), digits)}")


print("== normal-CDF values ==")
show("2*Phi(-0.5)", 2 * Phi(mp.mpf("-0.5")))
show("2*Phi(-0.5620)", 2 * Phi(mp.mpf("-0.5620")))

print("\n== Langevin optimal scaling: maximize s^2 * Phi(-s^3) ==")
# First-order condition: 2 s Phi(-s^3) - 3 s^4 phi(s^3) = 0  =>  2 Phi(-s^3) = 3 s^3 phi(s^3)
s0 = mp.findroot(lambda s: 2 * Phi(-(s**3)) - 3 * s**3 * phi(s**3), mp.mpf("0.8"))
show("s0 = argmax s^2 Phi(-s^3)", s0)
show("s0^3", s0**3)
show("acceptance 2*Phi(-s0^3)", 2 * Phi(-(s0**3)))
show("tuned SLA step constant l = 2*s0 (l^3 = 8 s0^3)", 2 * s0)
show("l^3 = 8 s0^3", 8 * s0**3)

print("\n== HMC optimal scaling: maximize sqrt(s) * Phi(-s) ==")
# d/ds [ sqrt(s) Phi(-s) ] = Phi(-s)/(2 sqrt(s)) - sqrt(s) phi(s) = 0 => Phi(-s) = 2 s phi(s)
s0h = mp.findroot(lambda s: Phi(-s) - 2 * s * phi(s), mp.mpf("0.45"))
show("s0 = argmax sqrt(s) Phi(-s)", s0h)
show("acceptance 2*Phi(-s0)", 2 * Phi(-s0h))
show("2*Phi(-0.4250) (quoted-constant cross-check)", 2 * Phi(mp.mpf("-0.4250")))
# step constant for the 0.651 rule: l^2/8 = z where 2 Phi(-z) = 0.651
z651 = mp.findroot(lambda z: 2 * Phi(-z) - mp.mpf("0.651"), mp.mpf("0.45"))
show("z solving 2*Phi(-z)=0.651", z651)
show("l^2 = 8 z (tuned HMC, tau=1)", 8 * z651)
show("l = sqrt(8 z)", mp.sqrt(8 * z651))

print("\n== multi-step efficiency ==")
show("3^(2/3)", mp.mpf(3) ** (mp.mpf(2) / 3))
show("efficiency(3) at t=0: 3^(2/3)/4.426", mp.mpf(3) ** (mp.mpf(2) / 3) / mp.mpf("4.426"))
show("continuous optimum at t=0: 2*1.426", mp.mpf("2.852"))

print("\n== HMC eigenvalue closed form ==")
show("cos(10*acos(0.995))", mp.cos(10 * mp.acos(mp.mpf("0.995"))))

print("\n== power-spectrum partial sums (kappa=1, lambda_i=i) ==")
for d in (100, 1000):
    s = mp.fsum(mp.mpf(i) ** 6 for i in range(1, d + 1)) / mp.mpf(d) ** 7
    show(f"sum_{{i<=d}} i^6 / d^7, d={d}", s)
show("limit 1/7", mp.mpf(1) / 7)

print("\n== tilted 1-d targets ==")
# P(x>0) under pi(x) prop exp(-x^2/2 - 0.5*[x>0])
show("e^-0.5/(1+e^-0.5)", mp.e ** mp.mpf("-0.5") / (1 + mp.e ** mp.mpf("-0.5")))
# kappa = E_pi[x] under pi(x) prop exp(-x^2/2 - phi(x)), phi(x) = -0.5*tanh(x)
w = lambda x: mp.e ** (-(x**2) / 2 + mp.mpf("0.5") * mp.tanh(x))
znorm = mp.quad(w, [-mp.inf, 0, mp.inf])
kappa = mp.quad(lambda x: x * w(x), [-mp.inf, 0, mp.inf]) / znorm
gam = mp.quad(lambda x: x**2 * w(x), [-mp.inf, 0, mp.inf]) / znorm
show("kappa = E_pi[x], phi=-0.5*tanh(x)", kappa)
show("gamma = E_pi[x^2], same target", gam)

print("\n== non-Gaussian sandwich, M=0.1 around 0.574 ==")
show("e^-0.3 * 0.574", mp.e ** mp.mpf("-0.3") * mp.mpf("0.574"))
show("e^+0.3 * 0.574", mp.e ** mp.mpf("0.3") * mp.mpf("0.574"))

print("\n== d=1 SLA h=0.5 acceptance: exact E[1 ^ e^Z] by 2-d quadrature ==")
# lambda^2 = 1, h = 0.5: G = 0.75, Sigma = 0.5, lambdaTilde^2 = 0.875, b = beta = 0.
# x ~ N(0,1), y = G x + sqrt(Sigma) xi, Z = -(1/2)(1 - 0.875)(y^2 - x^2).
G = mp.mpf("0.75")
S = mp.mpf("0.5")
dl = (1 - mp.mpf("0.875")) / 2  # (lambda^2 - lambdaTilde^2)/2


def inner(x):
    f = lambda xi: mp.npdf(xi) * min(mp.mpf(1), mp.e ** (-dl * ((G * x + mp.sqrt(S) * xi) ** 2 - x**2)))
    return mp.quad(f, [-mp.inf, 0, mp.inf])


acc_exact = mp.quad(lambda x: mp.npdf(x) * inner(x), [-mp.inf, 0, mp.inf])
show("E[1 ^ e^Z] exact", acc_exact)
# the normal-limit formula at the same (mu, sigma): mu = T0+T3+T4, sigma^2 = T1^2+...
lam2, lt2 = mp.mpf(1), mp.mpf("0.875")
r = (lam2 - lt2) / lam2
rt = lam2 / lt2
gt = 1 - G
gh = 1 - G**2
T0 = mp.mpf(0)
T1 = mp.mpf(0)
T2 = mp.mpf(0)
T3 = r * gh / 2
T4 = -r * rt * gh / 2
T5 = -r * G * mp.sqrt(rt * gh)
mu = T0 + T3 + T4
sg = mp.sqrt(T1**2 + T2**2 + 2 * T3**2 + 2 * T4**2 + T5**2)
acc_formula = Phi(mu / sg) + mp.e ** (mu + sg**2 / 2) * Phi(-sg - mu / sg)
show("normal-limit formula value", acc_formula)
show("formula bias (formula - exact)", acc_formula - acc_exact)
show("mu (d=1)", mu)
show("sigma (d=1)", sg)

print("\n== misc frozen checks ==")
show("Phi(-0.5) + e^0 * Phi(-0.5) = 2*Phi(-0.5)", 2 * Phi(mp.mpf("-0.5")))
show("sin^2(1.5218...)  [T'=8h, h=sqrt(8z)/10, d=1e4]", mp.sin(8 * mp.sqrt(8 * z651) / 10) ** 2)
show("jump target 2(1-cos(T'))*0.651 at same T'", 2 * (1 - mp.cos(8 * mp.sqrt(8 * z651) / 10)) * mp.mpf("0.651"))
