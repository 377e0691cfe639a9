"""High-precision reference values used as frozen expectations in the Rust tests.

Everything here is computed with mpmath at 30 significant digits, directly from
integral definitions where possible, so it is independent of the Rust code path.
Run: python3 scripts/oracle_values.py
"""
import mpmath as mp

mp.mp.dps = 30


def hyp(a, b, c, z):
    return mp.hyp2f1(a, b, c, z)


def consts(h1, h2):
    h1 = mp.mpf(h1)
    h2 = mp.mpf(h2)
    b11 = mp.beta(mp.mpf(3) / 2 - h1, mp.mpf(3) / 2 - h1)
    b2 = mp.beta(mp.mpf(3) / 2 - h1, 2 * h2 - 1)
    d = {}
    d["c"] = (mp.gamma(2 - 2 * h1) * mp.cos(mp.pi * (1 - h1)) * h2 * (2 * h2 - 1)) / (
        mp.pi * h1 * (2 * h1 - 1) * mp.gamma(mp.mpf(3) / 2 - h1) ** 2
    )
    d["D1"] = 2 * (1 - h1) * b11
    d["D2"] = (1 - h2) * b11
    d["D3"] = 2 * (h2 - h1) * b2
    d["D4"] = (h1 - mp.mpf(1) / 2) * (mp.mpf(3) / 2 - h1) / (2 * h2 - h1 + mp.mpf(1) / 2) * b2
    d["D5"] = (h1 - mp.mpf(1) / 2) * b2
    alpha = 2 * h2 - h1 - mp.mpf(1) / 2
    F2at1 = hyp(1 + 2 * h2 - 2 * h1, mp.mpf(3) / 2 - h1, 4 - 2 * h1, 1)
    F5at1 = hyp(2 * h2 - 2 * h1, 2 * h2 - 1, 2 * h2 - h1 + mp.mpf(1) / 2, 1)
    d["F1(1)"] = hyp(2 - 2 * h2, mp.mpf(3) / 2 - h1, 3 - 2 * h1, 1)
    d["F2(1)"] = F2at1
    d["F5(1)"] = F5at1
    d["Xi"] = (d["D3"] + d["D5"]) - d["D5"] * F5at1
    # A from its definition D2 F2(1) + (H1-1/2) D2 Phi2(1), Phi2(1) by quadrature
    # y = 1 - t^(1/alpha) removes the (1-y)^(alpha-1) endpoint singularity
    with mp.workdps(50):
        head = mp.quad(lambda y: (1 - (1 - y) ** (alpha - 1)) / y ** (h1 + mp.mpf(1) / 2), [0, mp.mpf(1) / 2])
        tail = mp.quad(
            lambda t: (1 - t ** ((alpha - 1) / alpha)) / (1 - t ** (1 / alpha)) ** (h1 + mp.mpf(1) / 2)
            * t ** (1 / alpha - 1) / alpha,
            [0, (mp.mpf(1) / 2) ** alpha],
        )
    phi2_1 = F2at1 * (head + tail)
    d["A"] = d["D2"] * F2at1 + (h1 - mp.mpf(1) / 2) * d["D2"] * phi2_1
    d["B"] = (h1 - mp.mpf(1) / 2) * mp.beta(alpha, 1 + 2 * h1 - 2 * h2)
    d["C"] = (mp.mpf(3) / 2 + h1 - 2 * h2) * mp.beta(mp.mpf(3) / 2 - h1, 1 + 2 * h1 - 2 * h2)
    d["ell"] = d["C"] * d["Xi"]
    return d


def psi_def(h1, h2, u, s):
    h1, h2 = mp.mpf(h1), mp.mpf(h2)

    def g2(uu):
        return mp.quad(lambda t: (uu - t) ** (mp.mpf(1) / 2 - h1) * t ** (mp.mpf(1) / 2 - h1) * (s - t) ** (2 * h2 - 2), [0, uu / 2, uu])

    return mp.diff(g2, u)


def rho_def(h1, h2, u, s):
    h1, h2 = mp.mpf(h1), mp.mpf(h2)

    def ii(uu):
        return mp.quad(lambda t: (uu - t) ** (mp.mpf(1) / 2 - h1) * t ** (mp.mpf(1) / 2 - h1) * (t - s) ** (2 * h2 - 2), [s, (s + uu) / 2, uu])

    phi = mp.diff(ii, u)
    tau = -(h1 - mp.mpf(1) / 2) * mp.quad(
        lambda t: (u - t) ** (-mp.mpf(1) / 2 - h1) * t ** (mp.mpf(1) / 2 - h1) * (s - t) ** (2 * h2 - 2), [0, s / 2, s]
    )
    return phi + tau


def model(h1, h2, T):
    h1, h2, T = mp.mpf(h1), mp.mpf(h2), mp.mpf(T)
    d = consts(h1, h2)
    half = mp.mpf(1) / 2
    alpha = 2 * h2 - h1 - half
    F1 = lambda z: hyp(2 - 2 * h2, 1.5 - h1, 3 - 2 * h1, z)
    F2 = lambda z: hyp(1 + 2 * h2 - 2 * h1, 1.5 - h1, 4 - 2 * h1, z)
    F3 = lambda z: hyp(h1 - half, 1.5 - h1, 2 * h2 - h1 + half, 1 - z)
    F4 = lambda z: hyp(2 * h2 - 2 * h1 + 1, 2 * h2 - 1, 2 * h2 - h1 + 1.5, 1 - z)
    F5 = lambda z: hyp(2 * h2 - 2 * h1, 2 * h2 - 1, 2 * h2 - h1 + half, z)

    def psi(u, s):
        return d["D1"] * u ** (1 - 2 * h1) * s ** (2 * h2 - 2) * F1(u / s) + d["D2"] * u ** (2 - 2 * h1) * s ** (h1 - 1.5) * (s - u) ** (alpha - 1) * F2(u / s)

    def rho(u, s):
        z = s / u
        return (
            (u - s) ** (alpha - 1) * u ** (-h1 - half) * (d["D3"] * u + d["D5"] * s) * F3(z)
            + d["D4"] * u ** (-2 * h2) * s ** alpha * (u - s) ** alpha * F4(z)
            - d["D5"] * u ** (1 - 2 * h2) * s ** alpha * (u - s) ** (alpha - 1) * F5(z)
        )

    def K(u, s):
        u, s = mp.mpf(u), mp.mpf(s)
        if s < u:
            base = u ** (2 * h1 - 1) * rho(u, s)
            integ = mp.quad(lambda t: (base - t ** (2 * h1 - 1) * rho(t, s)) / (t - u) ** (h1 + half), [u, u + (T - u) / 8, T])
            return u ** (h1 - half) * (T - u) ** (half - h1) * rho(u, s) + (h1 - half) * u ** (half - h1) * integ
        base = u ** (2 * h1 - 1) * psi(u, s)
        phi_int = mp.quad(lambda t: (base - t ** (2 * h1 - 1) * psi(t, s)) / (t - u) ** (h1 + half), [u, (u + s) / 2, s])
        lam_int = mp.quad(lambda t: (t - u) ** (-half - h1) * t ** (2 * h1 - 1) * rho(t, s), [s, s + (T - s) / 8, T])
        return (
            u ** (h1 - half) * (s - u) ** (half - h1) * psi(u, s)
            + (h1 - half) * u ** (half - h1) * phi_int
            - (h1 - half) * u ** (half - h1) * lam_int
        )

    def L(u, s):
        gamma = 2 * h2 - 2 * h1
        return K(u, s) / abs(mp.mpf(u) - mp.mpf(s)) ** (gamma - 1)

    return d, psi, rho, K, L


def beta_integrals(mu, nu, k=20):
    """Unit and half-line integrals of Lemma-type power differences, graded by v^k."""
    mu, nu = mp.mpf(mu), mp.mpf(nu)
    edge = mp.mpf(2) ** (-1 / mp.mpf(k))
    left = mp.quad(lambda v: (v**k) ** (-mu - 1) * mp.expm1(-nu * mp.log1p(-v**k)) * k * v ** (k - 1), [0, edge])
    right = mp.quad(lambda w: (1 - w**k) ** (-mu - 1) * mp.expm1(-nu * k * mp.log(w)) * k * w ** (k - 1), [0, edge])
    f = lambda x: x ** (-mu - 1) * (-mp.expm1(-nu * mp.log1p(x)))
    head = mp.quad(lambda v: f(v**k) * k * v ** (k - 1), [0, 1])
    tail = mp.quad(lambda v: f(v ** (-k / mu)) * (k / mu) * v ** (-k / mu - 1), [0, mp.mpf(1) / 2, 1])
    return left + right, head + tail


if __name__ == "__main__":
    print("gamma(1.8) =", mp.nstr(mp.gamma(1.8), 20))
    print("beta(0.9,1.1) =", mp.nstr(mp.beta(0.9, 1.1), 20))
    print("2F1(1,1;2;0.5) =", mp.nstr(hyp(1, 1, 2, 0.5), 20))
    for (a, b, c, z) in [(0.6, 0.9, 1.8, 0.3), (0.6, 0.9, 1.8, 0.75), (0.6, 0.9, 1.8, 0.999), (1.8, 0.9, 2.8, 0.97),
                         (0.1, 0.9, 1.2, 0.6), (0.4, 0.4, 1.6, 0.5 + 1e-9)]:
        print(f"2F1({a},{b};{c};{z}) =", mp.nstr(hyp(a, b, c, z), 20))
    for (h1, h2) in [(0.6, 0.7), (0.7, 0.85)]:
        d = consts(h1, h2)
        print(f"H=({h1},{h2})")
        for k, v in d.items():
            print(f"  {k} = {mp.nstr(v, 20)}")
    print("g_rhs(0.5; H1=0.6, T=1) =", mp.nstr(mp.mpf(0.25) ** (-0.1) / (mp.mpf(1.2) * mp.beta(0.9, 1.1)), 20))
    print("psi_def(0.3,0.7) =", mp.nstr(psi_def(0.6, 0.7, mp.mpf("0.3"), mp.mpf("0.7")), 20))
    print("rho_def(0.7,0.3) =", mp.nstr(rho_def(0.6, 0.7, mp.mpf("0.7"), mp.mpf("0.3")), 20))
    d, psi, rho, K, L = model(0.6, 0.7, 1)
    print("psi_hyp(0.3,0.7) =", mp.nstr(psi(mp.mpf("0.3"), mp.mpf("0.7")), 20))
    print("rho_hyp(0.7,0.3) =", mp.nstr(rho(mp.mpf("0.7"), mp.mpf("0.3")), 20))
    for (u, s) in [("0.7", "0.3"), ("0.3", "0.7"), ("0.5", "0.45"), ("0.2", "0.9")]:
        print(f"L(0.6,0.7,T=1)({u},{s}) =", mp.nstr(L(mp.mpf(u), mp.mpf(s)), 20))
    d, psi, rho, K, L = model(0.7, 0.85, 1)
    print("L(0.7,0.85,T=1)(0.7,0.3) =", mp.nstr(L(mp.mpf("0.7"), mp.mpf("0.3")), 20))
    print("L(0.7,0.85,T=1)(0.3,0.7) =", mp.nstr(L(mp.mpf("0.3"), mp.mpf("0.7")), 20))
    d, psi, rho, K, L = model(0.6, 0.7, 5)
    print("L(0.6,0.7,T=5)(3.1,1.2) =", mp.nstr(L(mp.mpf("3.1"), mp.mpf("1.2")), 20))
    print("L(0.6,0.7,T=5)(1.2,3.1) =", mp.nstr(L(mp.mpf("1.2"), mp.mpf("3.1")), 20))
    for (m, n) in [("0.1", "0.3"), ("0.2", "0.7"), ("0.45", "0.55"), ("0.9", "0.05")]:
        with mp.workdps(40):
            unit, half = beta_integrals(m, n)
        print(f"beta integrals ({m},{n}) =", mp.nstr(unit, 20), mp.nstr(half, 20))
    for (a, b, c) in [(0.6, 0.9, 1.8), (1.2, 0.9, 2.8), (0.2, 0.4, 0.9), (0.5, 0.45, 1.0)]:
        print(f"2F1({a},{b};{c};1) =", mp.nstr(hyp(a, b, c, 1), 20))
        for k in range(4, 9):
            print(f"  z = 1 - 1e-{k}:", mp.nstr(hyp(a, b, c, 1 - mp.mpf(10) ** (-k)), 20))
