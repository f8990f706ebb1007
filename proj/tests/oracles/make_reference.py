#!/usr/bin/env python3
"""Independent oracle for the frozen reference values in tests/reference_values.hpp.

Evaluates the closed-form gain coefficients, derived optomechanical
parameters, the beyond-RWA mean-field fixed point, the quadrature-lifted
drift blocks and the quadrature noise matrix with mpmath (50 digits) /
sympy, fully separately from the C++ implementation.  Run once; the
emitted header is checked in.

    python3 tests/oracles/make_reference.py > tests/reference_values.hpp
"""

import mpmath as mp
import sympy as sp

mp.mp.dps = 50

HBAR = mp.mpf("1.054571817e-34")   # J s (CODATA 2018)
KB = mp.mpf("1.380649e-23")        # J/K (exact)
C0 = mp.mpf("299792458")           # m/s (exact)
TWO_PI = 2 * mp.pi


# ---------------------------------------------------------------------------
# closed-form atomic steady state and xi coefficients
# ---------------------------------------------------------------------------

def gain_closed_form(p):
    g1, g2 = p["g1"], p["g2"]
    Om, Omp = p["Omega"], p["Omega_p"]
    ga, gb, gc, gd = p["gamma_a"], p["gamma_b"], p["gamma_c"], p["gamma_d"]
    gab, gac, gad = p["gamma_ab"], p["gamma_ac"], p["gamma_ad"]
    gbc, gbd, gcd = p["gamma_bc"], p["gamma_bd"], p["gamma_cd"]
    D1, D2, Dc = p["Delta_1"], p["Delta_2"], p["Delta_c"]
    ra, eta = p["r_a"], p["eta"]

    chi = gab**2 + Dc**2
    chip = gcd**2 + (Dc - D2 - D1) ** 2
    d = 2 * Om**2 * gab * (ga + gb) + chi * gb * ga
    dp = 2 * Omp**2 * gcd * (gc + gd) + gc * gd * chip

    half_m = (1 - eta) / 2
    half_p = (1 + eta) / 2
    Zaa = (2 * Om**2 * gab + gb * chi) * half_m
    Zab = 1j * Om * gb * chi / (gab + 1j * Dc) * half_m
    Zbb = Om**2 * gab * (1 - eta)
    Zcc = (2 * Omp**2 * gcd + gd * chip) * half_p
    Zdd = Omp**2 * gcd * (1 + eta)
    Zcd = 1j * Omp * gd * chip / (gcd + 1j * (Dc - D2 - D1)) * half_p

    A = -(gac + 1j * D2) - Om**2 / (gbc - 1j * (Dc - D2)) - Omp**2 / (gad + 1j * (Dc - D1))
    B = Om * Omp / (gbc - 1j * (Dc - D2)) + Om * Omp / (gad + 1j * (Dc - D1))
    Dden = -(gbd - 1j * D1) - Om**2 / (gad + 1j * (Dc - D1)) - Omp**2 / (gbc - 1j * (Dc - D2))

    den = B**2 - A * Dden
    xi1 = g1**2 * A / den * (ra / dp) * Zdd
    xi2 = g1**2 * A / den * (ra / d) * Zbb
    xi3 = g2**2 * Dden / den * (ra / dp) * Zcc
    xi4 = g2**2 * Dden / den * (ra / d) * Zaa
    xi5 = g1 * g2 * B / den * (ra / d) * Zaa
    xi6 = g1 * g2 * B / den * (ra / dp) * Zcc
    xi7 = g1 * g2 * B / den * (ra / d) * Zbb
    xi8 = g1 * g2 * B / den * (ra / dp) * Zdd

    return dict(chi=chi, chip=chip, d=d, dp=dp,
                Zaa=Zaa, Zab=Zab, Zbb=Zbb, Zcc=Zcc, Zdd=Zdd, Zcd=Zcd,
                A=A, B=B, D=Dden,
                xi=[xi1, xi2, xi3, xi4, xi5, xi6, xi7, xi8])


GAMMA = mp.mpf("3.4e6")

FIG2 = dict(
    g1=TWO_PI * mp.mpf("3e6"), g2=TWO_PI * mp.mpf("3e6"),
    Omega=10 * GAMMA, Omega_p=mp.mpf("0.018") * GAMMA,
    gamma_a=GAMMA, gamma_b=GAMMA, gamma_c=GAMMA, gamma_d=GAMMA,
    gamma_ab=GAMMA, gamma_ac=GAMMA, gamma_ad=GAMMA,
    gamma_bc=GAMMA, gamma_bd=GAMMA, gamma_cd=GAMMA,
    Delta_1=mp.mpf(0), Delta_2=mp.mpf(0), Delta_c=mp.mpf(0),
    r_a=mp.mpf("1.6e6"), eta=mp.mpf(1),
)

GENERIC = dict(
    g1=mp.mpf("2.0e6"), g2=mp.mpf("2.6e6"),
    Omega=mp.mpf("5.5e6"), Omega_p=mp.mpf("3.3e6"),
    gamma_a=mp.mpf("1.1e6"), gamma_b=mp.mpf("2.3e6"),
    gamma_c=mp.mpf("0.7e6"), gamma_d=mp.mpf("1.9e6"),
    gamma_ab=mp.mpf("1.4e6"), gamma_ac=mp.mpf("2.2e6"),
    gamma_ad=mp.mpf("0.9e6"), gamma_bc=mp.mpf("1.7e6"),
    gamma_bd=mp.mpf("2.8e6"), gamma_cd=mp.mpf("1.2e6"),
    Delta_1=mp.mpf("0.6e6"), Delta_2=mp.mpf("-1.1e6"), Delta_c=mp.mpf("0.35e6"),
    r_a=mp.mpf("1.3e6"), eta=mp.mpf("0.3"),
)

FIG4 = dict(
    g1=TWO_PI * mp.mpf("4e6"), g2=TWO_PI * mp.mpf("4e6"),
    Omega=15 * GAMMA, Omega_p=mp.mpf("0.018") * GAMMA,
    gamma_a=GAMMA, gamma_b=GAMMA, gamma_c=GAMMA, gamma_d=GAMMA,
    gamma_ab=GAMMA, gamma_ac=GAMMA, gamma_ad=GAMMA,
    gamma_bc=GAMMA, gamma_bd=GAMMA, gamma_cd=GAMMA,
    Delta_1=mp.mpf(0), Delta_2=mp.mpf(0), Delta_c=mp.mpf(0),
    r_a=mp.mpf("1.6e6"), eta=mp.mpf(1),
)


# ---------------------------------------------------------------------------
# derived optomechanical parameters (mode 1 / mode 2 of the reference cavity)
# ---------------------------------------------------------------------------

def derived_params():
    m = mp.mpf("145e-12")            # 145 ng
    wm = TWO_PI * mp.mpf("3e6")
    gm = TWO_PI * mp.mpf("60e6")
    L1, L2 = mp.mpf("112e-6"), mp.mpf("88.6e-6")
    lam1, lam2 = mp.mpf("810e-9"), mp.mpf("1024e-9")
    nu1 = TWO_PI * C0 / lam1
    nu2 = TWO_PI * C0 / lam2
    G1 = nu1 / L1 * mp.sqrt(HBAR / (m * wm))
    G2 = nu2 / L2 * mp.sqrt(HBAR / (m * wm))
    beta1 = 2 * wm * G1**2 / (gm**2 / 4 + wm**2)
    beta2 = 2 * wm * G2**2 / (gm**2 / 4 + wm**2)
    P = mp.mpf("0.02e-9")
    kap = TWO_PI * mp.mpf("215e3")
    eps1 = mp.sqrt(kap * P / (HBAR * nu1))     # omega_L ~ nu at delta0 << nu
    n_at_03K = 1 / (mp.exp(HBAR * wm / (KB * mp.mpf("0.3"))) - 1)
    return dict(nu1=nu1, nu2=nu2, G1=G1, G2=G2, beta1=beta1, beta2=beta2,
                eps1=eps1, n03=n_at_03K, wm=wm, gm=gm, kap=kap, m=m)


# ---------------------------------------------------------------------------
# beyond-RWA mean-field fixed point and mirror coupling, Fig. 4 conditions
# ---------------------------------------------------------------------------

def fig4_coupling():
    der = derived_params()
    cf = gain_closed_form(FIG4)
    xi = cf["xi"]
    xi11 = mp.conj(xi[0]) - mp.conj(xi[1])
    xi12 = mp.conj(xi[4]) - mp.conj(xi[5])
    xi21 = xi[6] - xi[7]
    xi22 = xi[2] - xi[3]
    kap1 = kap2 = der["kap"]
    kp1 = kap1 - 2 * xi11
    kp2 = kap2 + 2 * xi22
    kcomb = kp1 * kp2 + 4 * xi12 * xi21

    wm = der["wm"]
    delta0 = -wm                      # drive detuning locked to -omega_m
    # pump at omega_L = nu - delta0; P1 = P2 = 0.02 nW
    P = mp.mpf("0.02e-9")
    wL1 = der["nu1"] - delta0
    wL2 = der["nu2"] + delta0         # delta02 = -delta01
    eps1 = mp.sqrt(kap1 * P / (HBAR * wL1))
    eps2 = mp.sqrt(kap2 * P / (HBAR * wL2))
    mu = eps2 / eps1
    eta1, eta2 = xi11, xi22
    b1, b2 = der["beta1"], der["beta2"]

    def alpha1(I1):
        return 1j * (delta0 - b1 * I1) + kap1 / 2 - eta1

    def alpha2(I2):
        return -1j * (delta0 + b2 * I2) + kap2 / 2 + eta2

    I1, I2 = mp.mpf(0), mp.mpf(0)
    for _ in range(400):
        det = alpha1(I1) * mp.conj(alpha2(I2)) + xi12 * mp.conj(xi21)
        nI1 = abs(eps1) ** 2 * abs(mp.conj(alpha2(I2)) + mu * xi12) ** 2 / abs(det) ** 2
        nI2 = abs(eps1) ** 2 * abs(mu * mp.conj(alpha1(I1)) - xi21) ** 2 / abs(det) ** 2
        I1, I2 = (I1 + nI1) / 2, (I2 + nI2) / 2
    det = alpha1(I1) * mp.conj(alpha2(I2)) + xi12 * mp.conj(xi21)
    a1 = eps1 * (mp.conj(alpha2(I2)) + mu * xi12) / det
    a2 = eps1 * (mu * mp.conj(alpha1(I1)) - xi21) / mp.conj(det)

    G1, G2 = der["G1"], der["G2"]
    al1 = 4 * xi12 / kcomb * G1 * G2 * abs(a1) * abs(a2)
    al2 = 4 * xi21 / kcomb * G1 * G2 * abs(a1) * abs(a2)
    return dict(I1=I1, I2=I2, a1=a1, a2=a2, kp1=kp1, kp2=kp2, kcomb=kcomb,
                alpha1=al1, alpha2=al2, mu=mu, xi12=xi12, xi21=xi21,
                xi=xi, der=der, eps1=eps1)


# ---------------------------------------------------------------------------
# symbolic quadrature lift of the mirror fluctuation equations
# ---------------------------------------------------------------------------

def drift_reference():
    """M(t) for generic complex alphas via direct sympy expansion."""
    a1r, a1i, a2r, a2i = sp.symbols("a1r a1i a2r a2i", real=True)
    g1s, g2s, d1s, d2s, ts = sp.symbols("g1 g2 d1 d2 t", real=True)
    al1 = a1r + sp.I * a1i
    al2 = a2r + sp.I * a2i
    q1, p1, q2, p2 = sp.symbols("q1 p1 q2 p2", real=True)
    b1 = (q1 + sp.I * p1) / sp.sqrt(2)
    b2 = (q2 + sp.I * p2) / sp.sqrt(2)

    db1 = (-g1s / 2 * b1
           + al1 * (sp.exp(2 * sp.I * d2s * ts) - sp.exp(-2 * sp.I * d1s * ts)) * b2
           + al1 * (1 - sp.exp(-2 * sp.I * (d1s + d2s) * ts)) * sp.conjugate(b2))
    db2 = (-g2s / 2 * b2
           + al2 * (sp.exp(-2 * sp.I * d2s * ts) - sp.exp(2 * sp.I * d1s * ts)) * b1
           + al2 * (sp.exp(-2 * sp.I * (d1s + d2s) * ts) - 1) * sp.conjugate(b1))

    dq1 = sp.expand((db1 + sp.conjugate(db1)) / sp.sqrt(2))
    dp1 = sp.expand(sp.I * (sp.conjugate(db1) - db1) / sp.sqrt(2))
    dq2 = sp.expand((db2 + sp.conjugate(db2)) / sp.sqrt(2))
    dp2 = sp.expand(sp.I * (sp.conjugate(db2) - db2) / sp.sqrt(2))

    subs = {a1r: sp.Rational(3, 10), a1i: sp.Rational(-7, 10),
            a2r: sp.Rational(-1, 5), a2i: sp.Rational(1, 2),
            g1s: sp.Rational(11, 100), g2s: sp.Rational(23, 100),
            d1s: sp.Rational(-13, 10), d2s: sp.Rational(-21, 10),
            ts: sp.Rational(37, 100)}
    M = sp.zeros(4, 4)
    for i, expr in enumerate((dq1, dp1, dq2, dp2)):
        for j, var in enumerate((q1, p1, q2, p2)):
            M[i, j] = sp.re(sp.simplify(expr.coeff(var)).subs(subs))
    return sp.N(M, 30)


def diffusion_reference(cp):
    """Quadrature noise matrix at t = 0 (Fig. 4 set) by symbolic substitution."""
    der = cp["der"]
    xi = cp["xi"]
    G1, G2 = der["G1"], der["G2"]
    kap = der["kap"]
    N1 = N2 = mp.mpf(1)
    n1 = n2 = mp.mpf(50)
    gm = der["gm"]

    a1c = 2 * cp["kp2"] / cp["kcomb"] * G1 * abs(cp["a1"])
    c1c = 4 * cp["xi12"] / cp["kcomb"] * G1 * abs(cp["a1"])
    a2c = 2 * cp["kp1"] / cp["kcomb"] * G2 * abs(cp["a2"])
    c2c = 4 * cp["xi21"] / cp["kcomb"] * G2 * abs(cp["a2"])

    u1 = mp.re(xi[0]) + kap * N1
    v1 = mp.re(xi[1]) + kap * (N1 + 1)
    u2 = mp.re(xi[3]) + kap * N2
    v2 = mp.re(xi[2]) + kap * (N2 + 1)
    w = mp.conj(xi[5]) + xi[7]

    F1, F1d, F2, F2d, f1, f1d, f2, f2d = sp.symbols(
        "F1 F1d F2 F2d f1 f1d f2 f2d", commutative=False)
    corr = {
        (F1, F1d): 2 * v1, (F1d, F1): 2 * u1,
        (F2, F2d): 2 * v2, (F2d, F2): 2 * u2,
        (F2, F1): w, (F1, F2): w, (F1d, F2d): mp.conj(w), (F2d, F1d): mp.conj(w),
        (f1, f1d): n1 + 1, (f1d, f1): n1,
        (f2, f2d): n2 + 1, (f2d, f2): n2,
    }
    # t = 0: all phase factors equal 1
    Ft1 = a1c * (F1 - F1d) + c1c * (F2d - F2) + sp.sqrt(gm) * f1
    Ft2 = a2c * (F2 - F2d) + c2c * (F1 - F1d) + sp.sqrt(gm) * f2
    Ft1d = mp.conj(a1c) * (F1d - F1) + mp.conj(c1c) * (F2 - F2d) + sp.sqrt(gm) * f1d
    Ft2d = mp.conj(a2c) * (F2d - F2) + mp.conj(c2c) * (F1d - F1) + sp.sqrt(gm) * f2d

    nq1 = (Ft1 + Ft1d) / sp.sqrt(2)
    np1 = sp.I * (Ft1d - Ft1) / sp.sqrt(2)
    nq2 = (Ft2 + Ft2d) / sp.sqrt(2)
    np2 = sp.I * (Ft2d - Ft2) / sp.sqrt(2)

    ops = (F1, F1d, F2, F2d, f1, f1d, f2, f2d)

    def contract(expr):
        expr = sp.expand(expr)
        total = mp.mpc(0)
        for term in sp.Add.make_args(expr):
            cpart, ncpart = term.args_cnc()
            coef = sp.Mul(*cpart)
            if len(ncpart) != 2:
                continue
            key = (ncpart[0], ncpart[1])
            if key in corr:
                cval = complex(sp.N(coef, 30))
                total += mp.mpc(cval.real, cval.imag) * corr[key]
        return total

    vec = (nq1, np1, nq2, np2)
    Dm = [[contract(vec[i] * vec[j]) for j in range(4)] for i in range(4)]
    return Dm


# ---------------------------------------------------------------------------
# emit header
# ---------------------------------------------------------------------------

def fm(x):
    return mp.nstr(mp.mpf(x), 18, strip_zeros=False)


def fc(z):
    z = mp.mpc(z)
    return "{%s, %s}" % (fm(mp.re(z)), fm(mp.im(z)))


def emit_gain(tag, cf):
    print(f"// {tag}")
    for k in ("chi", "chip", "d", "dp", "Zaa", "Zbb", "Zcc", "Zdd"):
        print(f"inline constexpr double {tag}_{k} = {fm(cf[k])};")
    for k in ("Zab", "Zcd", "A", "B", "D"):
        print(f"inline const std::complex<double> {tag}_{k}{fc(cf[k])};")
    for i, v in enumerate(cf["xi"], 1):
        print(f"inline const std::complex<double> {tag}_xi{i}{fc(v)};")
    print()


def main():
    print("// Frozen reference values, generated once by tests/oracles/make_reference.py.")
    print("// Do not edit by hand; regenerate with the script if parameters change.")
    print("#pragma once")
    print("#include <complex>")
    print()
    print("namespace refvals {")
    print()
    emit_gain("fig2", gain_closed_form(FIG2))
    emit_gain("generic", gain_closed_form(GENERIC))

    der = derived_params()
    print("// reference cavity/mirror derived parameters")
    for k in ("nu1", "nu2", "G1", "G2", "beta1", "beta2", "eps1", "n03"):
        print(f"inline constexpr double ref_{k} = {fm(der[k])};")
    print()

    cp = fig4_coupling()
    print("// Fig. 4 operating point: mean fields and mirror-mirror coupling")
    print(f"inline constexpr double fig4_I1 = {fm(cp['I1'])};")
    print(f"inline constexpr double fig4_I2 = {fm(cp['I2'])};")
    print(f"inline constexpr double fig4_mu = {fm(cp['mu'])};")
    for k in ("kp1", "kp2", "kcomb", "alpha1", "alpha2"):
        print(f"inline const std::complex<double> fig4_{k}{fc(cp[k])};")
    print()

    M = drift_reference()
    print("// drift matrix at alpha1 = 0.3 - 0.7i, alpha2 = -0.2 + 0.5i,")
    print("// gamma_m = (0.11, 0.23), delta = (-1.3, -2.1), t = 0.37")
    print("inline constexpr double drift_ref[4][4] = {")
    for i in range(4):
        row = ", ".join(mp.nstr(mp.mpf(str(M[i, j])), 18) for j in range(4))
        print("    {%s}," % row)
    print("};")
    print()

    Dm = diffusion_reference(cp)
    print("// quadrature noise matrix at t = 0, Fig. 4 set, N = 1, n = 50")
    print("inline const std::complex<double> fig4_noise[4][4] = {")
    for i in range(4):
        row = ", ".join(fc(Dm[i][j]) for j in range(4))
        print("    {%s}," % row)
    print("};")
    print()
    print("}  // namespace refvals")


if __name__ == "__main__":
    main()
