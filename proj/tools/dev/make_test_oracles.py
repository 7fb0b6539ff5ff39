#!/usr/bin/env python3
"""Generate frozen high-precision oracle values for the unit tests.

Writes tests/oracle_pins.inc.  Values are computed with 50-digit
arithmetic (mpmath) and emitted as C++ double literals.

Run from the repository root: python3 tools/dev/make_test_oracles.py
"""
import mpmath as mp

mp.mp.dps = 50

out = []
out.append("// Frozen high-precision reference values for unit tests.")
out.append("// Generated by tools/dev/make_test_oracles.py (50-digit arithmetic).")
out.append("// Do not edit by hand.")
out.append("")

# inverse standard normal CDF on a dyadic grid p = k/1024, k = 1..1023
grid = []
for k in range(1, 1024):
    p = mp.mpf(k) / 1024
    x = mp.sqrt(2) * mp.erfinv(2 * p - 1)
    grid.append((k, x))
out.append("// inverse normal CDF at p = k/1024")
out.append("struct NormalInvPin { int k; double x; };")
out.append("static constexpr NormalInvPin kNormalInvGrid[1023] = {")
for k, x in grid:
    out.append("    {%d, %s}," % (k, mp.nstr(x, 17)))
out.append("};")
out.append("")

# tail / spot pins
spots = [mp.mpf("0.975"), mp.mpf("1e-10"), mp.mpf("1e-12"), mp.mpf("0.5"),
         mp.mpf("1e-6"), mp.mpf("0.3")]
out.append("// spot values: {p, inverse normal CDF at p}")
out.append("static constexpr double kNormalInvSpots[%d][2] = {" % len(spots))
for p in spots:
    x = mp.sqrt(2) * mp.erfinv(2 * p - 1)
    out.append("    {%s, %s}," % (mp.nstr(p, 17), mp.nstr(x, 17)))
out.append("};")
out.append("")

# Matern covariance, nu = 2, lambda = 0.3, sigma^2 = 1
nu = mp.mpf(2)
lam = mp.mpf("0.3")
def matern(r):
    if r == 0:
        return mp.mpf(1)
    z = mp.sqrt(2 * nu) * r / lam
    return (mp.mpf(2) ** (1 - nu) / mp.gamma(nu)) * z ** nu * mp.besselk(nu, z)
rs = ["0.01", "0.05", "0.1", "0.3", "0.5", "1.0", "2.0"]
out.append("// Matern covariance pins, nu=2, corr_length=0.3, sigma2=1: {r, C(r)}")
out.append("static constexpr double kMaternNu2Pins[%d][2] = {" % len(rs))
for r in rs:
    out.append("    {%s, %s}," % (r, mp.nstr(matern(mp.mpf(r)), 17)))
out.append("};")
out.append("")

# lognormal moment matching: mean 8020, stddev 400
mean, sd = mp.mpf(8020), mp.mpf(400)
s2 = mp.log(1 + (sd / mean) ** 2)
zbar = mp.log(mean) - s2 / 2
out.append("// lognormal moment matching for mean=8020, stddev=400")
out.append("static constexpr double kLognormalSigma2Pin = %s;" % mp.nstr(s2, 17))
out.append("static constexpr double kLognormalZbarPin = %s;" % mp.nstr(zbar, 17))
out.append("")

with open("tests/oracle_pins.inc", "w") as f:
    f.write("\n".join(out) + "\n")
print("wrote tests/oracle_pins.inc")
print("sigma_g^2 =", mp.nstr(s2, 12), " zbar =", mp.nstr(zbar, 12))
print("PhiInv(0.975) =", mp.nstr(mp.sqrt(2)*mp.erfinv(2*mp.mpf('0.975')-1), 12))
print("PhiInv(1e-10) =", mp.nstr(mp.sqrt(2)*mp.erfinv(2*mp.mpf('1e-10')-1), 12))
print("matern(0.3) =", mp.nstr(matern(mp.mpf('0.3')), 12))
