#!/usr/bin/env python3
"""High-precision oracle for the frozen constants in the test suite.

Recomputes, with mpmath at 60 significant digits, every closed-form value
that the Rust tests assert against (schedule sizes, reweighting factors,
concentration-bound evaluations, combination counts). Run it to regenerate
the table embedded in crates/core/tests/acceptance.rs; the tests compare
module outputs against these values at relative 1e-9.

Usage: python3 scripts/oracle.py
"""

import json
from math import comb

import mpmath as mp

mp.mp.dps = 60


def ceil_int(x):
    return int(mp.ceil(x))


def clamped_ln(x):
    return mp.log(max(mp.mpf(x), mp.e))


def rounds(n, theta):
    return ceil_int(mp.log(n) / mp.mpf(theta) ** 2)


def repeats(r, delta, delta0):
    return ceil_int(mp.log(5 * mp.mpf(r) / mp.mpf(delta)) / mp.log(1 / mp.mpf(delta0)))


def combination_size(n, theta, d_star):
    t2 = mp.mpf(theta) ** 2
    cap = 260**2 * (4 * d_star + 2) / t2
    return ceil_int(min(mp.log(n) / t2, cap))


def alpha(theta):
    th = mp.mpf(theta)
    return mp.log((mp.mpf(1) / 2 + th) / (mp.mpf(1) / 2 - th)) / 2


def z_at_exact_edge(theta):
    th = mp.mpf(theta)
    return 2 * mp.sqrt((mp.mpf(1) / 2 - th) * (mp.mpf(1) / 2 + th))


def required_rounds(n, theta):
    return ceil_int(mp.log(2 * n) / mp.mpf(theta) ** 2)


def maurer_pontil(l_emp, d, n, delta):
    l_emp, n, delta = mp.mpf(l_emp), mp.mpf(n), mp.mpf(delta)
    c = d * clamped_ln(20 * mp.e * n / d) + mp.log(1 / delta)
    return l_emp + mp.sqrt(18 * l_emp * c / n) + 15 * c / n


def bernstein(l_pop, n, delta):
    l_pop, n, delta = mp.mpf(l_pop), mp.mpf(n), mp.mpf(delta)
    return l_pop + mp.sqrt(2 * l_pop * mp.log(1 / delta) / (3 * n)) + 2 * mp.log(1 / delta) / n


def uniform_convergence(d, n, delta):
    n, delta = mp.mpf(n), mp.mpf(delta)
    return 62 * mp.sqrt((2 * d + 1) / n) + mp.sqrt(2 * mp.log(1 / delta) / n)


def rademacher(d, n):
    return 31 * mp.sqrt(mp.mpf(d) / n)


def average_class_vc_bound(t, d):
    return 4 * t * d * mp.log(4 * mp.e * t)


def main_theorem(err_star, d, d_star, theta, n, delta):
    t = combination_size(n, theta, d_star)
    d_prime = average_class_vc_bound(t, d)
    err_star, n, delta = mp.mpf(err_star), mp.mpf(n), mp.mpf(delta)
    gamma = d_prime * clamped_ln(10 * mp.e * n / d_prime)
    value = (
        err_star
        + 10 * mp.sqrt(err_star * (gamma + mp.log(5 / delta)) / n)
        + 182 * (gamma + 4 * mp.log(5 / delta)) / n
    )
    return t, d_prime, value


def lower_bound(d, gamma0, big_l, m, c3, c4):
    gamma0, big_l, m = mp.mpf(gamma0), mp.mpf(big_l), mp.mpf(m)
    min_m = c3 * d / (gamma0**2 * big_l * (1 - 2 * big_l) ** 2)
    excess = mp.sqrt(c4 * big_l * d / (gamma0**2 * m * mp.log(2 / gamma0)))
    return min_m, excess


def update_distribution_example():
    # n = 2 uniform, h correct on example 0 only, alpha = ln 2
    a = mp.log(2)
    w0 = mp.mpf(1) / 2 * mp.exp(-a)
    w1 = mp.mpf(1) / 2 * mp.exp(a)
    z = w0 + w1
    return z, w0 / z, w1 / z


def fmt(x):
    return mp.nstr(mp.mpf(x), 20)


def main():
    out = {}

    out["alpha_theta_0_30"] = fmt(alpha("0.3"))
    out["alpha_theta_0_25"] = fmt(alpha("0.25"))
    out["alpha_theta_1e9"] = fmt(alpha("1e-9"))
    out["z_edge_theta_0_25"] = fmt(z_at_exact_edge("0.25"))

    z, d0, d1 = update_distribution_example()
    out["update_example_z"] = fmt(z)
    out["update_example_d0"] = fmt(d0)
    out["update_example_d1"] = fmt(d1)

    out["rounds_n100_theta_0_25"] = rounds(100, "0.25")
    out["repeats_r74_delta_0_1_delta0_0_5"] = repeats(74, "0.1", "0.5")
    out["combination_size_n100"] = combination_size(100, "0.25", 1)
    out["rounds_n8_theta_0_5"] = rounds(8, "0.5")
    out["repeats_r9_delta_0_1_delta0_0_99"] = repeats(9, "0.1", "0.99")
    out["rounds_n8_theta_0_45"] = rounds(8, "0.45")
    out["repeats_r11_delta_0_1_delta0_0_5"] = repeats(11, "0.1", "0.5")
    out["weak_calls_n8_m0_1"] = rounds(8, "0.45") * repeats(rounds(8, "0.45"), "0.1", "0.5") * 4
    out["required_rounds_n1_theta_0_4"] = required_rounds(1, "0.4")
    out["required_rounds_n4_theta_0_45"] = required_rounds(4, "0.45")

    out["maurer_l0_d1_n1000_delta_0_05"] = fmt(maurer_pontil(0, 1, 1000, "0.05"))
    out["maurer_l0_d1_n1000_delta_1"] = fmt(maurer_pontil(0, 1, 1000, 1))
    out["bernstein_l_0_1_n1000_delta_0_05"] = fmt(bernstein("0.1", 1000, "0.05"))
    out["bernstein_l0_n1000_delta_0_05"] = fmt(bernstein(0, 1000, "0.05"))
    out["uc_d1_n1e4_delta_0_5"] = fmt(uniform_convergence(1, 10000, "0.5"))
    out["uc_d1_n1e4_delta_1"] = fmt(uniform_convergence(1, 10000, 1))
    out["rademacher_d4_n400"] = fmt(rademacher(4, 400))

    out["avg_vc_bound_t2_d1"] = fmt(average_class_vc_bound(2, 1))
    out["avg_vc_bound_t1_d1"] = fmt(average_class_vc_bound(1, 1))

    t, d_prime, value = main_theorem("0.1", 1, 1, "0.45", 10000, "0.1")
    out["main_t_n1e4"] = t
    out["main_d_prime_n1e4"] = fmt(d_prime)
    out["main_value_n1e4"] = fmt(value)
    _, _, value0 = main_theorem(0, 1, 1, "0.45", 10000, "0.1")
    out["main_value_err_star_0"] = fmt(value0)

    min_m, excess = lower_bound(1, "0.5", "0.25", 1000, 1, 1)
    out["lower_min_m"] = fmt(min_m)
    out["lower_excess"] = fmt(excess)

    out["combinations_pool4_t3"] = comb(4 + 3 - 1, 3)
    out["combinations_pool16_t11"] = comb(16 + 11 - 1, 11)

    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
