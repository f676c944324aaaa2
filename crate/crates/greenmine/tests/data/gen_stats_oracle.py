#!/usr/bin/env python3
"""Regenerates stats_oracle.jsonl, the frozen oracle fixtures for the
statistics engine.

Expected values are computed independently of the Rust code: statistics by
direct formula over exact/high-precision arithmetic (mpmath, 50 digits),
p-values through mpmath's regularized incomplete beta / erfc, and the
Mann-Whitney exact tail by full enumeration. Shapiro-Wilk follows the
published Royston AS R94 steps and is cross-checked against
scipy.stats.shapiro before values are frozen.

Run from this directory:  python3 gen_stats_oracle.py
"""

import itertools
import json
import math
import random

import mpmath as mp
from scipy.special import ndtri
import scipy.stats

mp.mp.dps = 50

OUT = "stats_oracle.jsonl"
cases = []


def t_sf_two_sided(t, df):
    """P(|T| >= t) for Student's t with df degrees of freedom."""
    t = mp.mpf(t)
    df = mp.mpf(df)
    if mp.isinf(t):
        return mp.mpf(0)
    x = df / (df + t * t)
    # regularized incomplete beta I_x(df/2, 1/2)
    return mp.betainc(df / 2, mp.mpf(1) / 2, 0, x, regularized=True)


def normal_sf(z):
    return mp.erfc(mp.mpf(z) / mp.sqrt(2)) / 2


def average_ranks(values):
    """Average ranks with ties, as exact fractions over mpf."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [mp.mpf(0)] * len(values)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (mp.mpf(i + 1) + mp.mpf(j + 1)) / 2
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def pearson_r(x, y):
    n = len(x)
    x = [mp.mpf(v) for v in x]
    y = [mp.mpf(v) for v in y]
    mx = mp.fsum(x) / n
    my = mp.fsum(y) / n
    sxy = mp.fsum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = mp.fsum((a - mx) ** 2 for a in x)
    syy = mp.fsum((b - my) ** 2 for b in y)
    return sxy / mp.sqrt(sxx * syy)


def corr_pvalue(r, n):
    one_minus = 1 - r * r
    if one_minus <= 0:
        return mp.mpf(0)
    t = r * mp.sqrt((n - 2) / one_minus)
    return t_sf_two_sided(abs(t), n - 2)


def spearman_case(x, y):
    rx = average_ranks(x)
    ry = average_ranks(y)
    rho = pearson_r(rx, ry)
    p = corr_pvalue(rho, len(x))
    return float(rho), float(p)


def pearson_log_case(x, y):
    lx = [mp.log(mp.mpf(v)) for v in x]
    ly = [mp.log(mp.mpf(v)) for v in y]
    r = pearson_r(lx, ly)
    p = corr_pvalue(r, len(x))
    return float(r), float(p)


def mwu_exact_two_sided(a, b):
    """Exact two-sided p by enumeration over all C(n1+n2, n1) labelings."""
    n1, n2 = len(a), len(b)
    combined = sorted(a + b)
    assert len(set(combined)) == len(combined), "exact path requires no ties"
    total = 0
    counts = {}
    positions = range(n1 + n2)
    for subset in itertools.combinations(positions, n1):
        ranksum = sum(p + 1 for p in subset)
        u = ranksum - n1 * (n1 + 1) // 2
        counts[u] = counts.get(u, 0) + 1
        total += 1
    ranks = {v: i + 1 for i, v in enumerate(combined)}
    r_a = sum(ranks[v] for v in a)
    u_a = r_a - n1 * (n1 + 1) // 2
    u_min = min(u_a, n1 * n2 - u_a)
    tail = sum(c for u, c in counts.items() if u <= u_min)
    p = min(mp.mpf(2) * tail / total, mp.mpf(1))
    return float(u_a), float(p)


def mwu_asymptotic(a, b):
    """Normal approximation with tie correction and continuity correction."""
    n1, n2 = len(a), len(b)
    ranks = average_ranks(a + b)
    r_a = mp.fsum(ranks[:n1])
    u_a = r_a - mp.mpf(n1 * (n1 + 1)) / 2
    u_b = mp.mpf(n1 * n2) - u_a
    n = n1 + n2
    mu = mp.mpf(n1 * n2) / 2
    tie_term = mp.mpf(0)
    vals = sorted(a + b)
    i = 0
    while i < n:
        j = i
        while j + 1 < n and vals[j + 1] == vals[i]:
            j += 1
        t = j - i + 1
        tie_term += mp.mpf(t) ** 3 - t
        i = j + 1
    sigma2 = mp.mpf(n1 * n2) / 12 * ((n + 1) - tie_term / (n * (n - 1)))
    sigma = mp.sqrt(sigma2)
    u_big = max(u_a, u_b)
    z = (u_big - mu - mp.mpf(1) / 2) / sigma
    p = min(mp.mpf(2) * normal_sf(z), mp.mpf(1))
    return float(u_a), float(p)


# ---------------------------------------------------------------------------
# Shapiro-Wilk, Royston AS R94
# ---------------------------------------------------------------------------

SW_C1 = [0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056]
SW_C2 = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633]
SW_C3 = [0.544, -0.39978, 0.025054, -6.714e-4]
SW_C4 = [1.3822, -0.77857, 0.062767, -0.0020322]
SW_C5 = [-1.5861, -0.31082, -0.083751, 0.0038915]
SW_C6 = [-0.4803, -0.082676, 0.0030302]
SW_G = [-2.273, 0.459]


def poly(c, x):
    r = c[-1]
    for v in reversed(c[:-1]):
        r = r * x + v
    return r


def shapiro_wilk_case(data):
    n = len(data)
    x = sorted(data)
    nn2 = n // 2
    if n == 3:
        a1 = 1 / math.sqrt(2.0)
        mean = sum(x) / 3.0
        ss = sum((v - mean) ** 2 for v in x)
        w = min(max((a1 * (x[2] - x[0])) ** 2 / ss, 0.75), 1.0)
        p = 1.0 - (6.0 / math.pi) * math.acos(math.sqrt(w))
        return w, min(max(p, 0.0), 1.0)
    m = [ndtri((i + 1 - 0.375) / (n + 0.25)) for i in range(nn2)]
    summ2 = 2.0 * sum(v * v for v in m)
    ssumm2 = math.sqrt(summ2)
    rsn = 1.0 / math.sqrt(n)
    a = [0.0] * nn2
    a1 = poly(SW_C1, rsn) - m[0] / ssumm2
    if n <= 5:
        fac = math.sqrt((summ2 - 2 * m[0] ** 2) / (1 - 2 * a1 * a1))
        a[0] = a1
        for i in range(1, nn2):
            a[i] = -m[i] / fac
    else:
        a2 = -m[1] / ssumm2 + poly(SW_C2, rsn)
        fac = math.sqrt(
            (summ2 - 2 * m[0] ** 2 - 2 * m[1] ** 2) / (1 - 2 * a1 * a1 - 2 * a2 * a2)
        )
        a[0], a[1] = a1, a2
        for i in range(2, nn2):
            a[i] = -m[i] / fac
    sa = sum(a[i] * (x[n - 1 - i] - x[i]) for i in range(nn2))
    mean = sum(x) / n
    ss = sum((v - mean) ** 2 for v in x)
    w = min((sa * sa) / ss, 1.0)
    # p-value transform
    w1 = 1.0 - w
    if w1 <= 0.0:
        return w, 1.0
    y = math.log(w1)
    if n <= 11:
        gamma = poly(SW_G, float(n))
        if y >= gamma:
            return w, 0.0
        y2 = -math.log(gamma - y)
        mm = poly(SW_C3, float(n))
        s = math.exp(poly(SW_C4, float(n)))
        z = (y2 - mm) / s
    else:
        xx = math.log(float(n))
        mm = poly(SW_C5, xx)
        s = math.exp(poly(SW_C6, xx))
        z = (y - mm) / s
    p = float(normal_sf(z))
    return w, min(max(p, 0.0), 1.0)


def ols_case(ts, ys):
    n = len(ts)
    t = [mp.mpf(v) for v in ts]
    y = [mp.mpf(v) for v in ys]
    mt = mp.fsum(t) / n
    my = mp.fsum(y) / n
    sxx = mp.fsum((a - mt) ** 2 for a in t)
    sxy = mp.fsum((a - mt) * (b - my) for a, b in zip(t, y))
    syy = mp.fsum((b - my) ** 2 for b in y)
    slope = sxy / sxx
    intercept = my - slope * mt
    sse = mp.fsum((b - (intercept + slope * a)) ** 2 for a, b in zip(t, y))
    if syy == 0:
        return float(slope), 0.0, 1.0
    if sse / syy < mp.mpf("1e-12"):
        return float(slope), float("inf"), 0.0
    se = mp.sqrt(sse / (n - 2) / sxx)
    tstat = slope / se
    p = t_sf_two_sided(abs(tstat), n - 2)
    return float(slope), float(tstat), float(p)


def holm_case(ps):
    m = len(ps)
    order = sorted(range(m), key=lambda i: ps[i])
    adjusted = [0.0] * m
    running = 0.0
    for rank, idx in enumerate(order):
        candidate = (m - rank) * ps[idx]
        running = max(running, candidate)
        adjusted[idx] = min(running, 1.0)
    return adjusted


def breusch_pagan_case(residuals, xs):
    n = len(residuals)
    e2 = [mp.mpf(r) ** 2 for r in residuals]
    x = [mp.mpf(v) for v in xs]
    mx = mp.fsum(x) / n
    me = mp.fsum(e2) / n
    sxx = mp.fsum((a - mx) ** 2 for a in x)
    sxy = mp.fsum((a - mx) * (b - me) for a, b in zip(x, e2))
    syy = mp.fsum((b - me) ** 2 for b in e2)
    if syy == 0:
        return 0.0, 1.0
    slope = sxy / sxx
    intercept = me - slope * mx
    sse = mp.fsum((b - (intercept + slope * a)) ** 2 for a, b in zip(x, e2))
    r2 = 1 - sse / syy
    lm = n * r2
    p = mp.gammainc(mp.mpf(1) / 2, lm / 2, mp.inf, regularized=True)
    return float(lm), float(p)


def add(op, args, expect, tol_stat=1e-9, tol_p=1e-8):
    cases.append(
        {"op": op, "args": args, "expect": expect, "tol": {"statistic": tol_stat, "p": tol_p}}
    )


rng = random.Random(20230317)


def rnd(n, lo, hi, digits=4):
    return [round(rng.uniform(lo, hi), digits) for _ in range(n)]


# --- spearman ---------------------------------------------------------------
sp_sets = [
    ([1.0, 2.0, 3.0], [10.0, 20.0, 30.0]),
    ([1.0, 2.0, 3.0], [3.0, 2.0, 1.0]),
    ([1.0, 2.0, 2.0, 4.0], [1.0, 3.0, 2.0, 4.0]),
    (rnd(10, 0, 100), rnd(10, 0, 100)),
    ([float(v) for v in rnd(20, 0, 10, 1)], [float(v) for v in rnd(20, 0, 10, 1)]),  # ties likely
    (rnd(50, -5, 5), rnd(50, -5, 5)),
]
for x, y in sp_sets:
    rho, p = spearman_case(x, y)
    add("spearman", {"x": x, "y": y}, {"statistic": rho, "p": p})

# --- pearson_log ------------------------------------------------------------
pl_sets = [
    ([1.0, 10.0, 100.0], [2.0, 20.0, 200.0]),
    ([1.0, 2.0, 4.0, 8.0, 16.0], [3.0, 9.0, 27.0, 81.0, 243.0]),
    (rnd(10, 0.1, 1000), rnd(10, 0.1, 1000)),
    (rnd(12, 0.5, 50), rnd(12, 1, 5000)),
    (rnd(30, 0.01, 10), rnd(30, 0.01, 10)),
    (rnd(50, 1, 1e6), rnd(50, 1, 1e6)),
]
for x, y in pl_sets:
    r, p = pearson_log_case(x, y)
    add("pearson_log", {"x": x, "y": y}, {"statistic": r, "p": p})

# --- mann_whitney_u ---------------------------------------------------------
mw_exact = [
    ([1.0, 2.0, 3.0], [4.0, 5.0, 6.0]),
    ([1.0, 3.0, 5.0, 7.0], [2.0, 4.0, 6.0, 8.0]),
    ([10.0, 30.0, 50.0, 70.0, 90.0], [20.0, 40.0, 60.0, 80.0]),
    ([1.5, 2.5], [0.5, 3.5, 4.5]),
]
for a, b in mw_exact:
    u, p = mwu_exact_two_sided(a, b)
    add("mann_whitney_u", {"a": a, "b": b}, {"statistic": u, "p": p})
    sp = scipy.stats.mannwhitneyu(a, b, alternative="two-sided", method="exact")
    assert abs(sp.pvalue - p) < 1e-12, (a, b, sp.pvalue, p)

mw_approx = [
    ([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]),
    (rnd(20, 0, 10, 1), rnd(20, 2, 12, 1)),  # ties across groups
    (rnd(10, 0, 100), rnd(8, 20, 120)),
    (rnd(25, 0, 1, 2), rnd(25, 0, 1, 2)),
]
for a, b in mw_approx:
    u, p = mwu_asymptotic(a, b)
    add("mann_whitney_u", {"a": a, "b": b}, {"statistic": u, "p": p})

# --- shapiro_wilk -----------------------------------------------------------
sw_sets = [
    [2.1, 3.4, 1.9, 2.8],
    [5.0, 5.2, 4.9, 5.1, 5.3],
    [-1.2, 0.4, 0.8, -0.3, 1.5, -0.7, 0.1, 0.9],  # n=8 small-sample branch
    [float(v) for v in rnd(11, -3, 3)],
    [float(ndtri((i + 0.5) / 20)) for i in range(20)],  # equally spaced normal quantiles
    sorted(round((1.0 - rng.random()) ** -1.5, 4) for _ in range(50)),  # heavy tail
    [float(v) for v in rnd(30, -10, 10)],
]
for data in sw_sets:
    w, p = shapiro_wilk_case(data)
    sw, sp = scipy.stats.shapiro(data)
    assert abs(sw - w) < 5e-4 and abs(sp - p) < 5e-3, (len(data), sw, w, sp, p)
    add("shapiro_wilk", {"x": data}, {"statistic": w, "p": p})

# --- ols_slope_ttest --------------------------------------------------------
ols_sets = [
    ([float(i) for i in range(6)], [2.0 * i for i in range(6)]),  # perfect fit
    ([float(i) for i in range(8)], [4.2] * 8),  # constant
    (
        [float(i) for i in range(24)],
        [round(3.0 + 0.12 * i + math.sin(i * 1.7) * 0.8, 4) for i in range(24)],
    ),
    ([float(i) for i in range(12)], rnd(12, 0, 5)),
    ([float(i) for i in range(36)], [round(10.0 - 0.3 * i + math.cos(i) * 2.0, 4) for i in range(36)]),
    ([float(i) for i in range(10)], [round(50.0 - 4.0 * i + (i % 3) * 0.5, 4) for i in range(10)]),
]
for ts, ys in ols_sets:
    slope, tstat, p = ols_case(ts, ys)
    expect = {"slope": slope, "p": p}
    if math.isfinite(tstat):
        expect["statistic"] = tstat
    add("ols_slope_ttest", {"t": ts, "y": ys}, expect)

# --- holm_bonferroni --------------------------------------------------------
holm_sets = [
    [0.01, 0.04, 0.03],
    [0.5],
    [0.0, 0.0, 0.0],
    [round(rng.random(), 6) for _ in range(10)],
    [0.04, 0.2, 0.9, 0.3, 0.8, 0.11, 0.6],
]
for ps in holm_sets:
    add("holm_bonferroni", {"p_values": ps}, {"adjusted": holm_case(ps)})

# --- breusch_pagan (regression diagnostics) ---------------------------------
bp_sets = [
    ([0.1, -0.2, 0.15, -0.05, 0.2, -0.18, 0.09, -0.11], [float(i) for i in range(8)]),
    ([round(0.05 * i * (-1) ** i, 4) for i in range(12)], [float(i) for i in range(12)]),
    (rnd(20, -1, 1), [float(i) for i in range(20)]),
]
for res, xs in bp_sets:
    lm, p = breusch_pagan_case(res, xs)
    add("breusch_pagan", {"residuals": res, "x": xs}, {"statistic": lm, "p": p})

with open(OUT, "w") as f:
    for case in cases:
        f.write(json.dumps(case) + "\n")

print(f"wrote {len(cases)} cases to {OUT}")
