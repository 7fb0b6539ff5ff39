#!/usr/bin/env python3
"""Faster search for the remaining triangle rules.

Strategy: a bounded least-squares solve with a few surplus S111 orbits is
far easier than hitting the exact orbit structure directly (the solution
set is a manifold instead of isolated points), and a nearly solved rule
only needs a handful of orbit eliminations to reach the exact target
count.  Seeds come from the cached lower-degree rules (their orbit radii
cluster where the finer rule wants them) padded with random orbits.

Usage:  python3 tools/dev/rule_search2.py [n ...]
Builds the listed point counts (default: whatever the cache is missing),
updates tools/dev/triangle_rules.json, and emits the C++ include once all
seven rules exist.
"""

import json
import os
import sys
import time

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
import make_triangle_rules as M


def load_cache(path):
    if not os.path.exists(path):
        return {}
    with open(path) as f:
        return {int(k): v for k, v in json.load(f).items()}


def state_from_cache(entry):
    """Rebuild the orbit representation from the cached point list."""
    orbits = {}
    for u, v, w in entry["points"]:
        u, v, w = float(u), float(v), float(w)
        lam = tuple(sorted((1.0 - u - v, u, v)))
        key = tuple(round(x, 9) for x in lam)
        orbits.setdefault(key, [lam, w, 0])[2] += 1
    wc = None
    s21, s111 = [], []
    for lam, w, count in orbits.values():
        if count == 1:
            wc = w
        elif count == 3:
            s21.append((lam[0] if abs(lam[0] - lam[1]) < 1e-8 else lam[1], w))
        else:
            s111.append((lam[0], lam[1], w))
    return (wc, s21, s111)


def seeded_state(structure, bases, rng):
    """Random state biased toward the orbit geometry of cached rules."""
    has_c, na, nb = structure
    wc = 0.01 if has_c else None
    pool21, pool111 = [], []
    for base in bases:
        _bwc, bs21, bs111 = base
        pool21 += [a for a, _w in bs21]
        pool111 += [(a, b) for a, b, _w in bs111]
    s21 = []
    for _ in range(na):
        if pool21 and rng.random() < 0.7:
            a = pool21[rng.integers(len(pool21))]
            a = min(max(a * (1 + 0.08 * rng.standard_normal()), 1e-3), 0.497)
        else:
            a = rng.uniform(0.02, 0.48)
        s21.append((a, 0.01))
    s111 = []
    while len(s111) < nb:
        if pool111 and rng.random() < 0.6:
            a, b = pool111[rng.integers(len(pool111))]
            a *= 1 + 0.08 * rng.standard_normal()
            b *= 1 + 0.08 * rng.standard_normal()
            lam = np.sort((a, b, 1 - a - b))
        else:
            lam = np.sort(rng.dirichlet((2.0, 2.0, 2.0)))
        if lam[0] < 0.005 or lam[1] - lam[0] < 0.005 or lam[2] - lam[1] < 0.005:
            continue
        s111.append((lam[0], lam[1], 0.01))
    return (wc, s21, s111)


def surplus_candidates(structures, max_extra=6):
    """Exact structures first, then growing surplus variants."""
    out = []
    for extra in range(0, max_extra + 1):
        for has_c, na, nb in structures:
            out.append(((has_c, na, nb + extra), extra))
    return out


def search(n, degree, structures, bases, seed, budget_s=5400):
    exps = M.moment_exponents(degree)
    mvals = np.array([float(M.exact_moment(i, j)) for (i, j) in exps])
    rng = np.random.default_rng(seed)
    t0 = time.time()
    rounds = 0
    while time.time() - t0 < budget_s:
        rounds += 1
        for target, extra in surplus_candidates(structures):
            if time.time() - t0 > budget_s:
                break
            print("  n=%d deg=%d round %d structure %r (+%d surplus)"
                  % (n, degree, rounds, target, extra), flush=True)
            for _try in range(12):
                st = seeded_state(target, bases, rng)
                try:
                    st = M.linear_weights(st, exps, mvals)
                except np.linalg.LinAlgError:
                    continue
                st, resid = M.solve_state(st, exps, mvals, max_nfev=900)
                if resid > 1e-10 or not M.state_valid(st):
                    continue
                print("    solved %d-pt surplus structure, res %.2e"
                      % (M.npoints(st), resid), flush=True)
                if extra == 0:
                    return st
                goal = [s for s in structures if s[0] == target[0]
                        and s[1] == target[1]][0]
                done = M.eliminate(st, goal, exps, mvals, rng)
                if done is not None:
                    return done
                print("    elimination from surplus failed, resuming search",
                      flush=True)
    return None


def main():
    cache_path = "tools/dev/triangle_rules.json"
    cache = load_cache(cache_path)
    wanted = [int(a) for a in sys.argv[1:]] or \
        [n for n, *_ in M.TARGETS if n not in cache]
    targets = {n: (deg, structs) for n, deg, _m, structs in M.TARGETS}

    for n in wanted:
        if n in cache:
            print("%d already cached" % n)
            continue
        degree, structures = targets[n]
        bases = [state_from_cache(cache[k]) for k in sorted(cache) if k < n]
        bases = bases[-2:]  # the two finest coarser rules
        t1 = time.time()
        st = search(n, degree, structures, bases, seed=1000 + n)
        if st is None:
            print("FAILED %d" % n)
            sys.exit(1)
        st, err = M.polish(st, degree, M.moment_exponents(degree))
        worst, wres = M.verify_rule(st, degree)
        assert M.npoints(st) == n
        print("  %d pts deg %d: polish res %.2e  monomial err %.2e  wsum err "
              "%.2e  (%.1fs)" % (n, degree, float(err), float(worst),
                                 float(wres), time.time() - t1), flush=True)
        if float(worst) > 1e-40:
            print("verification failed")
            sys.exit(1)
        import mpmath as mp
        pts = M.expand_points(st)
        cache[n] = {
            "degree": degree,
            "points": [[mp.nstr(u, 20), mp.nstr(v, 20), mp.nstr(w, 20)]
                       for u, v, w in pts],
        }
        with open(cache_path, "w") as f:
            json.dump({str(k): v for k, v in cache.items()}, f, indent=1)

    if all(n in cache for n, *_ in M.TARGETS):
        print("cache complete; emitting include via make_triangle_rules")


if __name__ == "__main__":
    main()
