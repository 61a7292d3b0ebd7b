"""Jitted inner loops for the simulation engine and the coupled chains.

Every kernel takes a `numpy.random.Generator` created by the caller, so one
64-bit seed fixes the whole draw sequence regardless of how trials are
batched across workers.  Draw protocols are part of the determinism contract:

* exact-SSA event: waiting time ``rg.exponential(1.0) / a0`` first, then one
  uniform ``rg.random() * a0`` scanned against the propensities in reaction
  declaration order;
* tau leap: one Poisson draw per reaction in declaration order (fresh draws
  after every halving);
* coupled chains: one uniform per step, plus one unit exponential when the
  chain carries continuous time (uniform first).

Stop conditions arrive compiled to parallel clause arrays (`kind`, `mask`,
integer and float thresholds, `group`) in disjunctive normal form: clauses
sharing a group id are a conjunction, groups are alternatives evaluated in
declaration order, and a group fires when all its clauses hold.  Kind codes:
0 extinction (any masked species at 0), 1 target (masked total at or above
threshold), 2 time horizon, 3 max events, 4 population cap.  The `horizon`
scalar is the earliest single-clause time group (inf if none); trajectories
clamp to it rather than stepping past it.
"""

from __future__ import annotations

import numpy as np
from numba import njit

__all__ = [
    "STATUS_FIRED",
    "STATUS_DEADLOCK",
    "STATUS_BUFFER_FULL",
    "ssa_run",
    "tau_run",
    "ab_consensus_batch",
    "m_extinction_batch",
    "yule_drop_batch",
    "yule_collision_batch",
    "yule_ratio_batch",
    "abm_run_kernel",
    "abm_batch",
    "ab_yule_run_kernel",
    "ab_yule_batch",
]

STATUS_FIRED = 0
STATUS_DEADLOCK = 1
STATUS_BUFFER_FULL = 2

_NO_TIME = 1.7976931348623157e308


@njit(cache=True)
def _combinations(c, r):
    a = 1.0
    for m in range(r):
        a *= (c - m) / (m + 1.0)
    return a


@njit(cache=True)
def _propensities(counts, react, rates, dup_mask, log_on, log_k, counted, scale_all, out):
    n_r, n_s = react.shape
    factor = 1.0
    if log_on:
        pop = 0.0
        for i in range(n_s):
            if counted[i]:
                pop += counts[i]
        factor = 1.0 - pop / log_k
        if factor < 0.0:
            factor = 0.0
    a0 = 0.0
    for j in range(n_r):
        a = rates[j]
        for i in range(n_s):
            r = react[j, i]
            if r > 0:
                c = counts[i]
                if c < r:
                    a = 0.0
                    break
                if r == 1:
                    a *= c
                elif r == 2:
                    a *= c * (c - 1) * 0.5
                else:
                    a *= _combinations(c, r)
        if log_on and (scale_all or dup_mask[j]):
            a *= factor
        out[j] = a
        a0 += a
    return a0


@njit(cache=True)
def _clause_true(counts, t, events, kinds, masks, ithr, fthr, c):
    n_s = counts.shape[0]
    k = kinds[c]
    if k == 0:
        for i in range(n_s):
            if masks[c, i] and counts[i] == 0:
                return True
        return False
    if k == 1:
        tot = 0
        for i in range(n_s):
            if masks[c, i]:
                tot += counts[i]
        return tot >= ithr[c]
    if k == 2:
        return t >= fthr[c]
    if k == 3:
        return events >= ithr[c]
    tot = 0
    for i in range(n_s):
        tot += counts[i]
    return tot >= ithr[c]


@njit(cache=True)
def _first_fired(counts, t, events, kinds, masks, ithr, fthr, group):
    """First group (in declaration order) whose clauses all hold, or -1."""
    n_c = kinds.shape[0]
    c = 0
    while c < n_c:
        g = group[c]
        ok = True
        while c < n_c and group[c] == g:
            if ok and not _clause_true(counts, t, events, kinds, masks, ithr, fthr, c):
                ok = False
            c += 1
        if ok:
            return g
    return -1


@njit(cache=True)
def _record(rec_t, rec_c, rec_pos, t, counts):
    rec_t[rec_pos] = t
    for i in range(counts.shape[0]):
        rec_c[rec_pos, i] = counts[i]
    return rec_pos + 1


@njit(cache=True)
def _drain_grid(grid, grid_pos, limit, inclusive, rec_t, rec_c, rec_pos, counts):
    """Record the current counts at every grid time up to `limit`."""
    while grid_pos < grid.shape[0]:
        g = grid[grid_pos]
        if (g < limit) or (inclusive and g <= limit):
            rec_pos = _record(rec_t, rec_c, rec_pos, g, counts)
            grid_pos += 1
        else:
            break
    return grid_pos, rec_pos


@njit(cache=True)
def ssa_run(
    rg,
    counts,
    t0,
    events0,
    react,
    net,
    rates,
    dup_mask,
    log_on,
    log_k,
    counted,
    scale_all,
    kinds,
    masks,
    ithr,
    fthr,
    group,
    horizon,
    mode,  # 0 stop-only, 1 interval grid, 2 every event
    grid,
    grid_pos0,
    rec_t,
    rec_c,
    rec_j,
    rec_pos0,
):
    """Advance one exact-SSA trajectory until a group fires or a buffer fills.

    Mutates `counts` and the record buffers in place; the generator keeps its
    state across calls, so a STATUS_BUFFER_FULL return resumes seamlessly
    (fresh record buffers in mode 2, a fresh grid chunk in mode 1).
    Returns (status, fired_group, t, events, grid_pos, rec_pos).
    """
    t = t0
    events = events0
    grid_pos = grid_pos0
    rec_pos = rec_pos0
    n_r = react.shape[0]
    props = np.empty(n_r)
    rec_cap = rec_t.shape[0]

    fired = _first_fired(counts, t, events, kinds, masks, ithr, fthr, group)
    if fired >= 0:
        return STATUS_FIRED, fired, t, events, grid_pos, rec_pos

    while True:
        if mode == 1 and grid_pos >= grid.shape[0]:
            return STATUS_BUFFER_FULL, -1, t, events, grid_pos, rec_pos
        a0 = _propensities(
            counts, react, rates, dup_mask, log_on, log_k, counted, scale_all, props
        )
        if a0 <= 0.0:
            if horizon < _NO_TIME:
                if mode == 1:
                    grid_pos, rec_pos = _drain_grid(
                        grid, grid_pos, horizon, True, rec_t, rec_c, rec_pos, counts
                    )
                t = horizon
                fired = _first_fired(counts, t, events, kinds, masks, ithr, fthr, group)
                return STATUS_FIRED, fired, t, events, grid_pos, rec_pos
            return STATUS_DEADLOCK, -1, t, events, grid_pos, rec_pos

        t_next = t + rg.exponential(1.0) / a0
        if t_next >= horizon:
            if mode == 1:
                grid_pos, rec_pos = _drain_grid(
                    grid, grid_pos, horizon, True, rec_t, rec_c, rec_pos, counts
                )
            t = horizon
            fired = _first_fired(counts, t, events, kinds, masks, ithr, fthr, group)
            return STATUS_FIRED, fired, t, events, grid_pos, rec_pos

        if mode == 1:
            grid_pos, rec_pos = _drain_grid(
                grid, grid_pos, t_next, False, rec_t, rec_c, rec_pos, counts
            )

        u = rg.random() * a0
        chosen = n_r - 1
        acc = 0.0
        for j in range(n_r):
            acc += props[j]
            if u < acc:
                chosen = j
                break

        for i in range(counts.shape[0]):
            counts[i] += net[chosen, i]
        t = t_next
        events += 1

        if mode == 2:
            rec_j[rec_pos, 0] = chosen
            rec_pos = _record(rec_t, rec_c, rec_pos, t, counts)

        fired = _first_fired(counts, t, events, kinds, masks, ithr, fthr, group)
        if fired >= 0:
            return STATUS_FIRED, fired, t, events, grid_pos, rec_pos

        if mode == 2 and rec_pos >= rec_cap:
            return STATUS_BUFFER_FULL, -1, t, events, grid_pos, rec_pos


@njit(cache=True)
def _partial_propensity(counts, react, rates, j, skip_i):
    """Propensity of reaction j with the combinatorial factor of `skip_i` removed."""
    a = rates[j]
    n_s = react.shape[1]
    for i in range(n_s):
        r = react[j, i]
        if r > 0 and i != skip_i:
            c = counts[i]
            if c < r:
                return 0.0
            if r == 1:
                a *= c
            elif r == 2:
                a *= c * (c - 1) * 0.5
            else:
                a *= _combinations(c, r)
    return a


@njit(cache=True)
def _grad_tau(counts, react, net, rates, props, dup_mask, log_on, log_k, counted, scale_all, eps, a0):
    """Largest tau keeping every propensity's expected change below eps*a0.

    Reaction-oriented leap criterion: with f[j, j'] the change of propensity
    j per firing of j', each propensity's drift mu_j = sum f a and variance
    rate sigma2_j = sum f^2 a bound tau by eps*a0/|mu_j| and (eps*a0)^2/sigma2_j.
    """
    n_r, n_s = react.shape
    factor = 1.0
    if log_on:
        pop = 0.0
        for i in range(n_s):
            if counted[i]:
                pop += counts[i]
        factor = 1.0 - pop / log_k
        if factor < 0.0:
            factor = 0.0
    tau = _NO_TIME
    for j in range(n_r):
        scaled_j = log_on and (scale_all or dup_mask[j])
        if scaled_j and factor == 0.0:
            continue
        mu = 0.0
        sig2 = 0.0
        for jp in range(n_r):
            if props[jp] == 0.0:
                continue
            f = 0.0
            for i in range(n_s):
                d_i = net[jp, i]
                if d_i == 0:
                    continue
                r = react[j, i]
                if r > 0:
                    c = counts[i]
                    slope = 0.0
                    if r == 1:
                        slope = 1.0
                    elif r == 2:
                        slope = c - 0.5
                    elif c >= r:
                        slope = _combinations(c, r) * r / c
                    if slope != 0.0:
                        base = _partial_propensity(counts, react, rates, j, i)
                        if scaled_j:
                            base *= factor
                        f += base * slope * d_i
                if scaled_j and counted[i]:
                    f += -props[j] / factor / log_k * d_i
            mu += f * props[jp]
            sig2 += f * f * props[jp]
        bound = eps * a0
        if mu < 0.0:
            mu = -mu
        if mu > 0.0:
            cand = bound / mu
            if cand < tau:
                tau = cand
        if sig2 > 0.0:
            cand = bound * bound / sig2
            if cand < tau:
                tau = cand
    return tau


@njit(cache=True)
def tau_run(
    rg,
    counts,
    t0,
    events0,
    react,
    net,
    rates,
    dup_mask,
    log_on,
    log_k,
    counted,
    scale_all,
    kinds,
    masks,
    ithr,
    fthr,
    group,
    horizon,
    mode,
    grid,
    grid_pos0,
    rec_t,
    rec_c,
    rec_j,
    rec_pos0,
    eps,
    exact_switch,
):
    """Advance one tau-leap trajectory; same contract as `ssa_run`.

    In every-event mode each leap is one record and the matching `rec_j` row
    holds per-reaction firing counts (an exact fallback step records a
    one-hot row).
    """
    t = t0
    events = events0
    grid_pos = grid_pos0
    rec_pos = rec_pos0
    n_r = react.shape[0]
    n_s = counts.shape[0]
    props = np.empty(n_r)
    fires = np.empty(n_r, dtype=np.int64)
    trial = np.empty(n_s, dtype=np.int64)
    rec_cap = rec_t.shape[0]

    fired = _first_fired(counts, t, events, kinds, masks, ithr, fthr, group)
    if fired >= 0:
        return STATUS_FIRED, fired, t, events, grid_pos, rec_pos

    while True:
        if mode == 1 and grid_pos >= grid.shape[0]:
            return STATUS_BUFFER_FULL, -1, t, events, grid_pos, rec_pos
        a0 = _propensities(
            counts, react, rates, dup_mask, log_on, log_k, counted, scale_all, props
        )
        if a0 <= 0.0:
            if horizon < _NO_TIME:
                if mode == 1:
                    grid_pos, rec_pos = _drain_grid(
                        grid, grid_pos, horizon, True, rec_t, rec_c, rec_pos, counts
                    )
                t = horizon
                fired = _first_fired(counts, t, events, kinds, masks, ithr, fthr, group)
                return STATUS_FIRED, fired, t, events, grid_pos, rec_pos
            return STATUS_DEADLOCK, -1, t, events, grid_pos, rec_pos

        tau = _grad_tau(
            counts, react, net, rates, props, dup_mask, log_on, log_k, counted,
            scale_all, eps, a0,
        )
        # never leap more than ten million expected events, nor past the horizon
        if tau > 1e7 / a0:
            tau = 1e7 / a0
        at_horizon = False
        if t + tau >= horizon:
            tau = horizon - t
            at_horizon = True

        leapt = False
        if a0 * tau >= exact_switch:
            for _ in range(64):
                for j in range(n_r):
                    fires[j] = rg.poisson(props[j] * tau) if props[j] > 0.0 else 0
                for i in range(n_s):
                    trial[i] = counts[i]
                for j in range(n_r):
                    kj = fires[j]
                    if kj > 0:
                        for i in range(n_s):
                            trial[i] += kj * net[j, i]
                neg = False
                for i in range(n_s):
                    if trial[i] < 0:
                        neg = True
                        break
                if not neg:
                    leapt = True
                    break
                tau *= 0.5
                at_horizon = False
                if a0 * tau < exact_switch:
                    break

        if leapt:
            t_next = horizon if at_horizon else t + tau
            if mode == 1:
                grid_pos, rec_pos = _drain_grid(
                    grid, grid_pos, t_next, False, rec_t, rec_c, rec_pos, counts
                )
            n_fired = 0
            for j in range(n_r):
                n_fired += fires[j]
            for i in range(n_s):
                counts[i] = trial[i]
            t = t_next
            events += n_fired
            if mode == 2:
                for j in range(n_r):
                    rec_j[rec_pos, j] = fires[j]
                rec_pos = _record(rec_t, rec_c, rec_pos, t, counts)
            if at_horizon:
                if mode == 1:
                    grid_pos, rec_pos = _drain_grid(
                        grid, grid_pos, horizon, True, rec_t, rec_c, rec_pos, counts
                    )
                fired = _first_fired(counts, t, events, kinds, masks, ithr, fthr, group)
                return STATUS_FIRED, fired, t, events, grid_pos, rec_pos
        else:
            # exact fallback step, same draw protocol as ssa_run
            t_next = t + rg.exponential(1.0) / a0
            if t_next >= horizon:
                if mode == 1:
                    grid_pos, rec_pos = _drain_grid(
                        grid, grid_pos, horizon, True, rec_t, rec_c, rec_pos, counts
                    )
                t = horizon
                fired = _first_fired(counts, t, events, kinds, masks, ithr, fthr, group)
                return STATUS_FIRED, fired, t, events, grid_pos, rec_pos
            if mode == 1:
                grid_pos, rec_pos = _drain_grid(
                    grid, grid_pos, t_next, False, rec_t, rec_c, rec_pos, counts
                )
            u = rg.random() * a0
            chosen = n_r - 1
            acc = 0.0
            for j in range(n_r):
                acc += props[j]
                if u < acc:
                    chosen = j
                    break
            for i in range(n_s):
                counts[i] += net[chosen, i]
            t = t_next
            events += 1
            if mode == 2:
                for j in range(n_r):
                    rec_j[rec_pos, j] = 1 if j == chosen else 0
                rec_pos = _record(rec_t, rec_c, rec_pos, t, counts)

        fired = _first_fired(counts, t, events, kinds, masks, ithr, fthr, group)
        if fired >= 0:
            return STATUS_FIRED, fired, t, events, grid_pos, rec_pos
        if mode == 2 and rec_pos >= rec_cap:
            return STATUS_BUFFER_FULL, -1, t, events, grid_pos, rec_pos


# --------------------------------------------------------------------------
# Specialized single-run kernels and Python-level batch drivers
# --------------------------------------------------------------------------

@njit(cache=True)
def _ab_run(rg, a0, b0, gamma, delta, t_cap, ev_cap):
    """Annihilation-consensus run; returns (winner, t, events, a, b).

    winner: 0 if A survives alone, 1 if B does, 2 if both died in the same
    annihilation event, -1 if a cap stopped the run first.  Draw protocol and
    reaction order match the generic engine on the declared A-B network: A
    duplication, B duplication, pairwise annihilation.
    """
    a = a0
    b = b0
    t = 0.0
    ev = 0
    while a > 0 and b > 0:
        ra = gamma * a
        rb = gamma * b
        rd = delta * a * b
        tot = ra + rb + rd
        t_next = t + rg.exponential(1.0) / tot
        if t_next >= t_cap:
            return -1, t_cap, ev, a, b
        t = t_next
        u = rg.random() * tot
        if u < ra:
            a += 1
        elif u < ra + rb:
            b += 1
        else:
            a -= 1
            b -= 1
        ev += 1
        if ev >= ev_cap:
            return -1, t, ev, a, b
    if a > 0:
        return 0, t, ev, a, b
    if b > 0:
        return 1, t, ev, a, b
    return 2, t, ev, a, b


def ab_consensus_batch(a0, b0, gamma, delta, seeds, t_cap=np.inf, ev_cap=1 << 62):
    """Run one consensus trial per seed; returns (winner, t, events, a, b) arrays."""
    n = len(seeds)
    winner = np.empty(n, dtype=np.int8)
    t_end = np.empty(n)
    events = np.empty(n, dtype=np.int64)
    a_fin = np.empty(n, dtype=np.int64)
    b_fin = np.empty(n, dtype=np.int64)
    for i in range(n):
        rg = np.random.Generator(np.random.PCG64(int(seeds[i])))
        winner[i], t_end[i], events[i], a_fin[i], b_fin[i] = _ab_run(
            rg, a0, b0, gamma, delta, t_cap, ev_cap
        )
    return winner, t_end, events, a_fin, b_fin


@njit(cache=True)
def _m_run(rg, m0, gamma, delta, ev_cap):
    """Birth rate gamma*M, death rate delta*M^2; returns (t, events, extinct)."""
    m = m0
    t = 0.0
    ev = 0
    while m > 0 and ev < ev_cap:
        up = gamma * m
        down = delta * m * m
        tot = up + down
        t += rg.exponential(1.0) / tot
        u = rg.random() * tot
        if u < up:
            m += 1
        else:
            m -= 1
        ev += 1
    return t, ev, m == 0


def m_extinction_batch(m0, gamma, delta, seeds, ev_cap=1 << 62):
    """Extinction times of the quadratic-death chain, one trial per seed."""
    n = len(seeds)
    t_end = np.empty(n)
    events = np.empty(n, dtype=np.int64)
    extinct = np.empty(n, dtype=np.uint8)
    for i in range(n):
        rg = np.random.Generator(np.random.PCG64(int(seeds[i])))
        t_end[i], events[i], extinct[i] = _m_run(rg, m0, gamma, delta, ev_cap)
    return t_end, events, extinct


@njit(cache=True)
def _yule_drop_run(rg, x0, y0):
    """1 if the pure pair's ratio x/(x+y) ever drops to <= 3/4, else 0.

    The run stops once a drop is excluded up to ~3e-11: by the one-sided
    Hoeffding tail, I_{3/4}(x, y) <= exp(-(x-3y+3)^2 / (8(x+y-1))) whenever
    x > 3y - 3, and the drop probability from (x, y) is below
    I_{3/4}(x, y)/0.444, so an exponent of 25 suffices.
    """
    x = x0
    y = y0
    if y == 0:
        return np.uint8(0)
    while True:
        if x <= 3 * y:
            return np.uint8(1)
        s = x - 3 * y + 3
        if s * s >= 200.0 * (x + y - 1):
            return np.uint8(0)
        if rg.random() * (x + y) < x:
            x += 1
        else:
            y += 1


def yule_drop_batch(x0, y0, seeds):
    """One ratio-drop indicator per seed for the pure-duplication pair."""
    n = len(seeds)
    out = np.empty(n, dtype=np.uint8)
    for i in range(n):
        rg = np.random.Generator(np.random.PCG64(int(seeds[i])))
        out[i] = _yule_drop_run(rg, x0, y0)
    return out


@njit(cache=True)
def _yule_collision_run(rg, x0, y0):
    """1 if the pure pair ever collides (x == y), else 0, with a tail cutoff.

    Collision from (x, y) has probability at most 2 I_{1/2}(max, min) <=
    2 exp(-(|x-y|+1)^2 / (2(x+y-1))); the run stops once that is ~2e-11.
    """
    x = x0
    y = y0
    if x == y:
        return np.uint8(1)
    while True:
        d = x - y if x > y else y - x
        if (d + 1.0) * (d + 1.0) >= 50.0 * (x + y - 1):
            return np.uint8(0)
        if rg.random() * (x + y) < x:
            x += 1
        else:
            y += 1
        if x == y:
            return np.uint8(1)


def yule_collision_batch(x0, y0, seeds):
    """One collision indicator per seed for the pure-duplication pair."""
    n = len(seeds)
    out = np.empty(n, dtype=np.uint8)
    for i in range(n):
        rg = np.random.Generator(np.random.PCG64(int(seeds[i])))
        out[i] = _yule_collision_run(rg, x0, y0)
    return out


@njit(cache=True)
def _yule_ratio_run(rg, x0, y0, n_max):
    """Grow the pure pair to total n_max; returns (x, y, equality_hit)."""
    x = x0
    y = y0
    hit = np.uint8(1) if x == y else np.uint8(0)
    while x + y < n_max:
        if rg.random() * (x + y) < x:
            x += 1
        else:
            y += 1
        if x == y:
            hit = np.uint8(1)
    return x, y, hit


def yule_ratio_batch(x0, y0, seeds, n_max=10**6):
    """Ratio x/(x+y) at total n_max and equality-hit flag, one run per seed."""
    n = len(seeds)
    ratio = np.empty(n)
    hit = np.empty(n, dtype=np.uint8)
    for i in range(n):
        rg = np.random.Generator(np.random.PCG64(int(seeds[i])))
        x, y, hit[i] = _yule_ratio_run(rg, x0, y0, n_max)
        ratio[i] = x / (x + y)
    return ratio, hit


@njit(cache=True)
def abm_run_kernel(rg, a0, b0, gamma, delta, ev_cap):
    """Coupled consensus pair (A, B) and quadratic-death chain M on one uniform.

    M starts at min(a0, b0).  Per step, with L = max of the two total rates,
    one uniform xi and one unit exponential eta advance both chains: the
    smaller of A, B grows on the lowest part of [0, 1), the larger next, and
    both die on the top delta*A*B/L part; M grows on [0, gamma*M/L) and dies
    on the top delta*M^2/L part.  Ties step A first.

    Returns (t_consensus, t_m_extinct, violations, events, done): violations
    counts steps where min(A, B) > M afterwards, and done is 1 when both
    consensus and M extinction were seen before ev_cap steps.
    """
    a = a0
    b = b0
    m = min(a0, b0)
    t = 0.0
    t_cons = 0.0 if min(a, b) == 0 else -1.0
    t_mext = 0.0 if m == 0 else -1.0
    viol = 0
    ev = 0
    while ev < ev_cap and (t_cons < 0.0 or t_mext < 0.0):
        lam_ab = gamma * (a + b) + delta * a * b
        lam_m = gamma * m + delta * m * m
        lam = lam_ab if lam_ab > lam_m else lam_m
        if lam <= 0.0:
            break
        xi = rg.random()
        eta = rg.exponential(1.0)
        t += eta / lam
        lo_is_a = a <= b
        lo = a if lo_is_a else b
        hi = b if lo_is_a else a
        glo = gamma * lo / lam
        ghi = gamma * hi / lam
        if xi < glo:
            if lo_is_a:
                a += 1
            else:
                b += 1
        elif xi < glo + ghi:
            if lo_is_a:
                b += 1
            else:
                a += 1
        elif xi >= 1.0 - delta * a * b / lam:
            a -= 1
            b -= 1
        if m > 0:
            if xi < gamma * m / lam:
                m += 1
            elif xi >= 1.0 - delta * m * m / lam:
                m -= 1
        ev += 1
        if min(a, b) > m:
            viol += 1
        if t_cons < 0.0 and min(a, b) == 0:
            t_cons = t
        if t_mext < 0.0 and m == 0:
            t_mext = t
    done = 1 if (t_cons >= 0.0 and t_mext >= 0.0) else 0
    return t_cons, t_mext, viol, ev, done


def abm_batch(a0, b0, gamma, delta, seeds, ev_cap=10**7):
    """One coupled (A, B)/M run per seed; arrays of the kernel's returns."""
    n = len(seeds)
    t_cons = np.empty(n)
    t_mext = np.empty(n)
    viol = np.empty(n, dtype=np.int64)
    events = np.empty(n, dtype=np.int64)
    done = np.empty(n, dtype=np.uint8)
    for i in range(n):
        rg = np.random.Generator(np.random.PCG64(int(seeds[i])))
        t_cons[i], t_mext[i], viol[i], events[i], done[i] = abm_run_kernel(
            rg, a0, b0, gamma, delta, ev_cap
        )
    return t_cons, t_mext, viol, events, done


@njit(cache=True)
def ab_yule_run_kernel(rg, a0, b0, ev_cap):
    """Coupled annihilation pair (A, B) and pure pair (X, Y) on one uniform.

    Starts X = a0, Y = b0, with unit rates in the embedded jump chain
    (lambda = A + B + A*B).  Per non-death step the pure pair grows X on
    [death, 1 - ((A+B)/lambda) * Y/(X+Y)) and Y above; the annihilation pair
    grows A on [death, 1 - B/lambda) and B above.  Runs until both collision
    questions are decided: A = B seen or one species extinct, and X = Y seen
    or excluded by the 2*I_{1/2} tail cutoff.

    Returns (ab_hit, xy_hit, ab_first_ok, violations, events, done):
    violations counts steps where X - Y > A - B while X >= Y has held at
    every step so far, and ab_first_ok is 1 unless A = B was first reached
    without X = Y having occurred at any step up to and including it.
    """
    a = a0
    b = b0
    x = a0
    y = b0
    ab_hit = np.uint8(1) if a == b else np.uint8(0)
    xy_hit = np.uint8(1) if x == y else np.uint8(0)
    ab_first_ok = np.uint8(0) if (a == b and x != y) else np.uint8(1)
    ab_done = a == b
    xy_done = x == y
    armed = x >= y
    viol = 0
    ev = 0
    while ev < ev_cap:
        if not ab_done and min(a, b) == 0:
            ab_done = True  # one species extinct: equality impossible from now on
        if not xy_done:
            d = x - y if x > y else y - x
            if (d + 1.0) * (d + 1.0) >= 50.0 * (x + y - 1):
                xy_done = True
        if ab_done and xy_done:
            break
        lam = float(a + b + a * b)
        if lam <= 0.0 or max(x, y) == 0:
            xy_done = True  # the process remains constant: no further moves
            break
        xi = rg.random()
        death = a * b / lam
        if xi < death:
            a -= 1
            b -= 1
        else:
            grow_x = xi < 1.0 - ((a + b) / lam) * (y / (x + y))
            if xi < 1.0 - b / lam:
                a += 1
            else:
                b += 1
            if grow_x:
                x += 1
            else:
                y += 1
        ev += 1
        if armed and x < y:
            armed = False
        if armed and x - y > a - b:
            viol += 1
        if x == y:
            xy_hit = np.uint8(1)
            xy_done = True
        if not ab_done and a == b:
            ab_hit = np.uint8(1)
            ab_done = True
            if xy_hit == np.uint8(0):
                ab_first_ok = np.uint8(0)
    done = 1 if (ab_done and xy_done) else 0
    return ab_hit, xy_hit, ab_first_ok, viol, ev, done


def ab_yule_batch(a0, b0, seeds, ev_cap=10**7):
    """One coupled (A, B)/(X, Y) run per seed; arrays of the kernel's returns."""
    n = len(seeds)
    ab_hit = np.empty(n, dtype=np.uint8)
    xy_hit = np.empty(n, dtype=np.uint8)
    ab_first_ok = np.empty(n, dtype=np.uint8)
    viol = np.empty(n, dtype=np.int64)
    events = np.empty(n, dtype=np.int64)
    done = np.empty(n, dtype=np.uint8)
    for i in range(n):
        rg = np.random.Generator(np.random.PCG64(int(seeds[i])))
        (
            ab_hit[i],
            xy_hit[i],
            ab_first_ok[i],
            viol[i],
            events[i],
            done[i],
        ) = ab_yule_run_kernel(rg, a0, b0, ev_cap)
    return ab_hit, xy_hit, ab_first_ok, viol, events, done
