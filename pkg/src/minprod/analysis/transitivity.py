"""Hitting times T^n(U) meets V along sampled orbits, syndetic gaps of flows, fiber transitivity."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from ..dynsys import Ball, CircleSpace, Product, System, TorusSpace
from ..report import Report
from .density import find_obstruction, scan_starts, _chunk_for
from .reports import HittingSet

MAX_PAIRS = 4096


def _gaps(times: Sequence[int]) -> int | None:
    if not len(times):
        return None
    t = np.concatenate([[0], np.asarray(times, dtype=np.int64)])
    return int(np.max(np.diff(t)))


def net_pairs(S: System, eps: float) -> list[tuple[Ball, Ball]]:
    """Every ordered pair of net balls (radius ``net.radius`` about the representatives)."""
    net = S.space.net(eps)
    if net.size ** 2 > MAX_PAIRS:
        raise ValueError(f"{net.size}^2 net pairs exceed {MAX_PAIRS}; use a coarser eps or explicit pairs")
    balls = [Ball(p, net.radius) for p in net.points()]
    return [(u, v) for u in balls for v in balls]


def hitting_sets(S: System, pairs: Sequence[tuple[Ball, Ball]], horizon: int, per_axis: int = 3,
                 cap: int = 64) -> list[HittingSet]:
    """Times ``1 <= n <= horizon`` at which some sampled point of U lands in V.

    Pairs sharing a U share its orbit block; each V is tested with the space
    metric against its center and radius (closed ball).
    """
    space = S.space
    by_u: dict = {}
    for j, (u, _) in enumerate(pairs):
        by_u.setdefault((repr(u.center), u.radius), []).append(j)
    out: list[HittingSet | None] = [None] * len(pairs)
    for idx in by_u.values():
        u = pairs[idx[0]][0]
        grid = space.ball_grid(u.center, u.radius, per_axis)
        vs = [pairs[j][1] for j in idx]
        venc = np.stack([space.encode(v.center) for v in vs])
        vrad = np.array([v.radius for v in vs])
        hit = np.zeros((len(vs), horizon + 1), dtype=bool)
        for t0, blk in S.chunks(grid, 0, horizon + 1, _chunk_for(len(grid))):
            d = space.dist(blk[None, :, :, :], venc[:, None, None, :])  # (V, P, c)
            hit[:, t0:t0 + blk.shape[1]] = np.any(d <= vrad[:, None, None] + 1e-12, axis=1)
        hit[:, 0] = False
        for row, j in enumerate(idx):
            times = np.flatnonzero(hit[row])
            last = int(times[-1]) if len(times) else 0
            out[j] = HittingSet(pairs[j], times[:cap].tolist(), int(len(times)), _gaps(times),
                                horizon - last, horizon, len(times) > cap)
    return out


def transitivity_scan(S: System, eps: float = 0.1, horizon: int = 10_000,
                      pairs: Sequence[tuple[Ball, Ball]] | None = None, per_axis: int = 3,
                      cap: int = 64) -> tuple[list[HittingSet], Report]:
    """Hitting sets for every pair; pass iff all pairs are hit.

    An unhit pair gives ``fail`` when the orbit of its U center carries an
    exact obstruction (finite orbit, invariant character), else ``inconclusive``.
    """
    pairs = list(pairs) if pairs is not None else net_pairs(S, eps)
    hs = hitting_sets(S, pairs, horizon, per_axis, cap)
    missed = [h for h in hs if not h.hit]
    ev = {"pairs": len(hs), "hit_pairs": len(hs) - len(missed),
          "max_gap": max((h.max_gap for h in hs if h.hit), default=None),
          "hitting_sets": [h.to_json() for h in hs[:cap]]}
    params = {"epsilon": eps, "horizon": horizon, "per_axis": per_axis}
    if not missed:
        return hs, Report("transitivity_scan", "pass", params, ev)
    first = missed[0]
    witness = {"U": first.pair[0], "V": first.pair[1]}
    verdict = "inconclusive"
    x0 = first.pair[0].center
    try:
        net = S.space.net(eps)
        cov = np.zeros(net.size, dtype=bool)
        ob = find_obstruction(S, x0, net, cov, horizon)
    except (TypeError, ValueError, AttributeError):
        ob = None
    if ob is not None:
        verdict = "fail"
        ev["obstruction"] = ob
    ev["missed_pairs"] = len(missed)
    return hs, Report("transitivity_scan", verdict, params, ev, witness)


# -- flows -------------------------------------------------------------------


def syndetic_gaps(flow: Callable, V: Ball, V2: Ball, t_max, dt, per_axis: int = 5, random_draws: int = 0,
                  seed: int = 0, bound: float | None = None) -> Report:
    """Largest gap between sampled times t in [0, t_max] with phi_t(V) meeting V2.

    Times are the grid k*dt plus ``random_draws`` uniform draws.  Gaps are
    taken over ``0, hits..., t_max``, so no hits means a gap of t_max.  The
    verdict is pass when the largest gap is at most ``bound`` (default t_max/4).
    """
    dt, t_max = Fraction(dt), Fraction(t_max)
    if dt <= 0:
        raise ValueError("dt must be positive")
    ts = [k * dt for k in range(int(t_max / dt) + 1)]
    if random_draws:
        rng = np.random.default_rng(seed)
        ts += [Fraction(float(v)).limit_denominator(1 << 30) for v in rng.uniform(0, float(t_max), random_draws)]
    ts = sorted(set(ts))
    S0 = flow(ts[0])
    space = S0.space
    grid = space.ball_grid(V.center, V.radius, per_axis)
    target = space.encode(V2.center)
    hits = []
    for t in ts:
        img = flow(t).numeric_step(grid)
        if np.any(space.dist(img, target[None]) <= V2.radius + 1e-12):
            hits.append(t)
    marks = [Fraction(0)] + hits + [t_max]
    max_gap = max(b - a for a, b in zip(marks, marks[1:]))
    bound = float(t_max) / 4 if bound is None else bound
    ok = bool(hits) and float(max_gap) <= bound
    return Report("syndetic_gaps", "pass" if ok else "inconclusive",
                  {"t_max": t_max, "dt": dt, "random_draws": random_draws, "seed": seed, "bound": bound},
                  {"max_gap": float(max_gap), "hits": len(hits), "samples": len(ts),
                   "first_hits": [float(t) for t in hits[:16]]})


# -- fiber transitivity --------------------------------------------------------


def _fiber_space(S: System):
    return S.space.right


def _skew_blocks(skew: System, y0, zs: np.ndarray, horizon: int):
    """Orbit blocks of (y0, z_j) sharing one base orbit and one run of cocycle values."""
    base, f = skew.params["base"], skew.params["cocycle"]
    B = zs.shape[0]
    carry = np.zeros(zs.shape[1])
    y_enc = base.space.encode(y0)[None]
    for t0, blk in base.chunks(y_enc, 0, horizon, _chunk_for(B)):
        vals = f.eval_array(blk)[0]
        inc = np.cumsum(vals, axis=0)
        shift = (carry[None] + inc - vals) % 1.0
        carry = (carry + inc[-1]) % 1.0
        c = blk.shape[1]
        fib = (zs[:, None, :] + shift[None]) % 1.0
        yb = np.broadcast_to(blk, (B, c, blk.shape[2]))
        yield t0, np.concatenate([yb, fib], axis=-1)


def fiber_transitivity_check(skew: System, base_point=None, eps: float = 0.05, horizon: int = 1_000_000) -> Report:
    """Orbits from every fiber-net point over ``base_point`` must be eps-dense.

    Works for skew products and for direct products (the right factor is the
    fiber).  Skew products with a circle or torus fiber share one base orbit
    and one run of cocycle values across all fiber starts.
    """
    fiber = _fiber_space(skew)
    left = skew.params.get("base", skew.params.get("left"))
    if left is None:
        raise TypeError("fiber transitivity needs a skew or direct product")
    y0 = base_point if base_point is not None else left.space.base_point()
    fnet = fiber.net(eps)
    starts = [Product(y0, z) for z in fnet.points()]
    blocks = None
    if "cocycle" in skew.params and isinstance(fiber, (CircleSpace, TorusSpace)):
        blocks = _skew_blocks(skew, y0, fnet.enc, horizon)
    rep = scan_starts(skew, starts, eps, horizon, blocks=blocks)
    return rep.report("fiber_transitivity_check", {"fiber_points": len(starts), "base_point": y0})
