"""Bounded-horizon orbit density scans with exact obstruction search."""

from __future__ import annotations

import math
from typing import Iterable, Iterator

import numpy as np

from ..angles import arc_exact
from ..dynsys import CantorWord, Circle, CircleSpace, Denjoy, Finite, KleinClass, Net, Obstruction, Product, Solenoid, System, Torus, is_symbolic_point
from ..symreal import SymReal, rational_independence, sym_compare
from .reports import DensityReport

EXACT_PERIOD_LIMIT = 4096


def cover(blocks: Iterable[tuple[int, np.ndarray]], net: Net, n_orbits: int,
          stop_when_full: bool = True, until: int | None = None, state=None) -> tuple[np.ndarray, np.ndarray, int]:
    """Cells visited by each orbit.

    Returns ``(covered (B, M) bool, full_time (B,), steps)`` where
    ``full_time`` is the end of the chunk at which an orbit first covered
    every cell (``-1`` if never) and ``steps`` the number of times scanned.
    ``until`` stops after the chunk that reaches that many steps; pass the
    returned triple back as ``state`` to resume with the same block iterator.
    """
    M = net.size
    if state is None:
        covered = np.zeros(n_orbits * M, dtype=bool)
        full_time = np.full(n_orbits, -1, dtype=np.int64)
        steps = 0
    else:
        covered, full_time, steps = state[0].reshape(-1), state[1], state[2]
    rows = np.arange(n_orbits)[:, None] * M
    if stop_when_full and (full_time >= 0).all():
        return covered.reshape(n_orbits, M), full_time, steps
    for t0, blk in blocks:
        B, c, d = blk.shape
        idx = net.locate(blk.reshape(-1, d)).reshape(B, c)
        flat = (rows + idx)[idx >= 0]
        covered[flat] = True
        steps = t0 + c
        counts = covered.reshape(n_orbits, M).sum(axis=1)
        newly = (counts == M) & (full_time < 0)
        full_time[newly] = steps
        if stop_when_full and (full_time >= 0).all():
            break
        if until is not None and steps >= until:
            break
    return covered.reshape(n_orbits, M), full_time, steps


def _plain(p) -> bool:
    """Exact point whose coordinates are SymReals or symbols (no growing sine sums)."""
    if isinstance(p, (CantorWord, Finite)):
        return True
    if isinstance(p, Circle):
        return isinstance(p.s, SymReal)
    if isinstance(p, Torus):
        return all(isinstance(c, SymReal) for c in p.coords)
    if isinstance(p, Product):
        return _plain(p.left) and _plain(p.right)
    if isinstance(p, KleinClass):
        return _plain(p.rep)
    if isinstance(p, Solenoid):
        return _plain(p.base) and isinstance(p.height, SymReal)
    if isinstance(p, Denjoy):
        return isinstance(p.pos, SymReal)
    return False


def exact_period(S: System, x0, limit: int = EXACT_PERIOD_LIMIT):
    """Exact period of ``x0``: an int, ``math.inf``, or None when undecided.

    Without a period hook the orbit is stepped exactly, and only while its
    coordinates stay plain SymReals (sine sums grow with every step).
    """
    if S.period is not None:
        p = S.period(x0)
        if p is not None:
            return p
    if not is_symbolic_point(x0):
        return None
    p = x0
    for t in range(1, limit + 1):
        if not _plain(p):
            return None
        p = S.step(p)
        if p == x0:
            return t
    return None


def _farthest_on_circle(orbit: list) -> tuple[SymReal, SymReal]:
    """Midpoint of the largest gap of a finite exact orbit on the circle, and half that gap."""
    pts = sorted({p.s for p in orbit}, key=float)
    best = None
    for a, b in zip(pts, pts[1:] + [pts[0] + 1]):
        gap = b - a
        if best is None or sym_compare(gap, best[1]) > 0:
            best = (a, gap)
    a, gap = best
    mid = (a + gap / 2)
    mid = mid - 1 if sym_compare(mid, 1) >= 0 else mid
    return mid, gap / 2


def _period_obstruction(S: System, x0, p: int, net: Net, uncovered: np.ndarray) -> Obstruction | None:
    space = S.space
    card = space.cardinality
    if card is not None and p >= card:
        return None
    if p > EXACT_PERIOD_LIMIT * 16:
        return None
    orbit = S.orbit(x0, p)
    exact = is_symbolic_point(x0)
    distinct = len(set(orbit)) if exact else p
    if isinstance(space, CircleSpace) and exact:
        mid, half_gap = _farthest_on_circle(orbit)
        if half_gap == 0:
            return None
        return Obstruction("finite-orbit", f"orbit is a finite set of {distinct} points", Circle(mid),
                           float(half_gap), {"orbit_cardinality": distinct, "distance_exact": half_gap,
                                             "period": p})
    if len(uncovered) == 0:
        return None
    oenc = S.encode_many(orbit)
    cand = net.enc[uncovered]
    d = np.min(space.dist(cand[:, None, :], oenc[None, :, :]), axis=1)
    i = int(np.argmax(d))
    if d[i] <= 0:
        return None
    return Obstruction("finite-orbit", f"orbit is a finite set of {distinct} points", net.point(int(uncovered[i])),
                       float(d[i]), {"orbit_cardinality": distinct, "period": p})


def _rotation_obstruction(S: System, x0, net: Net, uncovered: np.ndarray) -> Obstruction | None:
    verdict = rational_independence(list(S.rotation))
    if verdict.independent or len(uncovered) == 0:
        return None
    n0, *k = verdict.witness
    c0 = sum((c * kk for c, kk in zip(S.coords(x0), k)), SymReal(0))
    fv = S.fcoords(net.enc[uncovered]) @ np.array(k, dtype=float)
    off = (fv - float(c0)) % 1.0
    off = np.minimum(off, 1.0 - off)
    i = int(np.argmax(off))
    w = net.point(int(uncovered[i]))
    cw = sum((c * kk for c, kk in zip(S.coords(w), k)), SymReal(0))
    delta = arc_exact(cw - c0)
    if delta == 0:
        return None
    norm = sum(abs(v) for v in k)
    bound = delta / norm
    return Obstruction(
        "invariant-character",
        f"c(x) = {' + '.join(f'{v}*x{j}' for j, v in enumerate(k) if v)} mod 1 is invariant "
        f"({n0} + sum k_i alpha_i = 0)",
        w, float(bound),
        {"character": list(k), "offset": int(n0), "level": c0, "level_offset": delta,
         "distance_lower_bound": bound},
    )


def _orbit_distance(S: System, x0, target_enc: np.ndarray, steps: int) -> float:
    best = math.inf
    for _, blk in S.chunks(S.space.encode(x0)[None], 0, steps):
        best = min(best, float(np.min(S.space.dist(blk[0], target_enc[None, :]))))
    return best


def find_obstruction(S: System, x0, net: Net, covered_row: np.ndarray, steps: int) -> Obstruction | None:
    """Exact reason the orbit of ``x0`` is not dense, if one is available."""
    uncovered = np.flatnonzero(~covered_row)
    p = exact_period(S, x0)
    if isinstance(p, int):
        ob = _period_obstruction(S, x0, p, net, uncovered)
        if ob is not None:
            return ob
    if S.rotation is not None and S.coords is not None and is_symbolic_point(x0):
        ob = _rotation_obstruction(S, x0, net, uncovered)
        if ob is not None:
            return ob
    if S.obstruction is not None:
        ob = S.obstruction(x0, net, uncovered)
        if ob is not None:
            # numeric cross-check of the claimed distance along the scanned orbit
            seen = _orbit_distance(S, x0, S.space.encode(ob.witness), max(steps, 1))
            ob.details["scanned_orbit_distance"] = seen
            if ob.distance is not None and seen < ob.distance - 1e-6:
                return None
            return ob
    return None


def _chunk_for(n_orbits: int) -> int:
    return max(256, (1 << 18) // max(1, n_orbits))


def orbit_blocks(S: System, starts_enc: np.ndarray, horizon: int) -> Iterator[tuple[int, np.ndarray]]:
    return S.chunks(starts_enc, 0, horizon, _chunk_for(starts_enc.shape[0]))


def _unreachable(ob: Obstruction, net: Net) -> bool:
    """The witness stays farther from the orbit than any cell around it is wide.

    A cell lies in a ball of radius ``net.radius`` about its representative,
    so it lies within ``2 * radius`` of any of its points; a proven distance
    bound beyond that means the cell containing the witness is never visited.
    """
    return ob.distance is not None and ob.distance > 2 * net.radius + 1e-12


FIRST_CHECK = 1 << 14


def scan_starts(S: System, starts: list, eps: float, horizon: int, op_samples: int | None = None,
                blocks=None) -> DensityReport:
    """Coverage of the eps-net by the orbits of ``starts``, plus obstruction search.

    The scan checks for an exact obstruction at 2^14 steps and at every
    fourfold step count after that.  It stops early only when the obstruction
    proves some cell is never visited, because then the verdict at the full
    horizon is already fixed.
    """
    net = S.space.net(eps)
    periods = [exact_period(S, x) if S.period is not None else None for x in starts]
    eff = horizon
    if all(isinstance(p, int) for p in periods):
        eff = min(horizon, max(periods))
    enc0 = S.encode_many(starts)
    gen = iter(blocks if blocks is not None else orbit_blocks(S, enc0, eff))
    state = None
    check = FIRST_CHECK
    early = None
    while True:
        state = cover(gen, net, len(starts), until=check, state=state)
        cov, full_time, steps = state
        if (full_time >= 0).all() or steps >= eff or steps < check:
            break
        for b in np.flatnonzero(full_time < 0):
            ob = find_obstruction(S, starts[b], net, cov[b], steps)
            if ob is not None and _unreachable(ob, net):
                early = (int(b), ob)
                break
        if early is not None:
            break
        check *= 4
    frac = cov.sum(axis=1) / net.size
    worst = int(np.argmin(frac))
    worst_frac = float(frac[worst])
    evidence = {"net_size": net.size, "net_radius": net.radius, "steps_scanned": steps,
                "cover_fractions": frac.round(6).tolist(), "full_cover_time": full_time.tolist()}
    if worst_frac == 1.0:
        return DensityReport(eps, horizon, len(starts), 1.0, None, "pass", None, evidence)
    candidates = [early] if early is not None else (
        (b, find_obstruction(S, starts[b], net, cov[b], steps)) for b in range(len(starts)) if frac[b] < 1.0)
    for b, ob in candidates:
        if ob is not None:
            evidence["obstructed_sample"] = b
            evidence["stopped_early"] = early is not None
            if "orbit_cardinality" in ob.details:
                evidence["orbit_cardinality"] = ob.details["orbit_cardinality"]
            return DensityReport(eps, horizon, len(starts), worst_frac, ob.witness, "fail", ob, evidence)
    uncovered = np.flatnonzero(~cov[worst])
    witness = net.point(int(uncovered[0]))
    evidence["uncovered_cells"] = int(len(uncovered))
    evidence["worst_sample"] = worst
    return DensityReport(eps, horizon, len(starts), worst_frac, witness, "inconclusive", None, evidence)


def minimality_scan(S: System, eps: float = 0.02, horizon: int = 1_000_000, samples: int = 16,
                    seed: int = 0) -> DensityReport:
    """Do ``samples`` orbits (the first from the base point) visit every eps-cell within ``horizon``?

    ``pass`` certifies that each sampled orbit segment is eps-dense.  A
    shortfall is ``fail`` only with an exact obstruction (finite orbit,
    invariant character of a rotation, or a system-specific invariant set);
    otherwise ``inconclusive`` with an unvisited cell as witness.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    starts = S.space.sample(samples, seed)
    return scan_starts(S, starts, eps, horizon)
