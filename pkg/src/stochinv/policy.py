"""Policy structure analysis on solved value tables.

Turns the raw optimal-action table into multi-threshold (s_k, S_k) form,
checks the continuous order property that form relies on, verifies the
generalized convexity the cost tables are supposed to carry, and computes
lower-envelope diagnostics that explain which local minima of G are
reachable order-up-to levels.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .sdp import ValueTables

_KB_TOL = 1e-6


class CopViolated(Exception):
    """The optimal policy orders above a no-order region; carries the report."""

    def __init__(self, report: "CopReport"):
        super().__init__(f"continuous order property violated: {report.violation_witness}")
        self.report = report


class MalformedTable(Exception):
    """The action table does not decompose into threshold bands."""


class CopReport(NamedTuple):
    holds: bool
    ordering_set: tuple[tuple[int, int], ...]   # maximal [lo, hi] state intervals
    violation_witness: tuple[int, int] | None   # (x_noorder, x_order)

    def describe(self) -> str:
        parts = ", ".join(f"[{lo}, {hi}]" for lo, hi in self.ordering_set) or "(empty)"
        if self.holds:
            return f"continuous order property holds; ordering set {parts}"
        return (f"continuous order property violated; ordering set {parts}; "
                f"no order at {self.violation_witness[0]} but order at "
                f"{self.violation_witness[1]}")


class PeriodThresholds(NamedTuple):
    period: int
    pairs: tuple[tuple[int, int], ...]   # (s_k, S_k), k ascending
    s_m: int | None
    cop_holds: bool


class KBReport(NamedTuple):
    ok: bool
    witness: tuple[int, int, int, int] | None   # (x, a, y, b) failing the inequality


class QcePoint(NamedTuple):
    S: int                # leftmost state of a plateau that is a local min from the right
    on_envelope: bool
    nontrivial: bool


def _ordering_intervals(q_row: np.ndarray, x_min: int) -> tuple[tuple[int, int], ...]:
    idx = np.flatnonzero(q_row > 0)
    if idx.size == 0:
        return ()
    splits = np.flatnonzero(np.diff(idx) > 1) + 1
    return tuple((x_min + int(run[0]), x_min + int(run[-1]))
                 for run in np.split(idx, splits))


def check_cop(tables: ValueTables, period: int,
              from_state: int | None = None) -> CopReport:
    """Check that the set of states where ordering is optimal has no holes.

    The property holds when the ordering states form a single interval
    anchored at the bottom of the checked range (the whole grid unless
    from_state raises the floor, e.g. to skip states distorted by the lower
    grid edge). On violation the witness straddles the largest no-order
    gap: (last gap state, first ordering state above).
    """
    floor = tables.grid.x_min if from_state is None else from_state
    q_row = tables.Qstar[tables.row(period), tables.grid.index(floor):]
    intervals = _ordering_intervals(q_row, floor)
    if len(intervals) == 0:
        return CopReport(True, intervals, None)
    if len(intervals) == 1 and intervals[0][0] == floor:
        return CopReport(True, intervals, None)

    gaps = []   # (length, gap_hi, next_order_lo)
    if intervals[0][0] > floor:
        gaps.append((intervals[0][0] - floor, intervals[0][0] - 1, intervals[0][0]))
    for (_, hi), (lo, _) in zip(intervals, intervals[1:]):
        gaps.append((lo - hi - 1, lo - 1, lo))
    length, gap_hi, order_lo = max(gaps)
    return CopReport(False, intervals, (gap_hi, order_lo))


def extract_thresholds(tables: ValueTables, period: int,
                       from_state: int | None = None) -> PeriodThresholds:
    """Read the (s_k, S_k) threshold pairs off the optimal-action table.

    Walking the ordering states, maximal runs with a common order-up-to
    level x + Q(x) are threshold bands: the top state of the run is s_k and
    the shared level is S_k. Isolated fully-saturated states between bands
    are capacity slides (level moves one-for-one with x) and carry no pair,
    except at the very top where Q(s_m) = B pins S_m = s_m + B.

    from_state restricts both the order-property check and the extraction
    floor, for tables whose lowest states are distorted by the grid edge.
    """
    report = check_cop(tables, period, from_state)
    if not report.holds:
        raise CopViolated(report)
    if not report.ordering_set:
        return PeriodThresholds(period, (), None, True)

    lo, s_m = report.ordering_set[0]
    grid = tables.grid
    q = tables.Qstar[tables.row(period), grid.index(lo):grid.index(s_m) + 1]
    xs = np.arange(lo, s_m + 1)
    levels = xs + q
    cap = tables.instance.B

    pairs = []
    start = 0
    for stop in np.append(np.flatnonzero(np.diff(levels) != 0) + 1, levels.size):
        run_x = xs[start:stop]
        run_q = q[start:stop]
        top_x = int(run_x[-1])
        saturated_single = run_x.size == 1 and run_q[0] == cap
        if not saturated_single or top_x == s_m:
            pairs.append((top_x, int(levels[start])))
        start = stop

    for (s_a, big_a), (s_b, big_b) in zip(pairs, pairs[1:]):
        if not (s_a < s_b and big_a < big_b):
            raise MalformedTable(
                f"period {period}: bands ({s_a},{big_a}) and ({s_b},{big_b}) "
                "are not strictly increasing")
    for s_k, big_k in pairs:
        if not s_k < big_k:
            raise MalformedTable(f"period {period}: s={s_k} not below S={big_k}")
        if cap != math.inf and s_k < big_k - cap:
            raise MalformedTable(
                f"period {period}: band ({s_k},{big_k}) deeper than capacity {cap}")

    return PeriodThresholds(period, tuple(pairs), s_m, True)


def verify_kb_convexity(values, K: float, B: int | float, window: int = 400,
                        center: int | None = None, x0: int = 0) -> KBReport:
    """Check the two capacity-aware convexity inequalities on a sub-window.

    For all y <= x in the window and step sizes a, b in (0, B]:
      (K + g(x+a) - g(x)) / a >= (g(y) - g(y-b)) / b            (difference form)
      (K + g(x+a) - g(x)) / a >= (K + g(y) - g(y-B)) / B        (capacity form)
    A defect below -1e-6 is a violation. The window defaults to 400 states
    centered on `center` (array index; middle of the array when omitted).
    Witness coordinates are reported as x0 + index. With B infinite the step
    sizes are capped by the window and the capacity form is vacuous.
    """
    g_full = np.asarray(values, dtype=np.float64)
    if window > g_full.size:
        raise ValueError(f"window {window} exceeds array of size {g_full.size}")
    if center is None:
        center = g_full.size // 2
    lo = min(max(0, center - window // 2), g_full.size - window)
    g = g_full[lo:lo + window]
    n = g.size
    max_step = n - 1 if B == math.inf else min(int(B), n - 1)

    # t[i] = min over a of (K + g(i+a) - g(i)) / a, with the minimizing a
    t = np.full(n, np.inf)
    t_arg = np.zeros(n, dtype=np.int64)
    # m[j] = max over b of (g(j) - g(j-b)) / b, with the maximizing b
    m = np.full(n, -np.inf)
    m_arg = np.zeros(n, dtype=np.int64)
    for step in range(1, max_step + 1):
        up = (K + g[step:] - g[:-step]) / step
        better = up < t[:-step]
        t[:n - step][better] = up[better]
        t_arg[:n - step][better] = step
        down = (g[step:] - g[:-step]) / step
        better = down > m[step:]
        m[step:][better] = down[better]
        m_arg[step:][better] = step

    if B != math.inf and int(B) <= n - 1:
        cap = int(B)
        u = np.full(n, -np.inf)
        u[cap:] = (K + g[cap:] - g[:-cap]) / cap
    else:
        u = np.full(n, -np.inf)

    m_cum = np.maximum.accumulate(m)
    u_cum = np.maximum.accumulate(u)
    bad = (t < m_cum - _KB_TOL) | (t < u_cum - _KB_TOL)
    if not bad.any():
        return KBReport(True, None)

    i = int(np.flatnonzero(bad)[0])
    if t[i] < m_cum[i] - _KB_TOL:
        j = int(np.argmax(m[:i + 1]))
        witness = (x0 + lo + i, int(t_arg[i]), x0 + lo + j, int(m_arg[j]))
    else:
        j = int(np.argmax(u[:i + 1]))
        witness = (x0 + lo + i, int(t_arg[i]), x0 + lo + j, int(B))
    return KBReport(False, witness)


def qce_diagnostics(tables: ValueTables, period: int) -> list[QcePoint]:
    """Classify local minima of G between s_m and S_m against its lower envelope.

    The envelope is the running minimum of G from the left on the open
    interval (s_m, S_m). Each maximal plateau whose right neighbor is
    strictly higher is a local minimum from the right; it lies on the
    envelope when its leftmost point attains the running minimum, and it is
    nontrivial when the state just left of the plateau is strictly higher
    and also on the envelope (the left edge s_m counts: it sits strictly
    above everything in the interval).
    """
    entry = extract_thresholds(tables, period)
    if not entry.pairs:
        return []
    s_m = entry.s_m
    big_s_m = entry.pairs[-1][1]
    if big_s_m - s_m < 2:
        return []

    grid = tables.grid
    g_row = tables.G[tables.row(period)]
    dom = slice(grid.index(s_m + 1), grid.index(big_s_m - 1) + 1)
    g = g_row[dom]
    env = np.minimum.accumulate(g)

    points = []
    start = 0
    n = g.size
    for stop in np.append(np.flatnonzero(np.diff(g) != 0) + 1, n):
        # right neighbor of the plateau, falling back to the raw row at S_m
        right = g[stop] if stop < n else g_row[grid.index(big_s_m)]
        if right > g[start]:
            on_env = bool(g[start] == env[start])
            if not on_env:
                nontrivial = False
            elif start == 0:
                nontrivial = True
            else:
                nontrivial = bool(g[start - 1] > g[start]
                                  and g[start - 1] == env[start - 1])
            points.append(QcePoint(int(s_m + 1 + start), on_env, nontrivial))
        start = stop
    return points


