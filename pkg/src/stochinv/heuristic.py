"""Modified (s, S) heuristic.

Each period keeps only the top threshold pair of the optimal policy: order
up to S, or as close as capacity allows, whenever inventory is below s.
"""

from __future__ import annotations

from dataclasses import dataclass

from .policy import CopViolated, check_cop, extract_thresholds
from .sdp import ValueTables


@dataclass(frozen=True)
class ModifiedSSPolicy:
    """Per-period reorder threshold s and order-up-to level S.

    None entries mean the period never orders. cop_violated lists the
    1-based periods where the thresholds came from the topmost ordering
    interval of a table without the continuous order property.
    """

    s: tuple[int | None, ...]
    S: tuple[int | None, ...]
    cop_violated: tuple[int, ...] = ()

    def __post_init__(self):
        if len(self.s) != len(self.S):
            raise ValueError("s and S must have one entry per period")
        for s_t, big_t in zip(self.s, self.S):
            if (s_t is None) != (big_t is None):
                raise ValueError("s and S must be None together")
            if s_t is not None and not s_t < big_t:
                raise ValueError(f"need s < S, got ({s_t}, {big_t})")


def modified_ss_from_tables(tables: ValueTables,
                            screen_grid_edge: bool = True) -> ModifiedSSPolicy:
    """Extract the per-period top (s_m, S_m) pair from solved tables.

    Periods whose action table violates the continuous order property fall
    back to the highest ordering state and its order-up-to level, and are
    flagged in cop_violated. With screen_grid_edge the order-property check
    ignores states whose values are touched by the lower grid boundary.
    """
    s_list: list[int | None] = []
    big_list: list[int | None] = []
    flagged = []
    for period in range(1, tables.instance.horizon + 1):
        floor = tables.exact_from(period) if screen_grid_edge else None
        try:
            entry = extract_thresholds(tables, period, from_state=floor)
        except CopViolated:
            flagged.append(period)
            _, s_m = check_cop(tables, period, floor).ordering_set[-1]
            s_list.append(s_m)
            big_list.append(s_m + tables.qstar_at(period, s_m))
            continue
        if entry.pairs:
            s_list.append(entry.s_m)
            big_list.append(entry.pairs[-1][1])
        else:
            s_list.append(None)
            big_list.append(None)
    return ModifiedSSPolicy(tuple(s_list), tuple(big_list), tuple(flagged))


def apply_modified_ss(x: int, s: int, S: int, B: int | float) -> int:
    """Order quantity at inventory x: up to S capped at B when x is at or
    below the reorder point s, otherwise 0.

    Ordering at x = s mirrors the optimal table, which by construction of
    s_m places an order at the reorder point itself.
    """
    if x > s:
        return 0
    return int(min(S - x, B))
