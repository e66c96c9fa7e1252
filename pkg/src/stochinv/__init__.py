"""Finite-horizon capacitated stochastic lot sizing.

Backward dynamic programming over a discrete inventory grid, threshold
policy extraction, order-property and convexity diagnostics, a modified
(s, S) heuristic, common-random-number policy simulation, randomized
search for order-property violations, and a benchmark test bed.
"""

from .cex import (CexSearchParams, Violation, random_instance, search_cop_violations,
                  search_grid, v_monotonicity_report)
from .demand import PARAMETRIC_FAMILIES, DemandPMF, pmf_empirical, pmf_parametric
from .files import (InstanceFormatError, dump_instance, load_instance,
                    parse_instance, serialize_instance, thresholds_csv)
from .heuristic import ModifiedSSPolicy, apply_modified_ss, modified_ss_from_tables
from .policy import (CopReport, CopViolated, KBReport, MalformedTable,
                     PeriodThresholds, QcePoint, check_cop, extract_thresholds,
                     qce_diagnostics, verify_kb_convexity)
from .sdp import (DEFAULT_GRID, Grid, GridSpanError, Instance, ValueTables,
                  single_period_cost, solve)
from .simulate import (SimulationConfig, SimulationError, SimulationEstimate,
                       gap_with_estimates, modified_ss_policy, optimality_gap,
                       simulate_policy, table_policy)
from .testbed import (BenchmarkReport, DesignPoint, PointResult, build_design,
                      demand_patterns, run_benchmark)

__all__ = [
    "BenchmarkReport",
    "CexSearchParams",
    "CopReport",
    "CopViolated",
    "DEFAULT_GRID",
    "DemandPMF",
    "DesignPoint",
    "Grid",
    "GridSpanError",
    "Instance",
    "InstanceFormatError",
    "KBReport",
    "MalformedTable",
    "ModifiedSSPolicy",
    "PARAMETRIC_FAMILIES",
    "PeriodThresholds",
    "PointResult",
    "QcePoint",
    "SimulationConfig",
    "SimulationError",
    "SimulationEstimate",
    "ValueTables",
    "Violation",
    "apply_modified_ss",
    "build_design",
    "check_cop",
    "demand_patterns",
    "dump_instance",
    "extract_thresholds",
    "gap_with_estimates",
    "load_instance",
    "modified_ss_from_tables",
    "modified_ss_policy",
    "optimality_gap",
    "parse_instance",
    "pmf_empirical",
    "pmf_parametric",
    "qce_diagnostics",
    "random_instance",
    "run_benchmark",
    "search_cop_violations",
    "search_grid",
    "serialize_instance",
    "simulate_policy",
    "single_period_cost",
    "solve",
    "table_policy",
    "thresholds_csv",
    "v_monotonicity_report",
    "verify_kb_convexity",
]
