"""Sparse and private distributed matrix-vector multiplication over GF(q)."""

from .analysis import (
    LeakageBudget,
    PadStats,
    Pmf,
    check_monotonicity,
    collusion_leakage,
    entropy_q,
    mi_bruteforce,
    pad_stats,
    solve_p_star,
)
from .gf import Field, FieldElement, get_field
from .matrix import DenseMatrix, SparseMatrix, add_entrywise, matvec, measure_sparsity, split_rows
from .pad import PadParams, SourceModel, decode_pair, encode, generate_pad, sample_source
from .scheme import (
    Incomplete,
    ResponseSet,
    SchemeConfig,
    TaskPlan,
    build_plan,
    decode,
    recovery_thresholds,
    unique_tasks_seen,
)
from .sim import SimReport, TimingModel, run_simulation, sweep_sparsity_vs_time

__version__ = "0.1.0"
