"""
Simulated run with stragglers
=============================

Four untrusted workers hold shares of A + R, six trusted workers hold shares
of R.  With two layers each cluster survives one full straggler.
"""
import numpy as np

from sparsepriv import get_field
from sparsepriv.analysis import LeakageBudget
from sparsepriv.matrix import DenseMatrix
from sparsepriv.pad import PadParams, SourceModel, sample_source
from sparsepriv.scheme import TRUSTED, UNTRUSTED, SchemeConfig, format_plan, build_plan
from sparsepriv.sim import TimingModel, UndecodableError, run_simulation, sweep_sparsity_vs_time

F = get_field(256)
rng = np.random.default_rng(4)
A = sample_source(SourceModel(0.93, F), 120, 80, rng)
x = DenseMatrix.random(F, 80, 1, rng)
cfg = SchemeConfig(N1=4, N2=6, alpha_u=2, alpha_t=2, z=2, field=F)
print(format_plan(build_plan(A, A, cfg)))  # the assignment only depends on cfg and the row count

timing = TimingModel(straggler_slowdown=4.0, partial_stragglers={(UNTRUSTED, 1)},
                     full_stragglers={(TRUSTED, 3)}, jitter_rate=1.0, jitter_shift=0.5)
rep = run_simulation(A, x, PadParams.symmetric(0.6, F), cfg, timing, rng)
for key, value in rep.summary().items():
    print(f"{key} = {value}")

# a second full straggler in the trusted cluster is one too many
try:
    run_simulation(A, x, PadParams.symmetric(0.6, F), cfg,
                   TimingModel(full_stragglers={(TRUSTED, 0), (TRUSTED, 1)}), rng)
except UndecodableError as err:
    print("as expected:", err)

# sparser pads (larger budgets) finish sooner
budgets = [LeakageBudget(e, cfg.z, cfg.N2, cfg.alpha_t) for e in (0.0, 0.1, 0.5, 1.0)]
print(sweep_sparsity_vs_time(A, x, cfg, budgets, TimingModel(), rng).to_csv())
