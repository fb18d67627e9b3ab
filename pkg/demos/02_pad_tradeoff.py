"""
The pad trade-off
=================

A uniform pad (p = 1/q) hides A perfectly but makes both shares dense.
Pushing p toward 1 keeps the shares sparse and leaks more of A via R.
"""
import numpy as np

from sparsepriv import get_field
from sparsepriv.analysis import mi_bruteforce, pad_stats
from sparsepriv.matrix import measure_sparsity
from sparsepriv.pad import PadParams, SourceModel, decode_pair, encode, sample_source

F = get_field(256)
s = 0.93
rng = np.random.default_rng(1)
A = sample_source(SourceModel(s, F), 400, 400, rng)
print(f"S(A) measured: {measure_sparsity(A):.4f}")

print(f"{'p':>8} {'S(R)':>8} {'S(A+R)':>8} {'eps1':>8} {'eps2':>8}  measured S(R), S(A+R)")
for p in (1 / 256, 0.25, 0.5, 0.75, 0.9, 1.0):
    params = PadParams.symmetric(p, F)
    st = pad_stats(s, params)
    B1, B2 = encode(A, params, rng)
    assert decode_pair(B1, B2) == A
    print(f"{p:8.4f} {st.s_pad:8.4f} {st.s_padded:8.4f} {st.eps1:8.1e} {st.eps2:8.4f}"
          f"  {measure_sparsity(B1):.4f}, {measure_sparsity(B2):.4f}")

# the closed form against the full joint PMF, at an asymmetric pad
params = PadParams(0.8, 0.1, F)
print("eps2 closed form vs brute force:", pad_stats(0.9, params).eps2, mi_bruteforce(0.9, params, "pad"))
