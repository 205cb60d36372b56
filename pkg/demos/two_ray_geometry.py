"""
Where the extremes of a cause and its effect live
=================================================

Take the smallest possible extremal model, ``Y1 = eta1`` and
``Y2 = beta * Y1 + eta2``. Conditional on something being large, exactly
one innovation is large, so every extreme point falls on one of two rays:
the ``Y2`` axis (only ``eta2`` was large) or the line ``Y2 = beta * Y1``
(``eta1`` was large and travelled down the edge).

In angle ``w = y1 / (y1 + y2)`` those rays sit at ``w = 0`` and
``w = 1 / (1 + beta)``. The support interval therefore touches 0 but not 1,
which is what makes the angular asymmetry coefficient positive.
"""

import numpy as np

from escm import AacConfig, Dag, EscmSpec, aac_pair, polarize, sample_escm_conditional

beta = 1.0
spec = EscmSpec(Dag(2, [(1, 2)]), activation=(1.0, 1.0), structural="sum", coeffs={(1, 2): beta})
rng = np.random.default_rng(0)
y, labels = sample_escm_conditional(spec, 5000, rng)

# rows activated at node 1 lie on the diagonal, rows activated at node 2 on the axis
print("rows per activation:", np.bincount(labels)[1:])
print("max |y2 - beta*y1| on node-1 rows:", np.abs(y[labels == 1, 1] - beta * y[labels == 1, 0]).max())
print("max y1 on node-2 rows:", y[labels == 2, 0].max())

# the angles of the largest points
series = polarize(y)
angles, counts = np.unique(series.w[:70].round(6), return_counts=True)
print("angles among the 70 largest points:", dict(zip(angles.tolist(), counts.tolist())))

# the estimator recovers [0, 1 / (1 + beta)] and a positive coefficient
res = aac_pair(y[:, 0], y[:, 1], AacConfig(k=70, lam=2.0))
print(f"support [{res.support.a_hat:.3f}, {res.support.b_hat:.3f}], tau(1,2) = {res.tau_uv:.3f}, "
      f"tau(2,1) = {res.tau_vu:.3f}")

# a weaker edge moves the diagonal ray towards w = 1 and shrinks tau
for beta in (0.25, 0.5, 2.0):
    spec = EscmSpec(Dag(2, [(1, 2)]), (1.0, 1.0), "sum", {(1, 2): beta})
    y, _ = sample_escm_conditional(spec, 5000, np.random.default_rng(1))
    res = aac_pair(y[:, 0], y[:, 1], AacConfig(k=70))
    print(f"beta = {beta:4}: ray at w = {1 / (1 + beta):.3f}, b_hat = {res.support.b_hat:.3f}, tau = {res.tau_uv:.3f}")
