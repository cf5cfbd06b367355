"""
Differentials for a desuspended complex projective plane
=========================================================

Two classes x (degree 1) and y (degree 3) with y Sq^2 = x.  The module is
not unstable, so the spectral sequence has differentials.
"""

from destab import hopfss, modlib, singer
from destab.chart import ChartTable, render_chart

m = modlib.builtin("cp2-desusp")
print(m.name, {d: m.labels(d) for d in m.degrees()})

###############################################################################
# The unstable part keeps x only; y is not unstable.

L0 = singer.l_functor(m, 0, 6)
print("L_0:", {d: L0.labels(d) for d in L0.dims()})

###############################################################################
# Run pages 0..2 and look at the differentials.

run = hopfss.run_ss(m, 2, 12)
for page in run.pages:
    ranks = {d: r for d, r in page.differential_ranks().items() if r}
    print(f"d^{page.r}:", ranks or "zero")

# The first differential sends y to Q^1 x.
p0 = run.pages[0]
print(p0.V.label(0, 3), "->", p0.V.label(1, 2))

###############################################################################
# Q^3 y survives to E^infinity.

print("Q^3 y" in run.einf.label(1, 6))

table = ChartTable.from_series(run.einf_series(), run.einf, "E^inf", run.spec.T)
print(render_chart(table))
