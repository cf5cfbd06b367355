"""
Spectral sequences for Eilenberg-MacLane spectra
=================================================

The dual of A/A Sq^1 gives a polynomial algebra on a weight-one class in
E^infinity.  Adding a suspended copy adds an exterior class, and
desuspending the sum leaves a polynomial algebra again.
"""

from destab import hopfss, modlib
from destab.amodule import suspend

def totals(run, T):
    by_t = hopfss.series_by_total(run.einf_series())
    return [by_t.get(t, 0) for t in range(T + 1)]

###############################################################################
# Integral case.

run = hopfss.run_ss(modlib.dual_hz(12), 3, 10)
print("HZ        ", totals(run, 10))

###############################################################################
# Mod 2^r for r >= 2: the module splits as a sum.

run = hopfss.run_ss(modlib.dual_hz2r(12), 3, 10)
print("HZ/2^r    ", totals(run, 10))

###############################################################################
# Its desuspension.  The bottom class sits in degree -1.

run = hopfss.run_ss(suspend(modlib.dual_hz2r(12), -1), 3, 8)
print("S^-1 HZ/2^r", totals(run, 8))
