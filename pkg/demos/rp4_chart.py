"""
The first page for RP^4 plus a suspended copy
==============================================

The input is unstable, so every differential vanishes and the first
page is already E^infinity.
"""

from destab import hopfss, modlib
from destab.chart import ChartTable, render_chart

m = modlib.builtin("rp4-ext")
run = hopfss.run_ss(m, 4, 8)

# no differentials
print(all(r == 0 for p in run.pages for r in p.differential_ranks().values()))

page = run.pages[0]
table = ChartTable.from_series(page.series(), page.V, "E^1 of RP^4 + S RP^4", 8)
print(render_chart(table))

# bottom row: powers of the degree one class
print(table.bottom_entries())

# the same table as CSV
print(render_chart(table, "csv"))
