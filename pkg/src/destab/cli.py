"""Command line interface.

Exit codes: 0 success, 1 validation, parse or usage error, 2 when the
truncated input does not determine the requested range.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys

from . import hopfss, modlib, singer
from .amodule import unstable_part, validate
from .chart import ChartTable, render_chart
from .dlfree import build_rs
from .errors import DestabError, TruncationInsufficient

log = logging.getLogger("destab")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def threads() -> int:
    """``DESTAB_THREADS``; 0 or unset means automatic.  The engine runs single threaded."""
    raw = os.environ.get("DESTAB_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        raise _UsageError(f"DESTAB_THREADS must be an integer, got {raw!r}") from None
    return n if n > 0 else (os.cpu_count() or 1)


def _table(rows: list[dict], fmt: str, title: str) -> str:
    """Degree tables for the module-valued commands."""
    if fmt == "json":
        return json.dumps({"title": title, "degrees": rows}, indent=1) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["degree", "dim", "basis"])
        for r in rows:
            w.writerow([r["degree"], r["dim"], ";".join(r["basis"])])
        return buf.getvalue()
    lines = [title]
    for r in rows:
        lines.append(f"  {r['degree']:>4}  dim {r['dim']:<3} {', '.join(r['basis'])}")
    if not rows:
        lines.append("  (zero in range)")
    return "\n".join(lines) + "\n"


def _module(args):
    return modlib.resolve(args.module, args.max_degree)


def cmd_validate(args) -> str:
    m = _module(args)
    return str(validate(m)) + "\n"


def cmd_unstable(args) -> str:
    m = _module(args)
    sub, _ = unstable_part(m)
    rows = [{"degree": d, "dim": sub.dim(d), "basis": sub.labels(d)} for d in sub.degrees() if sub.dim(d)]
    return _table(rows, args.format, f"unstable part of {m.name}")


def cmd_rs(args) -> str:
    m = _module(args)
    R = build_rs(m, args.s, args.max_degree)
    rows = []
    if m.degrees():
        for n in range(R.bottom(), args.max_degree + 1):
            if R.dim(n):
                rows.append({"degree": n, "dim": R.dim(n), "basis": R.labels(n)})
    return _table(rows, args.format, f"R_{args.s}({m.name})")


def cmd_derived(args) -> str:
    m = _module(args)
    res = singer.derived_functor(m, args.s, args.max_degree)
    rows = [{"degree": d, "dim": res.dim(d), "basis": res.labels(d)} for d in sorted(res.parts) if res.dim(d)]
    return _table(rows, args.format, f"Omega^infty_{args.s}({m.name})")


def cmd_ls(args) -> str:
    m = _module(args)
    res = singer.l_functor(m, args.s, args.max_degree)
    rows = [{"degree": d, "dim": res.dim(d), "basis": res.labels(d)} for d in sorted(res.spaces) if res.dim(d)]
    return _table(rows, args.format, f"L_{args.s}({m.name})")


def _run(args) -> hopfss.SSRun:
    m = _module(args)
    log.info("using %d thread(s)", threads())
    run = hopfss.run_ss(m, args.max_s, args.max_degree)
    if run.spec.requested is not None:
        print(
            f"note: input determines total degree <= {run.spec.T} only; chart truncated there",
            file=sys.stderr,
        )
    return run


def _page_json(page: hopfss.SSPage) -> dict:
    V = page.V
    return {
        "page": page.r,
        "columns": [
            {"k": k, "primitive_dims": {str(d): V.dim(k, d) for d in V.degrees(k)}}
            for k in range(V.K + 1)
        ],
        "differential_ranks": {str(d): r for d, r in sorted(page.differential_ranks().items()) if r},
        "series": _series_json(page.series()),
    }


def _series_json(series) -> list[dict]:
    return [{"weight": w, "internal": n, "dim": c} for (w, n), c in sorted(series.items())]


def _select(run: hopfss.SSRun, page: str | None):
    if page is None or page in ("inf", "infinity"):
        return run.einf, run.einf_series(), "E^inf"
    try:
        r = int(page)
    except ValueError:
        raise _UsageError(f"--page must be a power of two or 'inf', got {page!r}") from None
    s = r.bit_length() - 1
    if r < 1 or r != 2 ** s:
        raise _UsageError(f"--page must be a power of two, got {r}")
    if s >= len(run.pages):
        return run.einf, run.einf_series(), f"E^{r} (= E^inf past the last differential)"
    p = run.pages[s]
    return p.V, p.series(), f"E^{r}"


def cmd_ss(args) -> str:
    run = _run(args)
    V, series, name = _select(run, args.page)
    table = ChartTable.from_series(series, V, f"{name} of {run.module.name}, t <= {run.spec.T}", run.spec.T)
    if args.format == "json":
        doc = {
            "module": run.module.name,
            "max_s": run.spec.K,
            "max_total_degree": run.spec.T,
            "pages": [_page_json(p) for p in run.pages],
            "e_infinity": _series_json(run.einf_series()),
            "chart": table.to_json(),
        }
        return json.dumps(doc, indent=1) + "\n"
    if args.format == "csv":
        return render_chart(table, "csv")
    lines = [f"spectral sequence of {run.module.name}: columns 0..{run.spec.K}, total degree <= {run.spec.T}"]
    for p, chk in zip(run.pages, run.checks):
        ranks = {d: r for d, r in sorted(p.differential_ranks().items()) if r}
        desc = ", ".join(f"deg {d}: rank {r}" for d, r in ranks.items()) or "zero"
        lines.append(f"  d^{p.r}: {desc}")
    lines.append("  page transitions verified against L_s and the next page")
    lines.append("")
    return "\n".join(lines) + render_chart(table, "text")


def cmd_chart(args) -> str:
    run = _run(args)
    V, series, name = _select(run, args.page or "1")
    table = ChartTable.from_series(series, V, f"{name} of {run.module.name}, t <= {run.spec.T}", run.spec.T)
    return render_chart(table, args.format)


def cmd_builtin(args) -> str:
    if not args.module:
        return "\n".join(modlib.BUILTIN_NAMES) + "\n"
    m = modlib.builtin(args.module, args.max_degree)
    if args.format == "text":
        known = "complete" if m.top is None else f"determined through degree {m.top}"
        lines = [f"{m.name} ({known})"]
        for d in m.degrees():
            lines.append(f"  {d:>4}: {', '.join(m.labels(d))}")
        acts = m.actions()
        for i, on, val in acts:
            lines.append(f"  {on} Sq^{i} = {' + '.join(val)}")
        return "\n".join(lines) + "\n"
    return json.dumps(modlib.to_dict(m), indent=1) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="destab", description="Derived functors of destabilization and the algebraic spectral sequence.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help, needs_degree=True, s=False, max_s=False, page=False, module_optional=False):
        c = sub.add_parser(name, help=help)
        c.add_argument("module", nargs="?" if module_optional else None, help="module file or builtin:name")
        c.add_argument("--max-degree", type=int, required=needs_degree)
        c.add_argument("--format", choices=("text", "json", "csv"), default="text")
        if s:
            c.add_argument("--s", type=int, default=0)
        if max_s:
            c.add_argument("--max-s", type=int, default=2)
        if page:
            c.add_argument("--page", default=None, help="page 2^k, or 'inf'")
        c.set_defaults(fn=fn)

    add("validate", cmd_validate, "check the Adem relations", needs_degree=False)
    add("unstable", cmd_unstable, "largest unstable submodule", needs_degree=False)
    add("rs", cmd_rs, "free Dyer-Lashof module R_s", s=True)
    add("derived", cmd_derived, "derived functors of destabilization", s=True)
    add("ls", cmd_ls, "the functor L_s", s=True)
    add("ss", cmd_ss, "run the algebraic spectral sequence", max_s=True, page=True)
    add("chart", cmd_chart, "chart of one page", max_s=True, page=True)
    add("builtin", cmd_builtin, "list or print builtin modules", needs_degree=False, module_optional=True)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        out = args.fn(args)
    except TruncationInsufficient as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DestabError, _UsageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
