"""Built-in modules, the JSON module file format, and duals of Steenrod quotients.

Builtin names::

    sphere:n        one class in degree n
    rp:n            reduced homology of RP^n, a_k Sq^i = binom(k-i, i) a_{k-i}
    rp4-ext         rp:4 plus a suspended copy (classes b1..b4 in degrees 2..5)
    cp2-desusp      x in degree 1, y in degree 3, y Sq^2 = x
    dual-steenrod:D the dual Steenrod algebra through degree D
    dual-hz:D       the dual of A/A Sq^1 through degree D
    dual-hz2r:D     dual-hz:D plus its suspension

Any name may carry a suffix ``@k`` to suspend by ``k``.

``dual-hz2r`` is the split module used for every ``r >= 2``; the dependence
on ``r`` is invisible to the algebra here.
"""

from __future__ import annotations

import json
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

from . import steenrod
from .amodule import FModule, submodule, suspend, validate
from .errors import ParseError, UnknownName, ValidationError
from .f2linalg import F2Matrix, Subspace, kernel_image

MAX_BUILTIN_DEGREE = 32
DATA_DIR = Path(__file__).with_name("data")
FILE_KEYS = {"name", "max_degree", "generators", "actions"}


def sphere(n: int) -> FModule:
    return FModule.from_actions(f"sphere:{n}", [("x", n)])


def rp(n: int) -> FModule:
    if n < 1:
        raise UnknownName(f"rp:{n} needs n >= 1")
    gens = [(f"a{k}", k) for k in range(1, n + 1)]
    acts = []
    for k in range(1, n + 1):
        for i in range(1, k):
            if steenrod.binom2(k - i, i):
                acts.append((i, f"a{k}", [f"a{k - i}"]))
    return FModule.from_actions(f"rp:{n}", gens, acts)


def rp4_ext() -> FModule:
    a = rp(4)
    b = suspend(a, 1)
    b_gens = [(lab.replace("a", "b"), d) for lab, d in b.generators()]
    b_acts = [(i, on.replace("a", "b"), [t.replace("a", "b") for t in val]) for i, on, val in b.actions()]
    return FModule.from_actions("rp4-ext", a.generators() + b_gens, a.actions() + b_acts)


def cp2_desusp() -> FModule:
    return FModule.from_actions("cp2-desusp", [("x", 1), ("y", 3)], [(2, "y", ["x"])])


def _dual_label(word: tuple) -> str:
    return steenrod.format_word(word) + "*"


@lru_cache(maxsize=None)
def dual_steenrod(top: int) -> FModule:
    """``A_*`` through degree ``top``: the right action dual to left multiplication.

    ``(b*) Sq^i = sum over admissible a of [coefficient of b in Sq^i a] a*``.
    """
    _check_feasible(top)
    bases = {n: steenrod.admissible_basis(n) for n in range(top + 1)}
    index = {n: {w: j for j, w in enumerate(ws)} for n, ws in bases.items()}
    basis = {n: [_dual_label(w) for w in ws] for n, ws in bases.items()}
    action = {}
    for n in range(1, top + 1):
        for i in range(1, n + 1):
            src, dst = bases[n], bases[n - i]
            # row for a* in degree n-i, column for b* in degree n
            rows = []
            for a in dst:
                prod = steenrod.adem_normalize_sq((i,) + a)
                r = 0
                for b in prod:
                    r |= 1 << index[n][b]
                rows.append(r)
            mat = F2Matrix(len(dst), len(src), rows)
            if not mat.is_zero():
                action[(i, n)] = mat
    return FModule(f"dual-steenrod:{top}", basis, action, top)


def left_ideal_basis(generators: Sequence[tuple], n: int) -> Subspace:
    """The degree ``n`` part of the left ideal ``A . S`` in the admissible basis."""
    words = steenrod.admissible_basis(n)
    index = {w: j for j, w in enumerate(words)}
    vecs = []
    for s in generators:
        ds = steenrod.degree(s)
        if ds > n:
            continue
        for a in steenrod.admissible_basis(n - ds):
            v = 0
            for w in steenrod.adem_normalize_sq(a + tuple(s)):
                v ^= 1 << index[w]
            vecs.append(v)
    return Subspace(len(words), vecs)


def dualize(ideal_generators: Sequence[tuple], top: int, name: str | None = None) -> FModule:
    """Dual of ``A / A.S`` through degree ``top``.

    This is the annihilator of the ideal inside ``A_*``, a right submodule.
    An empty ``S`` gives ``A_*`` itself.
    """
    full = dual_steenrod(top)
    if not ideal_generators:
        return full
    spaces = {}
    for n in range(top + 1):
        ideal = left_ideal_basis(ideal_generators, n)
        m = F2Matrix(ideal.dim, full.dim(n), list(ideal.basis))
        spaces[n] = kernel_image(m)[0]
    sub, _ = submodule(full, spaces, name or f"dual(A/A{ideal_generators})")
    return sub


@lru_cache(maxsize=None)
def dual_hz(top: int) -> FModule:
    _check_feasible(top)
    return dualize([(1,)], top, f"dual-hz:{top}")


@lru_cache(maxsize=None)
def dual_hz2r(top: int) -> FModule:
    a = dual_hz(top)
    b = suspend(a, 1)
    # the suspended copy is only known through top + 1; keep degrees <= top
    keep = {lab for lab, d in b.generators() if d <= top}
    gens = [(lab + "'", d) for lab, d in b.generators() if lab in keep]
    acts = [(i, on + "'", [t + "'" for t in val]) for i, on, val in b.actions() if on in keep]
    return FModule.from_actions(f"dual-hz2r:{top}", a.generators() + gens, a.actions() + acts, top)


def _check_feasible(top: int) -> None:
    if top < 0 or top > MAX_BUILTIN_DEGREE:
        raise UnknownName(f"degree bound {top} outside 0..{MAX_BUILTIN_DEGREE}")


def _parse_int(text: str, name: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise UnknownName(f"bad numeric argument in builtin {name!r}") from None


BUILTIN_NAMES = ("sphere", "rp", "rp4-ext", "cp2-desusp", "dual-steenrod", "dual-hz", "dual-hz2r")


def builtin(name: str, max_degree: int | None = None) -> FModule:
    """Resolve a builtin name such as ``rp:4`` or ``dual-hz:12@-1``."""
    full = name
    if name.startswith("builtin:"):
        name = name[len("builtin:"):]
    shift = 0
    if "@" in name:
        name, _, k = name.partition("@")
        shift = _parse_int(k, full)
    base, _, arg = name.partition(":")
    if base == "sphere":
        m = sphere(_parse_int(arg or "0", full))
    elif base == "rp":
        m = rp(_parse_int(arg, full))
    elif base == "rp4-ext" and not arg:
        m = rp4_ext()
    elif base == "cp2-desusp" and not arg:
        m = cp2_desusp()
    elif base in ("dual-steenrod", "dual-hz", "dual-hz2r"):
        top = _parse_int(arg, full) if arg else max_degree
        if top is None:
            raise UnknownName(f"{base} needs a degree bound, e.g. {base}:12")
        m = {"dual-steenrod": dual_steenrod, "dual-hz": dual_hz, "dual-hz2r": dual_hz2r}[base](top)
    else:
        raise UnknownName(f"unknown builtin {full!r}; known: {', '.join(BUILTIN_NAMES)}")
    if shift:
        m = suspend(m, shift).renamed(f"{m.name}@{shift}")
    return m


def to_dict(m: FModule) -> dict:
    return {
        "name": m.name,
        "max_degree": m.top,
        "generators": [{"id": lab, "deg": d} for lab, d in m.generators()],
        "actions": [{"sq": i, "on": on, "value": val} for i, on, val in m.actions()],
    }


def from_dict(data: dict, where: str = "<module>") -> FModule:
    if not isinstance(data, dict):
        raise ParseError(f"{where}: top level must be an object")
    extra = set(data) - FILE_KEYS
    if extra:
        raise ParseError(f"{where}: unknown keys {sorted(extra)}")
    missing = {"name", "generators"} - set(data)
    if missing:
        raise ParseError(f"{where}: missing keys {sorted(missing)}")
    top = data.get("max_degree")
    if top is not None and not isinstance(top, int):
        raise ParseError(f"{where}: max_degree must be an integer or null")
    gens = []
    for k, g in enumerate(data["generators"]):
        if not isinstance(g, dict) or set(g) != {"id", "deg"}:
            raise ParseError(f"{where}: generators[{k}] must have exactly id and deg")
        if not isinstance(g["id"], str) or not isinstance(g["deg"], int):
            raise ParseError(f"{where}: generators[{k}] has a bad id or deg")
        gens.append((g["id"], g["deg"]))
    ids = [g for g, _ in gens]
    if len(set(ids)) != len(ids):
        dup = sorted({g for g in ids if ids.count(g) > 1})
        raise ParseError(f"{where}: duplicate generator ids {dup}")
    known = set(ids)
    acts = []
    for k, a in enumerate(data.get("actions", [])):
        if not isinstance(a, dict) or set(a) != {"sq", "on", "value"}:
            raise ParseError(f"{where}: actions[{k}] must have exactly sq, on and value")
        if not isinstance(a["sq"], int) or a["sq"] < 1:
            raise ParseError(f"{where}: actions[{k}].sq must be an integer >= 1")
        for ref in [a["on"], *a["value"]]:
            if ref not in known:
                raise ParseError(f"{where}: actions[{k}] refers to unknown id {ref!r}")
        acts.append((a["sq"], a["on"], list(a["value"])))
    try:
        return FModule.from_actions(str(data["name"]), gens, acts, top)
    except ValidationError as exc:
        raise ValidationError(f"{where}: {exc}") from None


def save(m: FModule, path) -> None:
    Path(path).write_text(json.dumps(to_dict(m), indent=1) + "\n", encoding="utf-8")


def load(path, check: bool = True) -> FModule:
    p = Path(path)
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{p}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    m = from_dict(data, str(p))
    if check:
        validate(m)
    return m


def resolve(spec: str, max_degree: int | None = None) -> FModule:
    """A module path, or ``builtin:name``."""
    if spec.startswith("builtin:"):
        return builtin(spec, max_degree)
    return load(spec)


FIXTURES = ("rp:3", "rp:4", "rp4-ext", "cp2-desusp", "dual-steenrod:16", "dual-hz:16", "dual-hz2r:16")


def fixture_path(name: str) -> Path:
    return DATA_DIR / (name.replace(":", "-") + ".json")


def write_fixture_files(names: Iterable[str] = FIXTURES, directory: Path | None = None) -> list[Path]:
    out = []
    for name in names:
        path = fixture_path(name) if directory is None else Path(directory) / fixture_path(name).name
        save(builtin(name), path)
        out.append(path)
    return out
