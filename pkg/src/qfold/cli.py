"""Command-line front end.

    qfold COMMAND INPUT.json [--format table|json] [--seed N] [--trials N]
          [--box LO:HI,...] [--k K] [--refine-budget N] [--output PATH]

Input documents are UTF-8 JSON; every rational is an integer or a "p/q"
string.  Exit status: 0 on success or a passing check, 1 on a failing
check, 2 on bad input or a module error.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
import tempfile
from fractions import Fraction

from . import __version__
from .algebra import QQ, make_algebra
from .charring import SubalgebraData, TorusCharacter
from .errors import ParseError, QfoldError
from .localization import localized_character, random_generic_beta, vertex_data
from .rootdata import build_root_datum, decompose_into_irreps
from .toric import SimplePolytope, bohr_sommerfeld, build_quasifold, quantize, reduce_in_stages
from .verify import (
    coadjoint_demo,
    digest,
    fmt_vec,
    localization_check,
    qr0_check,
    shift_check,
    stages_check,
    suspension_check,
)

COMMANDS = (
    "quantize",
    "bohr-sommerfeld",
    "reduce-stages",
    "localize",
    "decompose",
    "check-qr0",
    "check-shift",
    "check-stages",
    "check-localization",
    "check-suspension",
    "demo-coadjoint",
)


# ---------------------------------------------------------------------------
# parsing


def _rational(x, where):
    if isinstance(x, bool) or isinstance(x, float):
        raise ParseError("rationals must be integers or 'p/q' strings, not floats", where)
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"not a rational: {x!r}", where) from None
    raise ParseError(f"expected a rational, got {type(x).__name__}", where)


def _require(doc, key, where, kind=None):
    if not isinstance(doc, dict) or key not in doc:
        raise ParseError(f"missing field '{key}'", where)
    val = doc[key]
    if kind is not None and not isinstance(val, kind):
        raise ParseError(f"field '{key}' has the wrong type", f"{where}.{key}" if where else key)
    return val


def parse_algebra(doc, budget):
    if doc is None:
        return QQ if budget == QQ.budget else QQ.with_budget(budget)
    where = "algebra"
    gens = _require(doc, "generators", where, list)
    if not gens or not all(isinstance(g, str) for g in gens):
        raise ParseError("generators must be a nonempty list of names", f"{where}.generators")
    if len(set(gens)) != len(gens):
        raise ParseError("generator names repeat", f"{where}.generators")
    dim = len(gens)
    index = {g: i for i, g in enumerate(gens)}
    table = [[None] * dim for _ in range(dim)]
    for b in range(dim):
        table[0][b] = table[b][0] = [Fraction(int(i == b)) for i in range(dim)]
    given = set()
    for k, triple in enumerate(doc.get("table", [])):
        loc = f"{where}.table[{k}]"
        if not isinstance(triple, list) or len(triple) != 3:
            raise ParseError("entries are [a, b, coefficients]", loc)
        a, b, coeffs = triple
        if a not in index or b not in index:
            raise ParseError("unknown generator", loc)
        if not isinstance(coeffs, list) or len(coeffs) != dim:
            raise ParseError(f"need {dim} coefficients", loc)
        vec = [_rational(c, f"{loc}[2]") for c in coeffs]
        ia, ib = index[a], index[b]
        table[ia][ib] = vec
        given.add((ia, ib))
    for ia, ib in list(given):
        if (ib, ia) not in given:
            table[ib][ia] = table[ia][ib]
    for a in range(dim):
        for b in range(dim):
            if table[a][b] is None:
                raise ParseError(f"product {gens[a]}*{gens[b]} is not given", f"{where}.table")
    encl_doc = doc.get("enclosures", {})
    if not isinstance(encl_doc, dict):
        raise ParseError("enclosures map generator names to [lo, hi]", f"{where}.enclosures")
    encl = []
    for i, g in enumerate(gens):
        if g not in encl_doc:
            if i == 0:
                encl.append((1, 1))
                continue
            raise ParseError(f"no enclosure for {g}", f"{where}.enclosures")
        pair = encl_doc[g]
        loc = f"{where}.enclosures.{g}"
        if not isinstance(pair, list) or len(pair) != 2:
            raise ParseError("enclosures are [lo, hi]", loc)
        encl.append((_rational(pair[0], loc), _rational(pair[1], loc)))
    return make_algebra(gens, table, encl, budget)


def parse_element(ctx, x, where):
    if isinstance(x, list):
        if len(x) != ctx.dim:
            raise ParseError(f"need {ctx.dim} coefficients", where)
        return ctx.element([_rational(c, where) for c in x])
    if isinstance(x, dict):
        coeffs = [Fraction(0)] * ctx.dim
        for name, c in x.items():
            if name not in ctx.names:
                raise ParseError(f"unknown generator {name!r}", where)
            coeffs[ctx.names.index(name)] = _rational(c, f"{where}.{name}")
        return ctx.element(coeffs)
    return ctx.rational(_rational(x, where))


def parse_vector(ctx, xs, where, length=None):
    if not isinstance(xs, list):
        raise ParseError("expected a list", where)
    if length is not None and len(xs) != length:
        raise ParseError(f"expected {length} entries", where)
    return tuple(parse_element(ctx, x, f"{where}[{i}]") for i, x in enumerate(xs))


def parse_polytope(ctx, doc):
    where = "polytope"
    if not isinstance(doc, dict):
        raise ParseError("missing polytope section", where)
    n = _require(doc, "n", where, int)
    if n < 1:
        raise ParseError("n must be positive", f"{where}.n")
    facets = _require(doc, "facets", where, list)
    normals, consts = [], []
    for i, f in enumerate(facets):
        loc = f"{where}.facets[{i}]"
        if isinstance(f, dict):
            v, c = _require(f, "v", loc), _require(f, "c", loc)
        elif isinstance(f, list) and len(f) == 2:
            v, c = f
        else:
            raise ParseError("facets are {'v': [...], 'c': ...}", loc)
        normals.append(parse_vector(ctx, v, f"{loc}.v", n))
        consts.append(parse_element(ctx, c, f"{loc}.c"))
    return SimplePolytope.from_data(ctx, n, normals, consts)


def parse_subalgebra(ctx, doc, n):
    where = "subalgebra"
    if not isinstance(doc, dict):
        raise ParseError("missing subalgebra section", where)
    basis = _require(doc, "basis", where, list)
    vecs = tuple(parse_vector(ctx, v, f"{where}.basis[{i}]", n) for i, v in enumerate(basis))
    level = parse_vector(ctx, _require(doc, "level", where), f"{where}.level", n)
    complement = None
    if "complement" in doc:
        complement = [
            parse_vector(ctx, v, f"{where}.complement[{i}]", n) for i, v in enumerate(doc["complement"])
        ]
    return SubalgebraData(vecs, ctx), level, complement


def _int_list(xs, where):
    if not isinstance(xs, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in xs):
        raise ParseError("expected a list of integers", where)
    return tuple(xs)


def parse_group(doc, need_character=False):
    where = "group"
    if doc is None:
        doc = {"cartan_type": "A", "rank": 1}
    ctype = _require(doc, "cartan_type", where, str)
    rank = _require(doc, "rank", where, int)
    center = doc.get("center_rank", 0)
    datum = build_root_datum(ctype, rank, center)
    char = None
    if need_character:
        terms = _require(doc, "character", where, list)
        mapping = {}
        for i, t in enumerate(terms):
            loc = f"{where}.character[{i}]"
            if not isinstance(t, list) or len(t) != 2:
                raise ParseError("terms are [weight, multiplicity]", loc)
            w = _int_list(t[0], f"{loc}[0]")
            if len(w) != datum.weight_rank:
                raise ParseError(f"weights need {datum.weight_rank} entries", loc)
            if not isinstance(t[1], int):
                raise ParseError("multiplicities are integers", f"{loc}[1]")
            mapping[w] = mapping.get(w, 0) + t[1]
        char = TorusCharacter.from_mapping(mapping, datum.weight_rank)
    return datum, char


def parse_finite_group(doc):
    where = "finite_group"
    if not isinstance(doc, dict):
        raise ParseError("missing finite_group section", where)
    orders = _int_list(_require(doc, "orders", where), f"{where}.orders")
    pairing = _require(doc, "pairing", where, list)
    rows = [_int_list(r, f"{where}.pairing[{i}]") for i, r in enumerate(pairing)]
    return list(orders), rows


def parse_box(text, n):
    try:
        parts = [p.split(":") for p in text.split(",")]
        box = [(int(a), int(b)) for a, b in parts]
    except ValueError:
        raise ParseError(f"box must look like LO:HI,LO:HI, got {text!r}", "--box") from None
    if len(box) != n:
        raise ParseError(f"box needs {n} ranges", "--box")
    return box


def load_document(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(str(exc), path) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"{path}:{exc.lineno}:{exc.colno}") from None
    if not isinstance(doc, dict):
        raise ParseError("the document must be a JSON object", path)
    return doc


def input_digest(doc) -> str:
    """Digest of the problem data.  Enclosures are excluded: they only locate
    the real embedding and tightening them must not change any output."""
    stripped = dict(doc)
    if isinstance(stripped.get("algebra"), dict):
        stripped["algebra"] = {k: v for k, v in stripped["algebra"].items() if k != "enclosures"}
    return digest(stripped)


# ---------------------------------------------------------------------------
# commands


def _entries_json(q, result, root=False):
    out = []
    for e in result.entries:
        out.append(
            {
                "b": list(e.b),
                "xi": fmt_vec(e.root_xi if root else e.xi),
                "ambient": fmt_vec(tuple(c - x for c, x in zip(q.constants, e.b))),
            }
        )
    return out


def _quasifold(doc, args):
    ctx = parse_algebra(doc.get("algebra"), args.refine_budget)
    return build_quasifold(parse_polytope(ctx, doc.get("polytope")))


def cmd_quantize(doc, args):
    q = _quasifold(doc, args)
    res = quantize(q)
    return "ok", {"dimension": res.dimension, "entries": _entries_json(q, res)}


def cmd_bohr_sommerfeld(doc, args):
    q = _quasifold(doc, args)
    xi = parse_vector(q.ctx, _require(doc, "point", ""), "point", q.n)
    return "ok", {"point": fmt_vec(xi), "value": bohr_sommerfeld(q, xi)}


def cmd_reduce_stages(doc, args):
    q = _quasifold(doc, args)
    h, level, complement = parse_subalgebra(q.ctx, doc.get("subalgebra"), q.n)
    red = reduce_in_stages(q, h, level, complement)
    res = quantize(red)
    return "ok", {
        "n": red.n,
        "normals": [fmt_vec(v) for v in red.polytope.normals],
        "constants": fmt_vec(red.constants),
        "dimension": res.dimension,
        "entries": _entries_json(red, res, root=True),
    }


def cmd_localize(doc, args):
    ctx = parse_algebra(doc.get("algebra"), args.refine_budget)
    p = parse_polytope(ctx, doc.get("polytope"))
    vd = vertex_data(p)
    if "beta" in doc:
        beta = _int_list(doc["beta"], "beta")
    else:
        beta = random_generic_beta(vd, random.Random(args.seed))
    if args.box:
        box = parse_box(args.box, p.n)
    else:
        box = [(lo - 1, hi + 1) for lo, hi in zip(vd.lower, vd.upper)]
    char = localized_character(vd, beta, box)
    return "ok", {
        "beta": list(beta),
        "box": [list(b) for b in box],
        "dimension": char.dimension(),
        "character": [{"weight": list(w), "multiplicity": m} for w, m in char.terms],
    }


def cmd_decompose(doc, args):
    datum, char = parse_group(doc.get("group"), need_character=True)
    irreps = decompose_into_irreps(datum, char)
    return "ok", {
        "datum": datum.label,
        "irreps": [
            {"highest": list(lab.highest), "central": list(lab.central), "multiplicity": m}
            for lab, m in irreps.items()
        ],
    }


def _check(report):
    return report.verdict, report.to_json()


def cmd_check_qr0(doc, args):
    return _check(qr0_check(_quasifold(doc, args)))


def cmd_check_shift(doc, args):
    q = _quasifold(doc, args)
    xi = parse_vector(q.ctx, _require(doc, "point", ""), "point", q.n)
    return _check(shift_check(q, xi))


def cmd_check_stages(doc, args):
    q = _quasifold(doc, args)
    h, level, complement = parse_subalgebra(q.ctx, doc.get("subalgebra"), q.n)
    return _check(stages_check(q, h, level, complement))


def cmd_check_localization(doc, args):
    ctx = parse_algebra(doc.get("algebra"), args.refine_budget)
    p = parse_polytope(ctx, doc.get("polytope"))
    return _check(localization_check(p, args.trials, args.seed))


def cmd_check_suspension(doc, args):
    q = _quasifold(doc, args)
    h, level, _ = parse_subalgebra(q.ctx, doc.get("subalgebra"), q.n)
    orders, pairing = parse_finite_group(doc.get("finite_group"))
    return _check(suspension_check(q, orders, pairing, h, level))


def cmd_demo_coadjoint(doc, args):
    datum, _ = parse_group(doc.get("group"))
    k = args.k if args.k is not None else doc.get("k")
    if not isinstance(k, int) or isinstance(k, bool):
        raise ParseError("an integer k is required (document field or --k)", "k")
    return _check(coadjoint_demo(datum, k))


HANDLERS = {name: globals()["cmd_" + name.replace("-", "_")] for name in COMMANDS}


# ---------------------------------------------------------------------------
# output


def _cell(x):
    if isinstance(x, list):
        return "(" + ", ".join(_cell(y) for y in x) + ")"
    return str(x)


def render_table(doc) -> str:
    """Human-readable rendering: scalar fields as 'key: value', lists of
    records as tab-separated tables."""
    lines = []

    def emit(prefix, obj):
        for key, val in obj.items():
            name = f"{prefix}{key}"
            if isinstance(val, dict):
                emit(name + ".", val)
            elif isinstance(val, list) and val and all(isinstance(r, dict) for r in val):
                cols = list(val[0])
                lines.append(f"[{name}]")
                lines.append("\t".join(cols))
                for r in val:
                    lines.append("\t".join(_cell(r.get(c, "")) for c in cols))
            else:
                lines.append(f"{name}: {_cell(val) if val is not None else '-'}")

    emit("", doc)
    return "\n".join(lines) + "\n"


def write_atomic(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".qfold-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def build_parser():
    ap = argparse.ArgumentParser(prog="qfold", description="Quantization of toric quasifolds: computations and checks.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("input", nargs="?", help="problem document (JSON)")
    ap.add_argument("--format", choices=("table", "json"), default="table")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--box", help="integer box for localize, e.g. -2:4 or -1:2,-1:2")
    ap.add_argument("--k", type=int, help="level for demo-coadjoint")
    ap.add_argument("--refine-budget", type=int, default=64)
    ap.add_argument("--output", help="write the result here (atomically) instead of stdout")
    return ap


def run(argv=None):
    """Execute one command; returns (exit code, result document)."""
    args = build_parser().parse_args(argv)
    result = {
        "tool": "qfold",
        "version": __version__,
        "command": args.command,
        "input_digest": None,
        "seed": args.seed,
    }
    try:
        if args.input is None:
            if args.command != "demo-coadjoint":
                raise ParseError("an input document is required", "input")
            doc = {}
        else:
            doc = load_document(args.input)
        result["input_digest"] = input_digest(doc)
        status, output = HANDLERS[args.command](doc, args)
        result["status"] = status
        result["output"] = output
        code = 1 if status == "fail" else 0
    except QfoldError as exc:
        result["status"] = "error"
        result["error"] = {"type": type(exc).__name__, "message": str(exc)}
        code = 2
    return code, result


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    code, result = run(argv)
    if args.format == "json":
        text = json.dumps(result, indent=2, ensure_ascii=False) + "\n"
    else:
        text = render_table(result)
    if code == 2:
        err = result["error"]
        print(f"qfold: {err['type']}: {err['message']}", file=sys.stderr)
    if args.output:
        write_atomic(args.output, text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
