"""Command line interface.

Every subcommand prints one JSON report and exits 0 when all checks pass,
1 when a check fails and 2 on bad input.  Reports carry no timestamps, so
identical input and flags give byte-identical output.
"""

from __future__ import annotations

import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click

from . import __version__, corpus, specio
from .ainftycy import (AInftyCategory, check_ainfty_relations, check_cyclic, check_nondegenerate,
                       check_pairing_symmetric, check_units)
from .chaincx import COMPLETE, ChainComplex, homology_dims
from .exactla import format_rational
from .hochschild import (DualityFailure, HigherMultiplication, b_operator_checks, build_normalized_complex,
                         coproduct, coproduct_checks, duality_check, hh_cohomology_dims)
from .surfcat import check_d_squared
from .tcftops import compare_b_operators, compare_with_hochschild

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
JOBS_ENV = "OPENTCFT_JOBS"


class InputError(click.ClickException):
    exit_code = EXIT_INPUT


def _jobs() -> int:
    raw = os.environ.get(JOBS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise InputError(f"{JOBS_ENV} must be an integer, got {raw!r}") from None


def _load(target: str) -> tuple[dict, str]:
    """A spec path or a corpus entry name -> (document, source description)."""
    p = Path(target)
    if p.is_file():
        try:
            return specio.load_path(p), str(target)
        except specio.ParseError as e:
            raise InputError(str(e)) from None
    try:
        return corpus.get(target).spec, f"corpus:{target}"
    except KeyError:
        raise InputError(f"{target!r} is neither a readable file nor a corpus entry") from None


def _build(doc):
    try:
        return specio.build(doc)
    except (specio.ParseError, specio.ResolutionError) as e:
        raise InputError(str(e)) from None
    except ValueError as e:
        # structural problems the constructor rejects (wrong degrees, bad units)
        raise InputError(f"invalid category: {e}") from None


def _degrees(text: str | None, default: range) -> list[int]:
    if text is None:
        return list(default)
    m = re.fullmatch(r"\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*", text)
    if not m:
        raise InputError(f"degree range must look like a..b, got {text!r}")
    a, b = int(m.group(1)), int(m.group(2))
    if a > b:
        raise InputError(f"empty degree range {text!r}")
    return list(range(a, b + 1))


def _check(name, ok, details=None, degrees=None, provenance=None) -> dict:
    out = {"name": name, "verdict": "pass" if ok else "fail", "details": details or {}}
    if degrees is not None:
        out["degrees"] = degrees
    if provenance:
        out["provenance"] = provenance
    return out


def _dims_table(dims: dict) -> list:
    return [{"degree": k, "dim": v, "flag": f} for k, (v, f) in sorted(dims.items())]


def _triplets(cx: ChainComplex) -> list:
    """Differentials as sparse (row, col, "p/q") triplets with basis labels."""
    out = []
    for k in cx.degrees():
        m = cx.d(k)
        out.append({
            "degree": k,
            "source_basis": [list(w) for w in cx.space.basis(k)],
            "target_basis": [list(w) for w in cx.space.basis(k - 1)],
            "entries": sorted([i, j, format_rational(v)] for i, j, v in m.entries()),
        })
    return out


def _emit(command: str, doc: dict | None, source: str | None, checks: list, extra=None) -> None:
    ok = all(c["verdict"] == "pass" for c in checks)
    report = {
        "tool": "opentcft",
        "version": __version__,
        "command": command,
        "input": source,
        "input_digest": specio.digest(doc) if doc is not None else None,
        "verdict": "pass" if ok else "fail",
        "checks": checks,
    }
    if extra:
        report.update(extra)
    click.echo(specio.dumps_report(report), nl=False)
    sys.exit(EXIT_PASS if ok else EXIT_FAIL)


def _validation_checks(cat: AInftyCategory, cy) -> list:
    reps = [check_ainfty_relations(cat), check_units(cat)]
    if cy is not None:
        reps += [check_nondegenerate(cy), check_pairing_symmetric(cy), check_cyclic(cy)]
    return [_check(r.name, r.ok, r.as_dict()) for r in reps]


def _dg_only(fn, *a):
    try:
        return fn(*a)
    except HigherMultiplication as e:
        raise InputError(f"{e}; supply a dg model (m_n = 0 for n >= 3) of the category") from None


@click.group()
@click.version_option(__version__, prog_name="opentcft")
@click.option("--json", "as_json", is_flag=True, default=True, help="JSON report (the only format).")
@click.option("--full", is_flag=True, help="Include differential matrices as sparse triplets.")
@click.pass_context
def main(ctx, as_json, full):
    """Exact checks for open TCFT algebra: A-infinity data, Hochschild (co)homology, surface signs."""
    ctx.obj = {"full": full}


@main.command()
@click.argument("spec")
def validate(spec):
    """A-infinity relations, units and (with a pairing) the CY axioms."""
    doc, src = _load(spec)
    cat, cy = _build(doc)
    _emit("validate", doc, src, _validation_checks(cat, cy))


@main.command()
@click.argument("spec")
@click.option("--max-length", "-L", default=4, show_default=True, type=click.IntRange(1, 8))
@click.option("--degrees", default=None, help="Degree range a..b (default 0..L-1).")
@click.option("--cohomology", is_flag=True, help="Also report Hochschild cochain dims HH^j for j in the range.")
@click.option("--b-operator", is_flag=True, help="Verify B^2 = 0 and Bd + dB = 0.")
@click.option("--strict", is_flag=True, help="Fail when a requested degree is truncated.")
@click.pass_context
def hh(ctx, spec, max_length, degrees, cohomology, b_operator, strict):
    """Normalized Hochschild homology dimensions with completeness flags."""
    doc, src = _load(spec)
    cat, cy = _build(doc)
    checks = _validation_checks(cat, cy)
    if not all(c["verdict"] == "pass" for c in checks):
        _emit("hh", doc, src, checks)
    degs = _degrees(degrees, range(0, max_length))
    hc = _dg_only(build_normalized_complex, cat, max_length)
    dims = homology_dims(hc.underlying, degs)
    truncated = [k for k, (_, f) in dims.items() if f != COMPLETE]
    checks.append(_check("hh_dims", not (strict and truncated),
                         {"max_length": max_length, "truncated": truncated, "strict": strict},
                         _dims_table(dims)))
    if cohomology:
        co = _dg_only(hh_cohomology_dims, cat, max_length, degs)
        checks.append(_check("hh_cohomology_dims", not (strict and any(f != COMPLETE for _, f in co.values())),
                             {"max_length": max_length}, _dims_table(co)))
    if b_operator:
        res = b_operator_checks(hc, degs)
        good = all(r["B2_zero"] and r["Bd_plus_dB_zero"] for r in res.values() if r["checked"])
        checks.append(_check("b_operator", good, {"per_degree": {str(k): v for k, v in sorted(res.items())}}))
    extra = {"differentials": _triplets(hc.underlying)} if ctx.obj["full"] else None
    _emit("hh", doc, src, checks, extra)


@main.command()
@click.argument("spec")
@click.option("--max-length", "-L", default=4, show_default=True, type=click.IntRange(1, 8))
@click.option("--degrees", default=None, help="Range of i in dim HH_i = dim HH^{d+i} (default -2..2).")
@click.option("--coproduct/--no-coproduct", "with_coproduct", default=False,
              help="Also check coassociativity and degree -d of the coproduct.")
def duality(spec, max_length, degrees, with_coproduct):
    """Calabi-Yau duality between Hochschild homology and cohomology."""
    doc, src = _load(spec)
    cat, cy = _build(doc)
    if cy is None:
        raise InputError("duality needs a spec with a pairing and a dimension")
    degs = _degrees(degrees, range(-2, 3))
    rep = _dg_only(duality_check, cy, max_length, degs)
    d = rep.as_dict()
    checks = [_check("duality", rep.ok, {"d": d["d"]}, d["degrees"])]
    if with_coproduct:
        try:
            res = coproduct_checks(coproduct(cy, max_length, degs))
        except DualityFailure as e:
            res = {"ok": False, "error": str(e)}
        checks.append(_check("coproduct", res["ok"], res))
    _emit("duality", doc, src, checks)


def _surf_one(args):
    n, d, alphabet = args
    return check_d_squared(n, d, alphabet)


@main.command("surfcat-check")
@click.option("--max-n", default=7, show_default=True, type=click.IntRange(1, 9))
@click.option("--shift", "shifts", multiple=True, type=int, help="Shift d; repeatable (default 0, 1, 2).")
@click.option("--alphabet", default=2, show_default=True, type=click.IntRange(1, 4))
def surfcat_check(max_n, shifts, alphabet):
    """d^2 = 0 on all disc and annulus generators, as reduced chains."""
    shifts = sorted(set(shifts)) if shifts else [0, 1, 2]
    jobs = _jobs()
    work = [(max_n, d, alphabet) for d in shifts]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(min(jobs, len(work))) as ex:
            results = list(ex.map(_surf_one, work))
    else:
        results = [_surf_one(w) for w in work]
    checks = []
    for d, r in zip(shifts, results):
        r = dict(r)
        r["per_arity"] = {str(k): v for k, v in r["per_arity"].items()}
        checks.append(_check(f"d_squared[d={d}]", r["ok"], r))
    _emit("surfcat-check", None, None, checks)


@main.command()
@click.argument("target")
@click.option("--max-length", "-L", default=4, show_default=True, type=click.IntRange(1, 6))
@click.option("--b-operator/--no-b-operator", default=True, show_default=True,
              help="Compare the annulus B with Connes' B.")
@click.pass_context
def equiv(ctx, target, max_length, b_operator):
    """Annulus tensor complex against normalized Hochschild chains."""
    doc, src = _load(target)
    cat, _ = _build(doc)
    res = _dg_only(compare_with_hochschild, cat, max_length)
    per = [{"degree": k, **v} for k, v in sorted(res["per_degree"].items())]
    details = {k: res[k] for k in ("length_bound", "global_sign", "bijection", "first_mismatch",
                                   "tensor_d_squared")}
    checks = [_check("tensor_vs_hochschild", res["ok"] and res["tensor_d_squared"], details, per)]
    if b_operator:
        b = compare_b_operators(cat, max_length)
        checks.append(_check("annulus_B_vs_connes_B", b["ok"],
                             {"per_degree": {str(k): v for k, v in sorted(b["per_degree"].items())}}))
    extra = None
    if ctx.obj["full"]:
        hc = build_normalized_complex(cat, max_length)
        extra = {"differentials": _triplets(hc.underlying)}
    _emit("equiv", doc, src, checks, extra)


@main.group("corpus")
def corpus_group():
    """Built-in example categories."""


@corpus_group.command("list")
def corpus_list():
    entries = []
    for e in corpus.list_corpus():
        entries.append({"name": e.name, "description": e.description, "digest": specio.digest(e.spec),
                        "expected": {k: {"value": v[0], "provenance": v[1], "oracle": v[2]}
                                     for k, v in sorted(e.expected.items())}})
    _emit("corpus list", None, None, [], {"entries": entries})


_HH_KEY = re.compile(r"hh_dims (-?\d+)(?:\.\.(-?\d+))? L=(\d+)")


def _expected_check(e, cat, cy, key, value, tag, oracle) -> dict:
    m = _HH_KEY.fullmatch(key)
    if m:
        a = int(m.group(1))
        b = int(m.group(2)) if m.group(2) else a
        dims = homology_dims(build_normalized_complex(cat, int(m.group(3))).underlying, range(a, b + 1))
        got = tuple(dims[k][0] for k in range(a, b + 1))
        complete = all(dims[k][1] == COMPLETE for k in dims)
        return _check(key, got == tuple(value) and complete,
                      {"expected": list(value), "got": list(got)}, _dims_table(dims), f"{tag}: {oracle}")
    if key == "duality_check":
        rep = duality_check(cy, 4, range(-2, 3))
        return _check(key, rep.ok == (value == "pass"), rep.as_dict(), provenance=f"{tag}: {oracle}")
    raise AssertionError(f"corpus entry {e.name} has an unknown expectation {key!r}")


@corpus_group.command("run")
@click.argument("name")
@click.option("--max-length", "-L", default=5, show_default=True, type=click.IntRange(1, 6))
def corpus_run(name, max_length):
    """Validate a corpus entry, compare with the brute-force oracle, check shipped expectations."""
    try:
        e = corpus.get(name)
    except KeyError as err:
        raise InputError(str(err.args[0])) from None
    cat, cy = e.build()
    checks = _validation_checks(cat, cy)
    try:
        cmp = corpus.compare_with_oracle(cat, max_length, range(0, max_length))
        checks.append(_check("oracle", cmp.ok, {"max_length": max_length},
                             [{"degree": k, "weights": [list(w) for w in ws], "match": v}
                              for k, ws, v in cmp.rows]))
    except corpus.SizeExceeded as err:
        checks.append(_check("oracle", True, {"skipped": str(err)}))
    for key, (value, tag, oracle) in sorted(e.expected.items()):
        checks.append(_expected_check(e, cat, cy, key, value, tag, oracle))
    _emit("corpus run", e.spec, f"corpus:{name}", checks)


if __name__ == "__main__":
    main()
