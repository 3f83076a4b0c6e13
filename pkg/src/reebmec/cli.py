"""
Command-line front end.

Exit codes: 0 ok, 1 check failed, 2 bad input, 3 undefined result,
4 incomplete generator data, 5 dimension-3 guard, 6 degenerate endpoint.
"""

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import catalog, manifest, suites
from .errors import (
    DegenerateEndpointError,
    DimensionThreeError,
    IncompleteDataError,
    ManifestError,
    ModelValidationError,
    NotSubcriticalError,
    ReebMecError,
    UndefinedMecError,
)
from .indices import (
    BlockPath,
    conley_zehnder,
    conley_zehnder_rot,
    dgw_index,
    mean_index,
    robbin_salamon,
    unitary_index,
)
from .mec import (
    GENERATOR,
    MODES,
    SurgeryStep,
    af_surgery,
    mec,
    oracle_convergence,
    surgery_apply,
    surgery_generators,
)
from .orbit_model import AFModel, af_companion, validate
from .symplin import SympPath, rotation_path

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_UNDEFINED = 3
EXIT_INCOMPLETE = 4
EXIT_DIM3 = 5
EXIT_DEGENERATE = 6


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _code_for(exc):
    if isinstance(exc, DegenerateEndpointError):
        return EXIT_DEGENERATE
    if isinstance(exc, DimensionThreeError):
        return EXIT_DIM3
    if isinstance(exc, IncompleteDataError):
        return EXIT_INCOMPLETE
    if isinstance(exc, UndefinedMecError):
        return EXIT_UNDEFINED
    return EXIT_INPUT


# ---------------------------------------------------------------------------
# Output helpers


def _q_human(q, approx):
    s = manifest.format_fraction(q)
    if approx and q is not None:
        s += f" (~{float(q):.12g})"
    return s


def _q_machine(q):
    return None if q is None else manifest.fraction_to_json(q, machine=True)


def _mec_machine(v):
    return {
        "chi_plus": _q_machine(v.chi_plus),
        "chi_minus": _q_machine(v.chi_minus),
        "chi": _q_machine(v.chi),
        "defined": v.defined,
    }


def _mec_human(v, approx):
    return (
        f"chi+ = {_q_human(v.chi_plus, approx)}, chi- = {_q_human(v.chi_minus, approx)}, "
        f"chi = {_q_human(v.chi, approx)}"
    )


def _emit(out, args, doc, lines):
    if args.json:
        out.write(json.dumps(doc, sort_keys=True) + "\n")
    else:
        for line in lines:
            out.write(line + "\n")


# ---------------------------------------------------------------------------
# Model loading


CATALOG_FLAGS = {"n": "n", "p": "p", "k": "k", "chi_b": "chi_B", "c1": "c1_pairing"}


def load_model(source, args):
    """Model and metadata from a manifest path or `catalog:<name>`."""
    if source.startswith("catalog:"):
        name = source.split(":", 1)[1]
        if name not in catalog.CATALOG:
            raise CliError(
                f"unknown catalog entry {name!r}; known: {', '.join(sorted(catalog.CATALOG))}",
                EXIT_INPUT,
            )
        params = {}
        for flag, key in CATALOG_FLAGS.items():
            val = getattr(args, flag, None)
            if val is not None:
                params[key] = val
        try:
            doc = catalog.emit(name, **params)
        except ValueError as exc:
            raise CliError(str(exc), EXIT_INPUT) from None
        model = manifest.model_from_dict(doc)
        meta = doc["metadata"]
    else:
        try:
            model, meta = manifest.load(source)
        except OSError as exc:
            raise CliError(f"cannot read {source}: {exc.strerror}", EXIT_INPUT) from None
    violations = validate(model)
    if violations:
        raise ModelValidationError(violations)
    return model, meta


def _add_catalog_flags(p, handle=True):
    g = p.add_argument_group("catalog parameters (for catalog:<name> manifests)")
    g.add_argument("--n", type=int, help="half-dimension")
    g.add_argument("--p", type=int, help="Ustilovsky exponent")
    if handle:
        g.add_argument("--k", dest="k", type=int, help="handle index (sphere_with_handle)")
    g.add_argument("--chi-b", dest="chi_b", type=int, help="Euler characteristic of the base")
    g.add_argument("--c1", type=int, help="pairing of c_1 with the Euler class")


# ---------------------------------------------------------------------------
# Commands


def cmd_mec(args, out):
    model, _ = load_model(args.manifest, args)
    v = mec(model, linearized=args.linearized)
    doc = _mec_machine(v)
    lines = [_mec_human(v, args.approx)]
    if v.note:
        doc["note"] = v.note
        lines.append(f"note: {v.note}")
    _emit(out, args, doc, lines)
    return EXIT_OK if v.defined else EXIT_UNDEFINED


def _parse_int_list(text):
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise CliError(f"cannot read integer list {text!r}", EXIT_INPUT) from None


def cmd_oracle(args, out):
    model, _ = load_model(args.manifest, args)
    Ns = [n for chunk in args.max_degree for n in _parse_int_list(chunk)]
    if any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise CliError("--max-degree values must be strictly increasing", EXIT_INPUT)
    rep = oracle_convergence(model, Ns, side=args.side)
    devs = rep.deviations()
    rows = []
    for N, est, dev in zip(rep.N, rep.estimates, devs or [None] * len(rep.N)):
        rows.append({"N": N, "estimate": _q_machine(est), "deviation": _q_machine(dev)})
    ok = devs is None or devs[-1] <= 2 * max(devs[0], 1)
    doc = {
        "side": args.side,
        "rows": rows,
        "fitted_limit": _q_machine(rep.fitted_limit),
        "closed_form": _q_machine(rep.closed_form),
        "max_dev": _q_machine(rep.max_dev),
        "bounded": ok,
    }
    lines = [f"{'N':>10}  {'chi_N/N':>24}  {'|est - closed| * N':>20}"]
    for r, N, est, dev in zip(rows, rep.N, rep.estimates, devs or [None] * len(rep.N)):
        lines.append(
            f"{N:>10}  {_q_human(est, args.approx):>24}  {_q_human(dev, args.approx):>20}"
        )
    lines.append(f"fitted limit = {_q_human(rep.fitted_limit, args.approx)}")
    lines.append(f"closed form  = {_q_human(rep.closed_form, args.approx)}")
    if not ok:
        lines.append("FAIL: deviation constant grows with N (not O(1))")
    _emit(out, args, doc, lines)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_surgery(args, out):
    model, _ = load_model(args.manifest, args)
    ks = [k for chunk in args.surgery_k for k in _parse_int_list(chunk)]
    if not ks:
        raise CliError("give at least one surgery index with --k", EXIT_INPUT)
    value = mec(model, linearized=args.linearized)
    if not isinstance(model, AFModel):
        model = af_companion(model)
    steps = [{"k": None, **_mec_machine(value)}]
    lines = [f"start: {_mec_human(value, args.approx)}"]
    for k in ks:
        step = SurgeryStep(k, model.n, args.mode, args.linearized)
        model = af_surgery(model, k, linearized=args.linearized)
        value = surgery_apply(value, step)
        degrees = surgery_generators(model.n, k, args.degree_cutoff)
        steps.append({"k": k, **_mec_machine(value), "injected_degrees": degrees})
        lines.append(f"k={k}: {_mec_human(value, args.approx)}")
        lines.append(f"      injected degrees <= {args.degree_cutoff}: {degrees}")
    _emit(out, args, {"mode": args.mode, "steps": steps}, lines)
    return EXIT_OK


INDEX_KINDS = ("cz", "rs", "mean", "unitary", "dgw")


def cmd_index(args, out):
    wanted = [k for k in INDEX_KINDS if getattr(args, k)]
    if args.all or not wanted:
        wanted = list(INDEX_KINDS)
    explicit = not args.all and bool([k for k in INDEX_KINDS if getattr(args, k)])
    rates = None
    if args.rotation is not None:
        try:
            rates = [float(x) for x in args.rotation.replace(",", " ").split()]
        except ValueError:
            raise CliError(f"cannot read rates {args.rotation!r}", EXIT_INPUT) from None
        if not rates:
            raise CliError("--rotation needs at least one rate", EXIT_INPUT)
        path = rotation_path(rates, args.T, args.samples)
    else:
        try:
            with open(args.path, encoding="utf-8") as fh:
                path = SympPath.from_json(fh.read())
        except OSError as exc:
            raise CliError(f"cannot read {args.path}: {exc.strerror}", EXIT_INPUT) from None
        except (ValueError, TypeError, KeyError) as exc:
            raise CliError(f"invalid path file: {exc}", EXIT_INPUT) from None
    res, notes = {}, []
    if "cz" in wanted:
        try:
            res["cz"] = conley_zehnder(path)
        except DegenerateEndpointError as exc:
            if explicit:
                raise
            res["cz"] = None
            notes.append(f"cz undefined: {exc}")
    if "rs" in wanted:
        if rates is None:
            if explicit:
                raise CliError("rs needs an analytic path (--rotation)", EXIT_INPUT)
            notes.append("rs skipped: sampled paths carry no analytic descriptor")
        else:
            res["rs"] = robbin_salamon(BlockPath(rates=tuple(rates), T=args.T))
    if "mean" in wanted:
        m = mean_index(path, args.k_max)
        res["mean"] = m.value
        res["mean_error"] = m.error
    if "unitary" in wanted:
        res["unitary"] = unitary_index(path)
    if "dgw" in wanted:
        res["dgw"] = dgw_index(path.endpoint)
    # cross-checks between algorithms that apply to the same input
    disagree = []
    if rates is not None and res.get("cz") is not None:
        try:
            closed = conley_zehnder_rot(rates, args.T)
        except DegenerateEndpointError:
            closed = None
        if closed is not None and closed != res["cz"]:
            disagree.append(f"cz={res['cz']} but closed form gives {closed}")
        if "rs" in res and res["rs"] != res["cz"]:
            disagree.append(f"cz={res['cz']} but rs={res['rs']}")
    doc = {}
    lines = []
    for key, val in res.items():
        if isinstance(val, Fraction):
            doc[key] = _q_machine(val)
            lines.append(f"{key} = {_q_human(val, args.approx)}")
        elif val is None:
            doc[key] = None
            lines.append(f"{key} = undefined")
        else:
            doc[key] = val
            lines.append(f"{key} = {val!r}" if isinstance(val, int) else f"{key} = {val:.12g}")
    doc["notes"] = notes
    doc["disagreements"] = disagree
    lines += [f"note: {n}" for n in notes]
    lines += [f"FAIL: {d}" for d in disagree]
    _emit(out, args, doc, lines)
    return EXIT_FAIL if disagree else EXIT_OK


def cmd_catalog(args, out):
    if args.action == "list":
        doc = {
            name: {"kind": e.kind, "parameters": e.parameters, "provenance": e.provenance}
            for name, e in sorted(catalog.CATALOG.items())
        }
        lines = [f"{name:20s} {e.kind:12s} {e.parameters}" for name, e in sorted(catalog.CATALOG.items())]
        _emit(out, args, doc, lines)
        return EXIT_OK
    if not args.name:
        raise CliError("catalog emit needs an entry name", EXIT_INPUT)
    if args.name not in catalog.CATALOG:
        raise CliError(f"unknown catalog entry {args.name!r}", EXIT_INPUT)
    params = {key: getattr(args, flag) for flag, key in CATALOG_FLAGS.items()
              if getattr(args, flag, None) is not None}
    try:
        doc = catalog.emit(args.name, **params)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_INPUT) from None
    out.write(json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


def _jsonable(x):
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, Fraction):
        return manifest.format_fraction(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def cmd_verify(args, out):
    names = sorted(suites.SUITES) if args.suite == "all" else [args.suite]
    for name in names:
        if name not in suites.SUITES:
            raise CliError(
                f"unknown suite {name!r}; known: all, {', '.join(sorted(suites.SUITES))}",
                EXIT_INPUT,
            )
    results = [suites.run_suite(name, seed=args.seed) for name in names]
    doc = {
        "seed": args.seed,
        "suites": [
            {
                "name": r.name,
                "passed": r.passed,
                "checks": r.checks,
                "stats": _jsonable(r.stats),
                "failures": _jsonable(r.failures),
            }
            for r in results
        ],
    }
    lines = []
    for r in results:
        stats = ", ".join(f"{k}={_fmt_stat(v)}" for k, v in r.stats.items())
        lines.append(f"{'PASS' if r.passed else 'FAIL'} {r.name} ({r.checks} checks){': ' + stats if stats else ''}")
        for f in r.failures:
            lines.append(f"    counterexample: {json.dumps(_jsonable(f), sort_keys=True)}")
    _emit(out, args, doc, lines)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def _fmt_stat(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


# ---------------------------------------------------------------------------
# Parser


def build_parser():
    parser = argparse.ArgumentParser(
        prog="reebmec",
        description="Indices of symplectic paths and mean Euler characteristics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--json", action="store_true", help="single JSON document on stdout")
        p.add_argument("--approx", action="store_true", help="append decimal approximations")

    p = sub.add_parser("mec", help="mean Euler characteristic of a manifest")
    p.add_argument("manifest", help="manifest path or catalog:<name>")
    p.add_argument("--linearized", action="store_true",
                   help="allow orbits of degree -1, 0, 1 (linearized theory)")
    _add_catalog_flags(p)
    common(p)
    p.set_defaults(func=cmd_mec)

    p = sub.add_parser("oracle", help="truncated-complex convergence table")
    p.add_argument("manifest")
    p.add_argument("--max-degree", nargs="+", default=["100", "1000", "10000"],
                   help="increasing truncation degrees N")
    p.add_argument("--side", choices=["+", "-"], default="+")
    _add_catalog_flags(p)
    common(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("surgery", help="MEC trajectory under subcritical surgeries")
    p.add_argument("manifest")
    p.add_argument("--k", dest="surgery_k", nargs="+", required=True,
                   help="surgery indices, applied in order")
    p.add_argument("--mode", choices=MODES, default=GENERATOR)
    p.add_argument("--linearized", action="store_true",
                   help="permit dimension 3 (linearized contact homology)")
    p.add_argument("--degree-cutoff", type=int, default=20,
                   help="list injected generator degrees up to this value")
    _add_catalog_flags(p, handle=False)
    common(p)
    p.set_defaults(func=cmd_surgery)

    p = sub.add_parser("index", help="indices of a symplectic path")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--path", help="JSON path file")
    src.add_argument("--rotation", help="comma-separated rates of (+) R(w_j t)")
    p.add_argument("--T", type=float, default=1.0, help="duration for --rotation")
    p.add_argument("--samples", type=int, default=None, help="sample count for --rotation")
    p.add_argument("--k-max", type=int, default=64, help="iterates used by the mean index fit")
    for k in INDEX_KINDS:
        p.add_argument(f"--{k}", action="store_true")
    p.add_argument("--all", action="store_true")
    common(p)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("catalog", help="built-in models")
    p.add_argument("action", choices=["emit", "list"])
    p.add_argument("name", nargs="?")
    _add_catalog_flags(p)
    common(p)
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("verify", help="run seeded property suites")
    p.add_argument("--suite", default="all")
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except CliError as exc:
        message, code = str(exc), exc.code
    except ModelValidationError as exc:
        message, code = "invalid model: " + "; ".join(exc.violations), EXIT_INPUT
    except ManifestError as exc:
        message, code = f"manifest error: {exc}", EXIT_INPUT
    except NotSubcriticalError as exc:
        message, code = f"not subcritical: {exc}", EXIT_INPUT
    except DegenerateEndpointError as exc:
        message, code = f"degenerate endpoint: {exc}", EXIT_DEGENERATE
    except IncompleteDataError as exc:
        message, code = f"generator data incomplete: {exc}", EXIT_INCOMPLETE
    except (ReebMecError, ValueError) as exc:
        message, code = str(exc), _code_for(exc)
    if getattr(args, "json", False):
        out.write(json.dumps({"error": message, "exit_code": code}, sort_keys=True) + "\n")
    err.write(f"reebmec: error: {message}\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
