"""
JSON manifests for orbit models.

A manifest is a single JSON object::

    {"kind": "af", "n": 2, "no_low_degree": true,
     "families": [{"label": "x0", "orbit_type": "I", "sigma": 1,
                   "delta": 4, "degree_rule": [4, -2]}],
     "metadata": {}}

    {"kind": "mb", "n": 2, "good_only": true,
     "maximal": [{"label": "S", "sigma": 1, "mu_rs_rule": [4, 0], "dim": 2,
                  "strata": [{"label": "X", "cover_multiple": 1,
                              "euler_underlying": 2, "dim": 2,
                              "stab_order": 1, "morse_indices": [0, 2],
                              "children": []}]}],
     "metadata": {}}

Rationals may be given as integers, "p/q" strings or {"num": p, "den": q}.
An affine rule may be [a, b], {"a": a, "b": b} or {"sequence": [r_1, r_2, ...]};
sequences are accepted only when they are affine in k.
"""

import json
from fractions import Fraction

from .errors import ManifestError
from .orbit_model import (
    AFModel,
    MaximalOrbifold,
    MBModel,
    PrincipalOrbitFamily,
    Stratum,
)

FAMILY_KEYS = {"label", "orbit_type", "sigma", "delta", "degree_rule"}
STRATUM_KEYS = {
    "label", "cover_multiple", "euler_underlying", "dim", "stab_order",
    "morse_indices", "children",
}
MAXIMAL_KEYS = {"label", "sigma", "mu_rs_rule", "dim", "strata"}
TOP_KEYS = {
    "af": {"kind", "n", "families", "no_low_degree", "metadata"},
    "mb": {"kind", "n", "maximal", "good_only", "metadata"},
}


# ---------------------------------------------------------------------------
# Scalars


def fraction_to_json(q, machine=False):
    q = Fraction(q)
    if machine:
        return {"num": q.numerator, "den": q.denominator}
    if q.denominator == 1:
        return q.numerator
    return f"{q.numerator}/{q.denominator}"


def format_fraction(q):
    """'p/q' in lowest terms, or 'p' for integers; 'undefined' for None."""
    if q is None:
        return "undefined"
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _rational(x, where):
    if isinstance(x, bool):
        raise ManifestError("expected a rational, got a boolean", where)
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            num, _, den = x.partition("/")
            return Fraction(int(num), int(den) if den else 1)
        except (ValueError, ZeroDivisionError):
            raise ManifestError(f"cannot read {x!r} as p/q", where) from None
    if isinstance(x, dict):
        _keys(x, {"num", "den"}, where, required={"num", "den"})
        num, den = _int(x["num"], where + ".num"), _int(x["den"], where + ".den")
        if den == 0:
            raise ManifestError("zero denominator", where)
        return Fraction(num, den)
    raise ManifestError(f"expected an exact rational, got {type(x).__name__}", where)


def _int(x, where):
    if isinstance(x, bool) or not isinstance(x, int):
        raise ManifestError(f"expected an integer, got {x!r}", where)
    return x


def _bool(x, where):
    if not isinstance(x, bool):
        raise ManifestError(f"expected true or false, got {x!r}", where)
    return x


def _str(x, where):
    if not isinstance(x, str):
        raise ManifestError(f"expected a string, got {x!r}", where)
    return x


def _list(x, where):
    if not isinstance(x, list):
        raise ManifestError(f"expected an array, got {type(x).__name__}", where)
    return x


def _keys(obj, allowed, where, required=()):
    if not isinstance(obj, dict):
        raise ManifestError(f"expected an object, got {type(obj).__name__}", where)
    for key in obj:
        if key not in allowed:
            raise ManifestError(f"unknown key {key!r}", where)
    for key in required:
        if key not in obj:
            raise ManifestError(f"missing key {key!r}", where)


def _affine(x, where):
    if x is None:
        return None
    if isinstance(x, list):
        if len(x) != 2:
            raise ManifestError("an affine rule needs exactly [a, b]", where)
        return (_rational(x[0], where + "[0]"), _rational(x[1], where + "[1]"))
    _keys(x, {"a", "b", "sequence"}, where)
    if "sequence" in x:
        if set(x) != {"sequence"}:
            raise ManifestError("give either a sequence or a and b", where)
        seq = [_rational(v, f"{where}.sequence[{i}]") for i, v in enumerate(_list(x["sequence"], where))]
        if len(seq) < 2:
            raise ManifestError("a sequence rule needs at least two terms", where)
        a = seq[1] - seq[0]
        if any(seq[i + 1] - seq[i] != a for i in range(len(seq) - 1)):
            raise ManifestError(
                "sequence rule is not affine in k; the mean index cannot be extracted", where
            )
        return (a, seq[0] - a)
    _keys(x, {"a", "b"}, where, required={"a", "b"})
    return (_rational(x["a"], where + ".a"), _rational(x["b"], where + ".b"))


# ---------------------------------------------------------------------------
# Models


def model_from_dict(doc, where="$"):
    """Build an AFModel or MBModel from a parsed manifest (not validated)."""
    if not isinstance(doc, dict):
        raise ManifestError("a manifest must be a JSON object", where)
    kind = doc.get("kind")
    if kind not in TOP_KEYS:
        raise ManifestError(f"kind must be 'af' or 'mb', got {kind!r}", where + ".kind")
    body = "families" if kind == "af" else "maximal"
    _keys(doc, TOP_KEYS[kind], where, required={"kind", "n", body})
    n = _int(doc["n"], where + ".n")
    if "metadata" in doc and not isinstance(doc["metadata"], dict):
        raise ManifestError("metadata must be an object", where + ".metadata")
    if kind == "af":
        fams = []
        for i, f in enumerate(_list(doc["families"], where + ".families")):
            at = f"{where}.families[{i}]"
            _keys(f, FAMILY_KEYS, at, required={"label", "orbit_type", "sigma", "delta"})
            fams.append(
                PrincipalOrbitFamily(
                    label=_str(f["label"], at + ".label"),
                    orbit_type=_str(f["orbit_type"], at + ".orbit_type"),
                    sigma=_int(f["sigma"], at + ".sigma"),
                    delta=_rational(f["delta"], at + ".delta"),
                    degree_rule=_affine(f.get("degree_rule"), at + ".degree_rule"),
                )
            )
        flag = _bool(doc.get("no_low_degree", True), where + ".no_low_degree")
        return AFModel(n, tuple(fams), flag)
    maximal = []
    for i, S in enumerate(_list(doc["maximal"], where + ".maximal")):
        at = f"{where}.maximal[{i}]"
        _keys(S, MAXIMAL_KEYS, at, required=MAXIMAL_KEYS)
        strata = []
        for j, s in enumerate(_list(S["strata"], at + ".strata")):
            st = f"{at}.strata[{j}]"
            _keys(s, STRATUM_KEYS, st, required=STRATUM_KEYS - {"morse_indices", "children"})
            morse = s.get("morse_indices")
            if morse is not None:
                morse = tuple(
                    _int(m, f"{st}.morse_indices[{q}]")
                    for q, m in enumerate(_list(morse, st + ".morse_indices"))
                )
            children = tuple(
                _str(c, f"{st}.children[{q}]")
                for q, c in enumerate(_list(s.get("children", []), st + ".children"))
            )
            strata.append(
                Stratum(
                    label=_str(s["label"], st + ".label"),
                    cover_multiple=_int(s["cover_multiple"], st + ".cover_multiple"),
                    euler_underlying=_int(s["euler_underlying"], st + ".euler_underlying"),
                    dim=_int(s["dim"], st + ".dim"),
                    stab_order=_int(s["stab_order"], st + ".stab_order"),
                    morse_indices=morse,
                    children=children,
                )
            )
        rule = _affine(S["mu_rs_rule"], at + ".mu_rs_rule")
        if rule is None:
            raise ManifestError("mu_rs_rule is required", at + ".mu_rs_rule")
        maximal.append(
            MaximalOrbifold(
                label=_str(S["label"], at + ".label"),
                sigma=_int(S["sigma"], at + ".sigma"),
                mu_rs_rule=rule,
                dim=_int(S["dim"], at + ".dim"),
                strata=tuple(strata),
            )
        )
    flag = _bool(doc.get("good_only", True), where + ".good_only")
    return MBModel(n, tuple(maximal), flag)


def model_to_dict(model, metadata=None):
    if isinstance(model, AFModel):
        fams = []
        for f in model.families:
            rule = f.degree_rule
            fams.append(
                {
                    "label": f.label,
                    "orbit_type": f.orbit_type,
                    "sigma": f.sigma,
                    "delta": fraction_to_json(f.delta),
                    "degree_rule": None
                    if rule is None
                    else [fraction_to_json(rule.a), fraction_to_json(rule.b)],
                }
            )
        doc = {"kind": "af", "n": model.n, "no_low_degree": model.no_low_degree,
               "families": fams}
    else:
        maximal = []
        for S in model.maximal:
            strata = [
                {
                    "label": s.label,
                    "cover_multiple": s.cover_multiple,
                    "euler_underlying": s.euler_underlying,
                    "dim": s.dim,
                    "stab_order": s.stab_order,
                    "morse_indices": None if s.morse_indices is None else list(s.morse_indices),
                    "children": list(s.children),
                }
                for s in S.strata
            ]
            maximal.append(
                {
                    "label": S.label,
                    "sigma": S.sigma,
                    "mu_rs_rule": [fraction_to_json(S.mu_rs_rule.a),
                                   fraction_to_json(S.mu_rs_rule.b)],
                    "dim": S.dim,
                    "strata": strata,
                }
            )
        doc = {"kind": "mb", "n": model.n, "good_only": model.good_only, "maximal": maximal}
    doc["metadata"] = dict(metadata or {})
    return doc


def loads(text, source="<string>"):
    """Parse manifest text; returns (model, metadata)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestError(
            f"line {exc.lineno}, column {exc.colno}: {exc.msg}", source
        ) from None
    model = model_from_dict(doc)
    return model, dict(doc.get("metadata", {}))


def load(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read(), source=str(path))


def dumps(model, metadata=None):
    return json.dumps(model_to_dict(model, metadata), indent=2, sort_keys=False) + "\n"
