"""Command line: JSON family description in, deterministic JSON report out.

Exit status 0 on success, 1 for a domain error (reported as
``{"error": {"kind": ..., "detail": ...}}``), 2 for malformed input.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction

from . import flag, hasse_witt as hw, periods, zeta
from .errors import ArtifactError, MalformedInput, PrecisionMismatch
from .lattice import LatticePolytope, ToricData, polytope_from_toric
from .rings import IntMod, Matrix, ParamPoly, format_number, teichmuller_lift

SUBCOMMANDS = (
    "polytope", "hw", "alpha", "congruence", "frobenius", "periods", "truncation-check",
    "invertibility", "dwork-ratio", "unit-root", "count", "fulton-check", "flag-g24",
)
MODES = ("symbolic", "numeric", "teichmuller")


# ---------------------------------------------------------------------------
# input


def _int(x, what):
    if isinstance(x, bool):
        raise MalformedInput(f"{what}: expected an integer")
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        try:
            return int(x)
        except ValueError:
            pass
    raise MalformedInput(f"{what}: expected an integer, got {x!r}")


def _int_list(xs, what):
    if not isinstance(xs, list):
        raise MalformedInput(f"{what}: expected a list")
    return [_int(x, what) for x in xs]


class Spec:
    """Parsed FamilySpec plus command-line overrides."""

    def __init__(self, raw, args):
        if not isinstance(raw, dict):
            raise MalformedInput("top-level JSON value must be an object")
        self.raw = raw
        self.p = args.p if args.p is not None else raw.get("p")
        self.p = _int(self.p, "p") if self.p is not None else None
        s = args.s if args.s is not None else raw.get("s", 1)
        self.s = _int(s, "s")
        m = args.precision if args.precision is not None else raw.get("precision", raw.get("m"))
        self.m = _int(m, "precision") if m is not None else self.s
        self.mode = args.mode or raw.get("mode", "numeric")
        if self.mode not in MODES:
            raise MalformedInput(f"mode must be one of {MODES}")
        self.order = args.order if args.order is not None else raw.get("order")
        self.budget = args.budget_terms
        self.toric, self.polytope = self._polytope()

    def need_p(self):
        if self.p is None:
            raise MalformedInput("a prime p is required (--p or \"p\")")
        return self.p

    def _polytope(self):
        raw = self.raw
        if "rays" in raw:
            rays = raw["rays"]
            if not isinstance(rays, list):
                raise MalformedInput("rays must be a list")
            rays = [_int_list(r, "rays") for r in rays]
            ks = raw.get("bundle_coeffs")
            ks = _int_list(ks, "bundle_coeffs") if ks is not None else None
            toric = ToricData(rays, ks)
            if "dimension" in raw and _int(raw["dimension"], "dimension") != toric.dimension:
                raise MalformedInput("dimension does not match the rays")
            return toric, polytope_from_toric(toric)
        if "facets" in raw:
            facets = []
            for f in raw["facets"]:
                if not isinstance(f, dict):
                    raise MalformedInput("facets are objects {normal, offset}")
                facets.append((_int_list(f["normal"], "normal"), _int(f["offset"], "offset")))
            return None, LatticePolytope(facets)
        return None, None

    def family(self):
        if self.polytope is None:
            raise MalformedInput("rays (or facets) are required")
        terms = self.raw.get("terms")
        lam = self.raw.get("lambda_name", "lam")
        if terms is None:
            if self.mode != "symbolic":
                raise MalformedInput("terms are required outside symbolic mode")
            return hw.HypersurfaceFamily.universal(self.polytope, toric=self.toric)
        if not isinstance(terms, list):
            raise MalformedInput("terms must be a list")
        parsed = []
        for t in terms:
            if not isinstance(t, dict) or "exp" not in t or "coeff" not in t:
                raise MalformedInput("each term needs exp and coeff")
            parsed.append((tuple(_int_list(t["exp"], "exp")), t["coeff"]))
        kinds = {("param" if isinstance(c, dict) and "param" in c else
                  "poly" if isinstance(c, dict) and "poly" in c else "num") for _, c in parsed}
        if "param" in kinds and "poly" in kinds:
            raise MalformedInput("cannot mix param and poly coefficients")
        coeffs = {}
        if "poly" in kinds:
            polys = {}
            for u, c in parsed:
                vals = c["poly"] if isinstance(c, dict) else [c]
                if not isinstance(vals, list):
                    raise MalformedInput("poly must be a list of lambda-coefficients")
                polys[u] = [_int(v, "poly") for v in vals]
            return hw.HypersurfaceFamily.one_parameter(self.polytope, polys, lam=lam, toric=self.toric)
        if "param" in kinds:
            names = tuple(sorted({c["param"] for _, c in parsed if isinstance(c, dict)},
                                 key=lambda n: next(u for u, c in parsed if isinstance(c, dict) and c["param"] == n)))
            for u, c in parsed:
                if isinstance(c, dict):
                    coeffs[u] = ParamPoly.symbol(names, str(c["param"]))
                else:
                    coeffs[u] = ParamPoly.constant(names, _int(c, "coeff"))
            return hw.HypersurfaceFamily(self.polytope, coeffs, toric=self.toric)
        for u, c in parsed:
            coeffs[u] = _int(c, "coeff")
        if self.mode == "teichmuller":
            p = self.need_p()
            coeffs = {u: teichmuller_lift(c % p, p, self.m).value for u, c in coeffs.items()}
        return hw.HypersurfaceFamily(self.polytope, coeffs, toric=self.toric)

    def point(self):
        v = self.raw.get("lambda")
        return _int(v, "lambda") if v is not None else None


# ---------------------------------------------------------------------------
# output


def _value(x):
    if isinstance(x, ParamPoly):
        return x.to_text()
    if isinstance(x, IntMod):
        return str(x.value)
    if isinstance(x, (int, Fraction)):
        return format_number(x)
    return str(x)


def _matrix(M):
    return [[_value(x) for x in row] for row in M.rows]


def _laurent_terms(f):
    return [{"exp": list(e), "coeff": _value(c)} for e, c in f.sorted_terms()]


def _cmd_polytope(spec):
    P = spec.polytope
    if P is None:
        raise MalformedInput("rays (or facets) are required")
    return {
        "dimension": P.dimension,
        "lattice_points": len(P.lattice_points),
        "points": [list(u) for u in P.lattice_points],
        "interior": [list(u) for u in P.interior_points],
        "vertices": [[format_number(x) for x in v] for v in P.vertices],
        "vertices_integral": [all(x.denominator == 1 for x in v) for v in P.vertices],
    }


def _family_at_point(spec, F):
    if F.is_one_parameter:
        lam = spec.point()
        if lam is None:
            return F
        return F.at(lam, spec.need_p() ** spec.m)
    return F


def _cmd_hw(spec):
    F = _family_at_point(spec, spec.family())
    return {"matrix": _matrix(hw.hw_matrix_toric(F, spec.need_p())),
            "interior": [list(u) for u in F.interior]}


def _cmd_alpha(spec):
    F = _family_at_point(spec, spec.family())
    M = hw.alpha_matrix(F, spec.need_p(), spec.s, spec.m, spec.budget)
    return {"matrix": _matrix(M), "interior": [list(u) for u in F.interior]}


def _cmd_congruence(spec):
    F = spec.family()
    rep = hw.verify_congruences(F, spec.need_p(), spec.s, spec.m, point=spec.point())
    return {"report": rep.to_dict()}


def _cmd_frobenius(spec):
    F = spec.family()
    max_level = spec.raw.get("max_level")
    res = hw.frobenius_unit_root_matrix(F, spec.need_p(), spec.s,
                                        max_level=_int(max_level, "max_level") if max_level else None,
                                        budget_terms=spec.budget, point=spec.point())
    return {"matrix": _matrix(res.matrix), "precision": res.precision,
            "agreements": list(res.agreements), "levels": res.levels}


def _order(spec, default):
    return _int(spec.order, "order") if spec.order is not None else default


def _cmd_periods(spec):
    F = spec.family()
    N = _order(spec, 4)
    if F.rank == 1:
        P = periods.period_series(F, None, N)
        return {"order": N, "layers": [_value(x) for x in P.layers]}
    mat = periods.period_matrix(F, N)
    return {"order": N, "interior": [list(u) for u in F.interior],
            "matrix": [[[_value(x) for x in P.layers] for P in row] for row in mat]}


def _cmd_truncation(spec):
    res = periods.check_truncation_relation(spec.family(), spec.need_p())
    return {"holds": res.holds, "witness": _jsonable(res.witness),
            "hw": [[_value(x) for x in r] for r in res.hw]}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return x
    return _value(x)


def _cmd_invertibility(spec):
    return {"constant_term": _value(periods.invertibility_certificate(spec.family(), spec.need_p()))}


def _cmd_dwork(spec):
    F = spec.family()
    return {"value": _value(periods.dwork_ratio(F, spec.need_p(), spec.m))}


def _cmd_unit_root(spec):
    p = spec.need_p()
    F = spec.family()
    r = _int(spec.raw.get("r", 1), "r")
    out = {"r": r}
    lifted = F._like({u: teichmuller_lift(c % p, p, spec.m).value for u, c in F.coeffs.items()})
    # counts first, so a supersingular point reports as such
    if F.dimension == 2 and F.rank == 1:
        N = zeta.count_points_toric(F, p**r).total
        out["count"] = N
        out["from_counts"] = _value(zeta.unit_root_from_counts(N, p, spec.m, r).value)
    out["from_periods"] = _value(zeta.unit_root_from_periods(lifted, p, r, spec.m).value)
    if "from_counts" in out:
        out["agree"] = out["from_counts"] == out["from_periods"]
    return out


def _cmd_count(spec):
    F = spec.family()
    p = spec.need_p()
    r = _int(spec.raw.get("r", 1), "r")
    pc = zeta.count_points_toric(F, p**r)
    out = {"q": pc.q, "total": pc.total, "torus": pc.torus,
           "strata": [{"face": [list(v) for v in k], "count": v} for k, v in sorted(pc.strata.items())]}
    if F.dimension == 2 and F.toric is not None and zeta.ambient_name(F.toric) == "P2" and F.rank == 1:
        mons = {(u[0] + 1, u[1] + 1, 1 - u[0] - u[1]): c for u, c in F.coeffs.items()}
        sing = zeta.plane_cubic_singular_points(mons, p)
        out["smooth"] = not sing
        if sing:
            out["warning"] = "the cubic has singular points; unit-root statements do not apply"
    return out


def _cmd_fulton(spec):
    res = zeta.fulton_trace_check(spec.family(), spec.need_p())
    return {"holds": res.holds, "count": res.count, "trace": res.trace, "n": res.n}


def _chart_section(raw):
    if not isinstance(raw, list):
        raise MalformedInput("a section is a list of terms")
    terms = []
    for t in raw:
        if not isinstance(t, dict) or "exp" not in t or "coeff" not in t:
            raise MalformedInput("section terms need exp (a,b,c,d) and coeff")
        e = _int_list(t["exp"], "exp")
        if len(e) != 4:
            raise MalformedInput("section exponents have four entries (a, b, c, d)")
        try:
            c = Fraction(str(t["coeff"]))
        except (ValueError, ZeroDivisionError):
            raise MalformedInput(f"bad coefficient {t['coeff']!r}")
        terms.append((e, c.numerator if c.denominator == 1 else c))
    return flag.ChartSection.from_terms(terms)


def _cmd_flag(spec):
    raw = spec.raw
    out = {}
    if "section" in raw:
        sec = _chart_section(raw["section"])
    else:
        sec = flag.ChartSection.s0()
    g = flag.g24_pullback(sec)
    out["pullback"] = _laurent_terms(g)
    if spec.p is not None:
        out["hw"] = _value(flag.hw_flag_g24(g, spec.p))
    if "sections" in raw:
        secs = [_chart_section(s) for s in raw["sections"]]
        N = _order(spec, 2 if spec.p is None else spec.p - 1)
        P = flag.period_series_flag_g24(secs, N)
        out["periods"] = [_value(x) for x in P.layers]
        if spec.p is not None:
            gfam, _ = flag.section_family(secs)
            hwv = flag.alpha_flag_g24(gfam, spec.p, 1, spec.p)
            trunc = periods.truncate_series(P, min(N, spec.p - 1)) % spec.p
            out["family_hw"] = _value(hwv)
            out["truncation_holds"] = ((hwv - trunc) % spec.p).is_zero() if N >= spec.p - 1 else None
    return out


HANDLERS = {
    "polytope": _cmd_polytope, "hw": _cmd_hw, "alpha": _cmd_alpha, "congruence": _cmd_congruence,
    "frobenius": _cmd_frobenius, "periods": _cmd_periods, "truncation-check": _cmd_truncation,
    "invertibility": _cmd_invertibility, "dwork-ratio": _cmd_dwork, "unit-root": _cmd_unit_root,
    "count": _cmd_count, "fulton-check": _cmd_fulton, "flag-g24": _cmd_flag,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="hwperiods", description=__doc__.splitlines()[0])
    ap.add_argument("subcommand", choices=SUBCOMMANDS)
    ap.add_argument("input", help="family description (JSON file, or - for stdin)")
    ap.add_argument("--p", type=int)
    ap.add_argument("--s", type=int)
    ap.add_argument("--precision", type=int)
    ap.add_argument("--order", type=int)
    ap.add_argument("--mode", choices=MODES)
    ap.add_argument("--budget-terms", type=int)
    ap.add_argument("--out")
    return ap


def _emit(obj, out):
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv=None):
    """Execute one subcommand; returns the process exit status."""
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        if args.input == "-":
            data = sys.stdin.buffer.read()
        else:
            with open(args.input, "rb") as fh:
                data = fh.read()
    except OSError as exc:
        _emit({"error": {"kind": "MalformedInput", "detail": str(exc)}}, args.out)
        return 2
    try:
        raw = json.loads(data.decode("utf-8"))
        spec = Spec(raw, args)
        body = HANDLERS[args.subcommand](spec)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        _emit({"error": {"kind": "MalformedInput", "detail": f"invalid JSON: {exc}"}}, args.out)
        return 2
    except MalformedInput as exc:
        _emit({"error": {"kind": exc.kind, "detail": exc.detail}}, args.out)
        return 2
    except ArtifactError as exc:
        _emit({"error": {"kind": exc.kind, "detail": exc.detail}}, args.out)
        return 1
    except PrecisionMismatch as exc:
        _emit({"error": {"kind": "PrecisionMismatch", "detail": str(exc)}}, args.out)
        return 1
    except (KeyError, TypeError, ValueError) as exc:
        _emit({"error": {"kind": "MalformedInput", "detail": f"{type(exc).__name__}: {exc}"}}, args.out)
        return 2
    report = {
        "subcommand": args.subcommand,
        "p": spec.p, "s": spec.s, "m": spec.m,
        "input_digest": {"algorithm": "sha256", "value": hashlib.sha256(data).hexdigest()},
        "result": body,
    }
    _emit(report, args.out)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
