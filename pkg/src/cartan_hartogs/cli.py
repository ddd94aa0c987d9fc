"""Command-line front end.

    cartan-hartogs report SPEC.json
    cartan-hartogs polynomiality SPEC.json [--fixed --alpha 5,7]
    cartan-hartogs eval-epsilon SPEC.json --alpha 5 --s 3/10
    cartan-hartogs balanced SPEC.json
    cartan-hartogs verify-numeric SPEC.json --samples 100 --seed 0
    cartan-hartogs catalog

The JSON report goes to ``--out`` (default stdout); a short summary goes to
stderr.  Exit codes: 0 ok, 1 invalid input, 2 alpha not above the
threshold, 3 a numeric check exceeded its tolerance.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from . import __version__
from .algebra import UniPoly, format_bipoly, format_poly
from .domains import (
    CATALOG_SAMPLES,
    DomainError,
    DomainSpec,
    Factor,
    alpha_threshold,
    cartan_catalog,
    make_irreducible,
    validate_spec,
    wallach_contains,
)
from .epsilon import (
    AlphaError,
    NotPolynomialError,
    PolynomialityVerdict,
    Status,
    balanced_check,
    berezin_report,
    epsilon_coeffs,
    epsilon_series,
    polynomiality_check,
)

EXIT_OK, EXIT_INVALID, EXIT_ALPHA, EXIT_NUMERIC = 0, 1, 2, 3
COMMANDS = ("report", "balanced", "polynomiality", "eval-epsilon", "verify-numeric", "catalog")


class ConfigError(ValueError):
    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


@dataclass
class RunConfig:
    spec: DomainSpec | None
    command: str
    alpha: list[Fraction] = field(default_factory=list)
    s: Fraction | None = None
    samples: int = 100
    seed: int = 0
    tolerance: str = "1e-9"
    output: str = "-"
    symbolic: bool = True


def fmt_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _rational(value: Any, path: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise ConfigError([f"{path}: expected an integer or a rational string like \"1/2\""])
    try:
        return Fraction(value.strip()) if isinstance(value, str) else Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise ConfigError([f"{path}: cannot parse {value!r} as a rational"]) from None


def _int(doc: dict, key: str, path: str) -> int:
    if key not in doc:
        raise ConfigError([f"{path}.{key}: missing"])
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError([f"{path}.{key}: expected an integer"])
    return v


def parse_factor(doc: Any, path: str) -> Factor:
    if not isinstance(doc, dict):
        raise ConfigError([f"{path}: expected an object"])
    kind = doc.get("kind")
    if not isinstance(kind, str):
        raise ConfigError([f"{path}.kind: missing or not a string"])
    try:
        k = kind.upper()
        if kind == "ball":
            params = cartan_catalog("I", 1, _int(doc, "dim", path))
        elif k == "I":
            params = cartan_catalog("I", _int(doc, "m", path), _int(doc, "n", path))
        elif k in ("II", "III", "IV"):
            params = cartan_catalog(k, _int(doc, "n", path))
        elif k in ("V", "VI"):
            params = cartan_catalog(k)
        elif kind == "custom":
            params = make_irreducible(_int(doc, "r", path), _int(doc, "a", path), _int(doc, "b", path))
        else:
            raise ConfigError([f"{path}.kind: unknown factor kind {kind!r}"])
    except DomainError as exc:
        raise ConfigError([f"{path}: {exc}"]) from None
    if "mu" not in doc:
        raise ConfigError([f"{path}.mu: missing"])
    mu = _rational(doc["mu"], f"{path}.mu")
    nu = _rational(doc.get("nu", 0), f"{path}.nu")
    return Factor(params, mu, nu)


def parse_spec(doc: Any) -> DomainSpec:
    if not isinstance(doc, dict):
        raise ConfigError(["$: expected a JSON object"])
    factors_doc = doc.get("factors")
    if not isinstance(factors_doc, list) or not factors_doc:
        raise ConfigError(["$.factors: expected a non-empty list"])
    factors = tuple(parse_factor(f, f"$.factors[{i}]") for i, f in enumerate(factors_doc))
    d0 = _int(doc, "d0", "$")
    spec = DomainSpec(factors, d0)
    problems = validate_spec(spec)
    if problems:
        raise ConfigError([_locate(p) for p in problems])
    return spec


def _locate(problem: str) -> str:
    m = re.match(r"factors\[(\d+)\]: (.*)", problem)
    if m:
        return f"$.factors[{m.group(1)}]: {m.group(2)}"
    if problem.startswith("d0"):
        return f"$.d0: {problem}"
    return f"$: {problem}"


def parse_config(text: str, command: str | None = None) -> RunConfig:
    """Parse a JSON spec document (optionally carrying run options) into a RunConfig."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"malformed JSON: {exc}"]) from None
    spec = parse_spec(doc)
    cfg = RunConfig(spec=spec, command=command or doc.get("command", "report"))
    if cfg.command not in COMMANDS:
        raise ConfigError([f"$.command: unknown command {cfg.command!r}"])
    if "alpha" in doc:
        raw = doc["alpha"] if isinstance(doc["alpha"], list) else [doc["alpha"]]
        cfg.alpha = [_rational(a, f"$.alpha[{i}]") for i, a in enumerate(raw)]
    if "s" in doc:
        cfg.s = _rational(doc["s"], "$.s")
    for key in ("samples", "seed"):
        if key in doc:
            setattr(cfg, key, _int(doc, key, "$"))
    if "tolerance" in doc:
        cfg.tolerance = str(doc["tolerance"])
    return cfg


def spec_echo(spec: DomainSpec) -> dict:
    factors = []
    for f in spec.factors:
        kind = f.params.kind
        m = re.fullmatch(r"I\((\d+),(\d+)\)", kind)
        if m:
            entry = {"kind": "I", "m": int(m.group(1)), "n": int(m.group(2))}
        elif kind in ("V", "VI"):
            entry = {"kind": kind}
        elif kind == "custom":
            entry = {"kind": "custom", "r": f.params.rank, "a": f.params.a, "b": f.params.b}
        else:
            name, size = re.fullmatch(r"(\w+)\((\d+)\)", kind).groups()
            entry = {"kind": name, "n": int(size)}
        entry.update(
            mu=fmt_rational(f.mu),
            nu=fmt_rational(f.nu),
            params={"r": f.params.rank, "a": f.params.a, "b": f.params.b, "d": f.params.dim, "p": f.params.genus},
        )
        factors.append(entry)
    return {"factors": factors, "d0": spec.d0, "d": spec.d, "n": spec.n}


def _num(x: float) -> float:
    return float(f"{float(x):.17g}")


def _uni(p: UniPoly) -> list[str]:
    return p.to_strings() if not p.is_zero() else ["0"]


def verdict_doc(v: PolynomialityVerdict) -> dict:
    out: dict[str, Any] = {"status": v.status.value}
    if v.alphas:
        out["alphas"] = [fmt_rational(a) for a in v.alphas]
    if v.status is Status.NOT_POLYNOMIAL:
        w = v.witness
        out["witness"] = format_bipoly(w, ("x", "alpha")) if hasattr(w, "terms") else str(w)
        if v.failed_alpha is not None:
            out["failed_alpha"] = fmt_rational(v.failed_alpha)
    return out


def phi_doc(v: PolynomialityVerdict):
    """Coefficients lowest degree first; entries are polynomials in alpha when phi depends on it."""
    if not v.is_polynomial:
        return None
    fixed = v.alpha_independent_phi()
    if fixed is not None:
        return _uni(fixed)
    if v.status is Status.POLYNOMIAL_ALL_ALPHA:
        return [format_poly(c, "alpha") for c in v.phi.coefficients_in("x")]
    return {fmt_rational(a): _uni(p) for a, p in zip(v.alphas, v.phi)}


def _alpha_for(cfg: RunConfig) -> Fraction:
    from .numeric import default_alpha

    return cfg.alpha[0] if cfg.alpha else default_alpha(cfg.spec)


def _base_report(cfg: RunConfig) -> dict:
    spec = cfg.spec
    return {
        "command": cfg.command,
        "spec_echo": spec_echo(spec),
        "alpha_threshold": fmt_rational(alpha_threshold(spec)),
        "verdict": None,
        "phi_coefficients": None,
        "epsilon_coefficients": None,
        "balanced": None,
        "wallach": [wallach_contains(f.params, f.mu) and f.mu != 0 for f in spec.factors],
        "berezin_admissible": None,
        "numeric_checks": None,
    }


def _epsilon_doc(spec: DomainSpec, alpha: Fraction, verdict: PolynomialityVerdict) -> dict | None:
    try:
        cf = epsilon_coeffs(spec, alpha, verdict)
    except NotPolynomialError:
        return None
    return {
        "alpha": fmt_rational(alpha),
        "diffs": [fmt_rational(c) for c in cf.diffs],
        "coeffs": [fmt_rational(c) for c in cf.coeffs],
    }


def cmd_report(cfg: RunConfig, rep: dict) -> int:
    spec = cfg.spec
    er = berezin_report(spec)
    rep["verdict"] = verdict_doc(er.verdict)
    rep["phi_coefficients"] = phi_doc(er.verdict)
    rep["balanced"] = er.balanced
    rep["berezin_admissible"] = er.berezin_admissible
    rep["epsilon_coefficients"] = _epsilon_doc(spec, _alpha_for(cfg), er.verdict)
    return EXIT_OK


def cmd_polynomiality(cfg: RunConfig, rep: dict) -> int:
    if cfg.symbolic:
        v = polynomiality_check(cfg.spec)
    else:
        v = polynomiality_check(cfg.spec, cfg.alpha or [_alpha_for(cfg)])
    rep["verdict"] = verdict_doc(v)
    rep["phi_coefficients"] = phi_doc(v)
    return EXIT_OK


def cmd_balanced(cfg: RunConfig, rep: dict) -> int:
    res = balanced_check(cfg.spec)
    rep["balanced"] = res.balanced
    rep["balanced_detail"] = {
        "residual": format_bipoly(res.residual),
        "reindex_ok": res.reindex_ok,
        "lhs": format_bipoly(res.lhs),
        "rhs": format_bipoly(res.rhs),
    }
    return EXIT_OK


def cmd_eval(cfg: RunConfig, rep: dict) -> int:
    if not cfg.alpha or cfg.s is None:
        raise ConfigError(["eval-epsilon requires --alpha and --s"])
    spec, alpha, s = cfg.spec, cfg.alpha[0], cfg.s
    tol = float(cfg.tolerance)
    series = epsilon_series(spec, alpha, s)
    doc: dict[str, Any] = {
        "alpha": fmt_rational(alpha),
        "s": fmt_rational(s),
        "series_value": _num(series.value),
        "series_terms": series.terms,
        "series_last_term": _num(series.last_term),
        "series_converged": series.converged,
    }
    v = polynomiality_check(spec, [alpha])
    rep["verdict"] = verdict_doc(v)
    if v.is_polynomial:
        cf = epsilon_coeffs(spec, alpha, v)
        closed = cf.value(s)
        rep["epsilon_coefficients"] = _epsilon_doc(spec, alpha, v)
        rep["phi_coefficients"] = phi_doc(v)
        doc["closed_form_value"] = fmt_rational(closed)
        gap = abs(float(series.value) - float(closed))
        doc["abs_difference"] = _num(gap)
        doc["agree"] = bool(gap <= tol * max(1.0, abs(float(closed))))
    rep["numeric_checks"] = {"epsilon": doc}
    if doc.get("agree") is False or not series.converged:
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_verify(cfg: RunConfig, rep: dict) -> int:
    from . import numeric as nv

    spec = cfg.spec
    tol = float(cfg.tolerance)
    rng = np.random.default_rng(cfg.seed)
    checks: dict[str, Any] = {"tolerance": cfg.tolerance, "samples": cfg.samples, "seed": cfg.seed}
    failed = False
    try:
        [nv.factor_shape(f.params) for f in spec.factors]
    except nv.UnsupportedDomainError as exc:
        raise ConfigError([f"verify-numeric: {exc}"]) from None

    ma_tol = max(tol, 1e-4)
    worst = 0.0
    for _ in range(cfg.samples):
        p = nv.sample_point(spec, rng, margin=nv.MA_MARGIN)
        worst = max(worst, nv.monge_ampere_check(spec, p))
    checks["monge_ampere"] = {"max_relative_error": _num(worst), "tolerance": _num(ma_tol), "ok": bool(worst < ma_tol)}
    failed |= worst >= ma_tol

    beta = nv.diastasis_beta_floor(spec) + 1
    top = 0.0
    diag_err = 0.0
    for _ in range(cfg.samples):
        p1, p2 = nv.sample_point(spec, rng), nv.sample_point(spec, rng)
        top = max(top, nv.diastasis_check(spec, beta, p1, p2))
        diag_err = max(diag_err, abs(nv.diastasis_check(spec, beta, p1, p1) - 1))
    ok = bool(top <= 1 + 1e-12 and diag_err <= 1e-12)
    checks["diastasis"] = {"beta": fmt_rational(beta), "max_value": _num(top), "max_diagonal_error": _num(diag_err), "ok": ok}
    failed |= not ok

    alpha = _alpha_for(cfg)
    v = polynomiality_check(spec, [alpha])
    cf = epsilon_coeffs(spec, alpha, v) if v.is_polynomial else None
    try:
        b = nv.boundedness_sample(spec, cfg.samples, cfg.seed, cf)
        checks["boundedness"] = {
            "max_abs_X": _num(b.max_abs_x),
            "max_abs_cross": _num(b.max_abs_cross),
            "B_bound": None if b.b_bound is None else _num(b.b_bound),
            "ok": True,
        }
    except AssertionError as exc:
        checks["boundedness"] = {"ok": False, "error": str(exc)}
        failed = True

    if cf is not None:
        inv = max(nv.epsilon_invariance_check(spec, nv.sample_point(spec, rng), alpha, cf) for _ in range(cfg.samples))
        rt = max(nv.kernel_roundtrip_error(spec, nv.sample_point(spec, rng, margin=nv.MA_MARGIN), alpha, cf) for _ in range(min(cfg.samples, 20)))
        checks["epsilon_invariance"] = {"max_relative_deviation": _num(inv), "ok": bool(inv <= 1e-12)}
        checks["kernel_roundtrip"] = {"max_relative_error": _num(rt), "ok": bool(rt <= 1e-10)}
        failed |= inv > 1e-12 or rt > 1e-10
    rep["numeric_checks"] = checks
    return EXIT_NUMERIC if failed else EXIT_OK


def catalog_doc() -> dict:
    entries = []
    for kind, sizes in CATALOG_SAMPLES:
        p = cartan_catalog(kind, *sizes)
        entries.append({"kind": p.kind, "r": p.rank, "a": p.a, "b": p.b, "d": p.dim, "p": p.genus})
    return {
        "command": "catalog",
        "kinds": {
            "ball": "unit ball, field dim",
            "I": "m x n matrices, fields m, n",
            "II": "skew-symmetric n x n, field n >= 2",
            "III": "symmetric n x n, field n >= 1",
            "IV": "Lie ball, field n >= 3",
            "V": "exceptional, dimension 16",
            "VI": "exceptional, dimension 27",
            "custom": "fields r, a, b",
        },
        "entries": entries,
    }


HANDLERS = {
    "report": cmd_report,
    "balanced": cmd_balanced,
    "polynomiality": cmd_polynomiality,
    "eval-epsilon": cmd_eval,
    "verify-numeric": cmd_verify,
}


def run(cfg: RunConfig) -> tuple[int, dict]:
    """Execute a parsed configuration; returns the exit code and the report document."""
    if cfg.command == "catalog":
        return EXIT_OK, catalog_doc()
    rep = _base_report(cfg)
    try:
        code = HANDLERS[cfg.command](cfg, rep)
    except AlphaError as exc:
        return EXIT_ALPHA, {"command": cfg.command, "error": str(exc), "alpha_threshold": rep["alpha_threshold"]}
    except ConfigError as exc:
        return EXIT_INVALID, {"command": cfg.command, "error": str(exc), "problems": exc.problems}
    return code, rep


def render(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".report-", suffix=".json")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def summary(code: int, doc: dict) -> str:
    lines = [f"command: {doc.get('command')}  exit: {code}"]
    for key in ("alpha_threshold", "balanced", "berezin_admissible", "error"):
        if doc.get(key) is not None:
            lines.append(f"  {key}: {doc[key]}")
    if doc.get("verdict"):
        lines.append(f"  verdict: {doc['verdict']['status']}")
    if doc.get("phi_coefficients") is not None:
        lines.append(f"  phi (low to high): {doc['phi_coefficients']}")
    checks = doc.get("numeric_checks") or {}
    for name, val in checks.items():
        if isinstance(val, dict) and "ok" in val:
            lines.append(f"  {name}: {'ok' if val['ok'] else 'FAILED'}")
        elif isinstance(val, dict) and "agree" in val:
            lines.append(f"  {name}: series {val['series_value']} agree={val['agree']}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cartan-hartogs", description="Epsilon-function analysis on generalized Cartan-Hartogs domains.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("spec", nargs="?", help="JSON spec file ('-' for stdin); not needed for catalog")
    ap.add_argument("--alpha", help="rational alpha, or a comma-separated list for --fixed")
    ap.add_argument("--s", help="rational s = |w~|^2 in [0, 1)")
    ap.add_argument("--samples", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--tol", help="tolerance as a decimal string")
    ap.add_argument("--out", default="-", help="report path (default stdout)")
    mode = ap.add_mutually_exclusive_group()
    mode.add_argument("--symbolic", dest="symbolic", action="store_true", default=True)
    mode.add_argument("--fixed", dest="symbolic", action="store_false")
    return ap


def config_from_args(args: argparse.Namespace) -> RunConfig:
    if args.command == "catalog":
        cfg = RunConfig(spec=None, command="catalog")
    else:
        if not args.spec:
            raise ConfigError([f"{args.command} needs a spec file"])
        try:
            if args.spec == "-":
                text = sys.stdin.read()
            else:
                with open(args.spec, encoding="utf-8") as fh:
                    text = fh.read()
        except OSError as exc:
            raise ConfigError([f"cannot read {args.spec}: {exc}"]) from None
        cfg = parse_config(text, args.command)
    if args.alpha is not None:
        cfg.alpha = [_rational(a, "--alpha") for a in args.alpha.split(",")]
    if args.s is not None:
        cfg.s = _rational(args.s, "--s")
    if args.samples is not None:
        cfg.samples = args.samples
    if args.seed is not None:
        cfg.seed = args.seed
    if args.tol is not None:
        try:
            float(args.tol)
        except ValueError:
            raise ConfigError([f"--tol: not a decimal: {args.tol!r}"]) from None
        cfg.tolerance = args.tol
    cfg.output = args.out
    cfg.symbolic = args.symbolic
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        code, doc = EXIT_INVALID, {"command": args.command, "error": str(exc), "problems": exc.problems}
    else:
        code, doc = run(cfg)
    text = render(doc)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        try:
            write_atomic(args.out, text)
        except OSError as exc:
            print(f"cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_INVALID
    print(summary(code, doc), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
