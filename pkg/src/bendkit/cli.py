"""Command-line front end: parse job specs, run the pipelines, emit certificates.

Commands:
    bendkit analytic         exact generator-quad pipeline on s^(m+2)+eps t^(n+2)
    bendkit floquet-spectrum spectrum CSV for a homogeneous-graph profile
    bendkit floquet-bend     order-l bending of a homogeneous graph + certificate
    bendkit verify           residual/defect/triviality certificate for given fields
    bendkit reduce-vekua     verify plus the complex reduction residual on K>0 points

stdout carries a single summary line; all data goes to files in --out.
Exit codes: 0 ok, 2 schema/solution-form errors, 3 curvature violation,
4 resonance.
"""

from __future__ import annotations

import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import click
import numpy as np

from . import floquet as fl
from . import series as se
from . import surface_core as sc
from . import vekua as vk
from .errors import (
    BendkitError,
    CompatibilityFailure,
    CurvatureViolation,
    NotDivisible,
    NotInSolutionForm,
    ResonantExponent,
    ResonantForcing,
    SchemaError,
)
from .exprgrammar import parse_polynomial
from .fields import DeformationFamily, PolynomialField, TrivialField
from .floquet import HomogeneousSurface, PolarField
from .fourier import PeriodicProfile
from .parallel import pmap
from .polynomial import Poly2
from .surfaces import Annulus, GraphSurface, Rectangle, smn_surface

FLOAT_FMT = "%.17g"


# ---------------------------------------------------------------------------
# schema helpers
# ---------------------------------------------------------------------------


def _check_keys(obj, required, optional, where):
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object")
    missing = [k for k in required if k not in obj]
    if missing:
        raise SchemaError(f"{where}: missing keys {missing}")
    unknown = sorted(set(obj) - set(required) - set(optional))
    if unknown:
        raise SchemaError(f"{where}: unknown keys {unknown}")


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON at line {exc.lineno} col {exc.colno}") from exc
    except OSError as exc:
        raise SchemaError(f"{path}: {exc}") from exc


def _write_json(path: Path, obj):
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _parse_domain(obj, default):
    if obj is None:
        return default
    _check_keys(obj, [], ["rect", "annulus"], "domain")
    if "rect" in obj:
        s0, s1, t0, t1 = (float(x) for x in obj["rect"])
        return Rectangle(s0, s1, t0, t1)
    if "annulus" in obj:
        r0, r1 = (float(x) for x in obj["annulus"])
        return Annulus(r0, r1)
    return default


def parse_surface(obj):
    _check_keys(obj, ["kind"], ["expr", "coeffs", "m", "n", "eps", "fourier", "domain"],
                "surface")
    kind = obj["kind"]
    domain = obj.get("domain")
    if kind == "graph-expr":
        if "expr" not in obj:
            raise SchemaError("graph-expr surface needs 'expr'")
        z = parse_polynomial(obj["expr"])
        return GraphSurface(z, domain=_parse_domain(domain, None))
    if kind == "graph-poly":
        if "coeffs" not in obj:
            raise SchemaError("graph-poly surface needs 'coeffs'")
        coeffs = {}
        for key, val in obj["coeffs"].items():
            i, j = key.split(",")
            coeffs[(int(i), int(j))] = Fraction(str(val))
        return GraphSurface(Poly2(coeffs), domain=_parse_domain(domain, None))
    if kind == "homogeneous":
        for key in ("m", "fourier"):
            if key not in obj:
                raise SchemaError(f"homogeneous surface needs '{key}'")
        prof = _parse_profile(obj["fourier"])
        return HomogeneousSurface(float(obj["m"]), prof,
                                  domain=_parse_domain(domain, Annulus(0.2, 1.0)))
    if kind == "smn":
        for key in ("m", "n", "eps"):
            if key not in obj:
                raise SchemaError(f"smn surface needs '{key}'")
        return smn_surface(int(obj["m"]), int(obj["n"]), int(obj["eps"]),
                           domain=_parse_domain(domain, None))
    raise SchemaError(f"unknown surface kind {kind!r}")


def _parse_profile(obj):
    _check_keys(obj, [], ["cos", "sin"], "fourier")
    return PeriodicProfile(cos=obj.get("cos", [1.0]), sin=obj.get("sin", []))


def _parse_profile_doc(obj):
    """Flat profile document {m, cos, sin} or a homogeneous surface spec."""
    if "kind" in obj:
        surf = parse_surface(obj)
        if not isinstance(surf, HomogeneousSurface):
            raise SchemaError("floquet commands need a homogeneous surface")
        return surf.m, surf.profile
    _check_keys(obj, ["m"], ["cos", "sin"], "profile")
    return float(obj["m"]), PeriodicProfile(cos=obj.get("cos", [1.0]), sin=obj.get("sin", []))


def _parse_bivariate(obj, where):
    _check_keys(obj, ["coeffs"], ["nx", "ny"], where)
    coeffs = {}
    for key, val in obj["coeffs"].items():
        i, j = key.split(",")
        coeffs[(int(i), int(j))] = Fraction(str(val))
    return Poly2(coeffs)


def parse_field(obj, surface):
    _check_keys(obj, ["type"], ["u", "v", "w", "A", "B"], "field")
    kind = obj["type"]
    if kind == "polynomial":
        comps = []
        for name in ("u", "v", "w"):
            if name not in obj:
                raise SchemaError(f"polynomial field needs '{name}'")
            comps.append(_parse_bivariate(obj[name], f"field.{name}"))
        return PolynomialField(*comps)
    if kind == "trivial":
        return TrivialField([float(x) for x in obj.get("A", [0, 0, 0])],
                            [float(x) for x in obj.get("B", [0, 0, 0])], surface)
    if kind == "polar":
        comps = []
        for name in ("u", "v", "w"):
            terms = []
            for term in obj.get(name, []):
                _check_keys(term, ["exponent"], ["cos", "sin"], f"field.{name} term")
                terms.append((float(term["exponent"]),
                              PeriodicProfile(cos=term.get("cos", [0.0]),
                                              sin=term.get("sin", []))))
            comps.append(terms)
        return PolarField(*comps)
    raise SchemaError(f"unknown field type {kind!r}")


def field_to_json(field):
    if isinstance(field, PolynomialField):
        out = {"type": "polynomial"}
        for name, poly in (("u", field.u), ("v", field.v), ("w", field.w)):
            out[name] = {"coeffs": {f"{i},{j}": str(c) for (i, j), c in sorted(poly.coeffs.items())}}
        return out
    if isinstance(field, PolarField):
        out = {"type": "polar"}
        for name, terms in zip(("u", "v", "w"), field.terms):
            rows = []
            for gamma, prof in terms:
                cos, sin = prof.to_lists(tol=1e-15)
                rows.append({"exponent": gamma, "cos": cos, "sin": sin})
            out[name] = rows
        return out
    if isinstance(field, TrivialField):
        return {"type": "trivial", "A": list(map(float, field.A)), "B": list(map(float, field.B))}
    raise SchemaError(f"cannot serialize field of type {type(field).__name__}")


# ---------------------------------------------------------------------------
# shared option plumbing
# ---------------------------------------------------------------------------


def _common_options(fn):
    fn = click.option("--in", "in_path", required=True, type=click.Path(exists=True),
                      help="input job JSON")(fn)
    fn = click.option("--out", "out_dir", required=True, type=click.Path(),
                      help="output directory")(fn)
    fn = click.option("--trunc", type=int, default=20, show_default=True,
                      help="series truncation")(fn)
    fn = click.option("--order", "order_l", type=int, default=None, help="target order l")(fn)
    fn = click.option("--smooth", "smooth_k", type=int, default=1, show_default=True,
                      help="smoothness target k")(fn)
    fn = click.option("--range", "lam_range", default=None, help="lambda range a,b")(fn)
    fn = click.option("--tol", type=float, default=1e-6, show_default=True)(fn)
    fn = click.option("--seed", type=int, default=0, show_default=True)(fn)
    return fn


def _run(fn):
    try:
        fn()
    except (SchemaError, NotInSolutionForm, CompatibilityFailure, NotDivisible) as exc:
        click.echo(json.dumps({"error": type(exc).__name__, "detail": str(exc)}))
        sys.exit(2)
    except CurvatureViolation as exc:
        click.echo(json.dumps({
            "error": "CurvatureViolation",
            "margin": exc.margin,
            "violating_theta": exc.locations[:16],
        }))
        sys.exit(3)
    except (ResonantExponent, ResonantForcing) as exc:
        click.echo(json.dumps({"error": type(exc).__name__, "detail": str(exc)}))
        sys.exit(4)


def _outdir(out_dir) -> Path:
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _parse_range(text, default):
    if text is None:
        return default
    try:
        a, b = (float(x) for x in text.split(","))
    except ValueError as exc:
        raise SchemaError(f"--range must be 'a,b', got {text!r}") from exc
    return (a, b)


@click.group()
def main():
    """Construct and certify infinitesimal bendings of surfaces."""


# ---------------------------------------------------------------------------
# analytic pipeline (generator quads on s^(m+2) + eps t^(n+2))
# ---------------------------------------------------------------------------


@main.command("analytic")
@_common_options
def cmd_analytic(in_path, out_dir, trunc, order_l, smooth_k, lam_range, tol, seed):
    """Exact pipeline: generators -> series solution -> bending -> certificate."""

    def run():
        job = _load_json(in_path)
        _check_keys(job, ["surface", "generators"], ["eps_sweep"], "job")
        surf_spec = job["surface"]
        surface = parse_surface(surf_spec)
        if surf_spec.get("kind") != "smn":
            raise SchemaError("analytic needs an smn surface spec")
        m, n, eps = int(surf_spec["m"]), int(surf_spec["n"]), int(surf_spec["eps"])
        quad = se.GeneratorQuad.from_json(job["generators"])
        out = _outdir(out_dir)

        w_pure = se.build_w(m, n, eps, quad, trunc)
        pure_zero = se.pde_residual(w_pure, m, n, eps).is_zero()
        w_surf = se.surface_solution(m, n, eps, quad, trunc)
        surf_zero = se.surface_pde_residual(w_surf, m, n, eps).is_zero()
        field = se.recover_bending(w_surf, m, n, eps)

        family = DeformationFamily(surface, [field])
        grid = [(Fraction(i, 7), Fraction(j, 7)) for i in range(-3, 4) for j in range(-3, 4)]
        exact_zero = all(
            all(r == 0 for r in sc.bending_residual(family, 1, p)) for p in grid
        )
        eps_sweep = job.get("eps_sweep", [1e-1, 1e-2, 1e-3, 1e-4])
        float_grid = [(float(s), float(t)) for s, t in grid]
        report = sc.metric_defect_order(family, float_grid, eps_sweep)
        fit = sc.is_trivial(field, surface, tol=tol,
                            samples=Rectangle(-1, 1, -1, 1).interior_grid(4))

        _write_json(out / "w.json", {"pure": w_pure.to_json(), "surface": w_surf.to_json()})
        _write_json(out / "field.json", field_to_json(field))
        cert = {
            "m": m, "n": n, "eps": eps, "truncation": trunc, "seed": seed,
            "pde_residual_zero": bool(pure_zero),
            "surface_pde_residual_zero": bool(surf_zero),
            "bending_residual_exact_zero": bool(exact_zero),
            "defect_slope": report.slope,
            "defect_below_noise": report.below_noise_floor,
            "trivial": bool(fit.trivial),
            "triviality_fit_residual": fit.residual,
        }
        _write_json(out / "certificate.json", cert)
        click.echo(
            f"analytic: pde_residual_zero={pure_zero} exact_bending={exact_zero} "
            f"slope={report.slope:.3f} trivial={fit.trivial} -> {out}"
        )

    _run(run)


# ---------------------------------------------------------------------------
# floquet pipelines
# ---------------------------------------------------------------------------


@main.command("floquet-spectrum")
@_common_options
@click.option("--boundary", default="periodic", show_default=True,
              type=click.Choice(["periodic", "antiperiodic", "combined"]))
def cmd_floquet_spectrum(in_path, out_dir, trunc, order_l, smooth_k, lam_range, tol, seed,
                         boundary):
    """Spectrum CSV (j, tag, lambda, asymptotic, gap) plus invariants."""

    def run():
        m, profile = _parse_profile_doc(_load_json(in_path))
        margin = fl.curvature_margin(m, profile)
        if margin <= 0:
            raise CurvatureViolation(margin, fl.margin_violations(m, profile))
        out = _outdir(out_dir)
        binv = fl.b_invariants(m, profile)
        default_hi = fl.asymptotic_eigenvalue(12, binv.b1, binv.b2)
        rng = _parse_range(lam_range, (0.5 * math.pi / binv.b1, default_hi))
        spec = fl.spectrum(m, profile, rng, boundary=boundary)

        lines = ["j,tag,lambda,asymptotic,gap"]
        for ev in spec.eigenvalues:
            asym = fl.asymptotic_eigenvalue(ev.j, spec.b1, spec.b2)
            lines.append(",".join([
                str(ev.j), ev.tag,
                FLOAT_FMT % ev.value, FLOAT_FMT % asym, FLOAT_FMT % (ev.value - asym),
            ]))
        (out / "spectrum.csv").write_text("\n".join(lines) + "\n")

        nonres = fl.nonresonance(spec.b1, spec.b2, m, 2, tol=tol)
        cert = {
            "m": m, "margin": margin, "b1": spec.b1, "b2": spec.b2, "seed": seed,
            "count": len(spec.eigenvalues), "boundary": boundary,
            "range": list(rng),
            "nonresonance": {"order": 2, "passes": nonres.passes, "margin": nonres.margin,
                             "worst": nonres.worst},
            "singular_flags": spec.singular_flags,
        }
        _write_json(out / "certificate.json", cert)
        click.echo(
            f"floquet-spectrum: {len(spec.eigenvalues)} eigenvalues in "
            f"[{rng[0]:.3g},{rng[1]:.3g}] b1={spec.b1:.12g} b2={spec.b2:.3g} -> {out}"
        )

    _run(run)


@main.command("floquet-bend")
@_common_options
@click.option("--slot", type=int, default=None, help="pin the eigenvalue slot index")
@click.option("--grid-n", type=int, default=30, show_default=True,
              help="annulus residual grid resolution")
def cmd_floquet_bend(in_path, out_dir, trunc, order_l, smooth_k, lam_range, tol, seed,
                     slot, grid_n):
    """Build an order-l bending of a homogeneous graph and certify it."""

    def run():
        m, profile = _parse_profile_doc(_load_json(in_path))
        l = order_l if order_l is not None else 2
        out = _outdir(out_dir)
        build = fl.build_bending(m, profile, p=slot, l=l, k=smooth_k)
        surface = HomogeneousSurface(m, profile)
        family = DeformationFamily(surface, build.fields)

        grid = surface.domain.interior_grid(grid_n)
        residuals = sc.max_bending_residual(family, grid)
        eps_sweep = np.logspace(-1, -3, 7)
        report = sc.metric_defect_order(family, grid[:: max(1, len(grid) // 64)], eps_sweep)

        _write_json(out / "field.json", {
            "order": l,
            "lambda_p": build.lam,
            "slot": build.slot,
            "fields": [field_to_json(U) for U in build.fields],
        })
        nonres = build.nonres
        cert = {
            "m": m, "order": l, "smoothness": smooth_k, "seed": seed,
            "lambda_p": build.lam, "slot": build.slot,
            "min_exponent": build.min_exponent,
            "max_residual_per_order": residuals,
            "defect_slope": report.slope,
            "b1": build.spectral.b1, "b2": build.spectral.b2,
            "nonresonance": None if nonres is None else {
                "order": nonres.order, "passes": nonres.passes,
                "margin": nonres.margin, "worst": nonres.worst,
            },
        }
        _write_json(out / "certificate.json", cert)
        click.echo(
            f"floquet-bend: order={l} lambda_p={build.lam:.9g} "
            f"max_residual={max(residuals):.3e} slope={report.slope:.3f} -> {out}"
        )

    _run(run)


# ---------------------------------------------------------------------------
# verification pipelines
# ---------------------------------------------------------------------------


def _verify_core(job, order_override, tol, vekua_points=0):
    _check_keys(job, ["surface", "fields"], ["order", "eps_sweep", "grid_n"], "job")
    surface = parse_surface(job["surface"])
    fields = [parse_field(f, surface) for f in job["fields"]]
    order = order_override if order_override is not None else int(job.get("order", len(fields)))
    if len(fields) < order:
        raise SchemaError(f"order {order} requested but only {len(fields)} fields given")
    family = DeformationFamily(surface, fields[:order])

    grid_n = int(job.get("grid_n", 12))
    grid = surface.domain.interior_grid(grid_n)
    residuals = sc.max_bending_residual(family, grid)
    eps_sweep = job.get("eps_sweep", list(np.logspace(-1, -4, 7)))
    report = sc.metric_defect_order(family, grid[:: max(1, len(grid) // 64)], eps_sweep)
    fit = sc.is_trivial(fields[0], surface, tol=tol)

    certified = order if (max(residuals) < tol and not report.below_noise_floor
                          and report.slope >= order + 1 - 0.1) else 0
    cert = {
        "order_requested": order,
        "max_residual_per_order": residuals,
        "defect_slope": report.slope,
        "defect_below_noise": report.below_noise_floor,
        "trivial": bool(fit.trivial),
        "triviality_fit_residual": fit.residual,
        "order_certified": certified,
    }

    if vekua_points:
        pts = [p for p in grid if _curved(surface, p)][:vekua_points]
        worst = 0.0
        gap = 0.0
        for p in pts:
            worst = max(worst, abs(vk.vekua_residual(surface, fields, 1, p)))
            fd = sc.fundamental_data(surface, p)
            co = vk.vekua_coefficients(surface, fields, 1, p)
            gap = max(gap, co.closed_form_gap(fd.g, fd.e, fd.f, fd.area_elem))
        cert["vekua_points"] = len(pts)
        cert["vekua_max_residual"] = worst
        cert["vekua_C_closed_form_gap"] = gap
    return cert


def _curved(surface, p, floor=1e-6):
    try:
        fd = sc.fundamental_data(surface, p)
    except BendkitError:
        return False
    return fd.K > floor


@main.command("verify")
@_common_options
def cmd_verify(in_path, out_dir, trunc, order_l, smooth_k, lam_range, tol, seed):
    """Residual maxima, defect slope, and triviality fit for given fields."""

    def run():
        job = _load_json(in_path)
        out = _outdir(out_dir)
        cert = _verify_core(job, order_l, tol)
        cert["seed"] = seed
        _write_json(out / "certificate.json", cert)
        click.echo(
            f"verify: order={cert['order_certified']} "
            f"max_residual={max(cert['max_residual_per_order']):.3e} "
            f"slope={cert['defect_slope']:.3f} trivial={cert['trivial']} -> {out}"
        )

    _run(run)


@main.command("reduce-vekua")
@_common_options
@click.option("--points", type=int, default=100, show_default=True,
              help="number of K>0 sample points")
def cmd_reduce_vekua(in_path, out_dir, trunc, order_l, smooth_k, lam_range, tol, seed, points):
    """verify plus the complex reduction residual on a K>0 subgrid."""

    def run():
        job = _load_json(in_path)
        out = _outdir(out_dir)
        cert = _verify_core(job, order_l, tol, vekua_points=points)
        cert["seed"] = seed
        _write_json(out / "certificate.json", cert)
        click.echo(
            f"reduce-vekua: vekua_max_residual={cert.get('vekua_max_residual', float('nan')):.3e} "
            f"points={cert.get('vekua_points', 0)} -> {out}"
        )

    _run(run)


if __name__ == "__main__":
    main()
