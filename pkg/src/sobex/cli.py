"""Command line entry point.

    sobex domain make --domain cusp:0.5 --out x.json
    sobex extend --domain disk --map identity --method harmonic --mesh 6 --out f.csv
    sobex energy douglas --map identity
    sobex qh growth --domain cusp:0.5
    sobex cex cusp --p 1.5 --N 1000000

Exit codes: 0 success, 2 invalid input, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import io
from .boundary_maps import (MapError, CircleMap, EpsSequence, cascade_map, cusp_boundary_map, identity_map,
                            random_monotone_map, rotation, spiral_boundary_map)
from .extension import NonConvergenceError
from .geometry import (TWO_PI, GeometryError, JordanCurve, JordanDomain, make_cusp_domain, make_disk,
                       make_regular_polygon, make_spiral_domain, make_square, make_target_Ytau)


class ValidationError(ValueError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    action: str = ""
    domain: str = "disk"
    map: str = "identity"
    p: float = 2.0
    mesh: int = 5
    out: str | None = None
    seed: int = 0
    extra: dict = field(default_factory=dict)

    def validate(self):
        if not 1 <= self.mesh <= 10:
            raise ValidationError("mesh level must lie in [1, 10]")
        lo, hi = _P_RANGE.get((self.subcommand, self.action), (1.0, np.inf))
        if not lo <= self.p <= hi:
            raise ValidationError(f"p = {self.p} outside [{lo}, {hi}] for {self.subcommand} {self.action}")
        return self


_P_RANGE = {
    ("extend", ""): (1.0 + 1e-9, 1e6),
    ("energy", "pdouglas"): (2.0, 1e6),
    ("energy", "cond32"): (1.0, 2.0 - 1e-12),
    ("cex", "cusp"): (1.0 + 1e-12, 2.0 - 1e-12),
}


# -- spec parsing --------------------------------------------------------------------------


def parse_domain(spec) -> JordanDomain:
    """disk, square, polygon:n, cusp:s, spiral:N, ytau:tau or a curve JSON file."""
    name, _, arg = spec.partition(":")
    try:
        if name == "disk":
            return make_disk()
        if name == "square":
            return make_square()
        if name == "polygon":
            return make_regular_polygon(int(arg or 5))
        if name == "cusp":
            return make_cusp_domain(float(arg))
        if name == "spiral":
            return make_spiral_domain(int(arg))
        if name == "ytau":
            return make_target_Ytau(float(arg))
    except (TypeError, ValueError) as e:
        raise ValidationError(f"bad domain spec {spec!r}: {e}") from None
    if os.path.exists(spec):
        with open(spec) as fh:
            d = json.load(fh)
        v = np.asarray(d["vertices"], float)
        return JordanDomain(JordanCurve(v[:, 0] + 1j * v[:, 1], d.get("analytic_tag")))
    raise ValidationError(f"unknown domain spec {spec!r}")


def parse_boundary_map(spec, domain: JordanDomain | None = None, p=1.5, seed=0):
    """Boundary map spec: identity, rotation:a, power:k, random[:seed],
    cascade:w, spiral, cusp or a map JSON file. power:k is the callable
    theta -> e^{ik theta}, the rest are CircleMaps."""
    name, _, arg = spec.partition(":")
    curve = domain.boundary if domain is not None else None
    if name == "identity":
        return identity_map(curve) if curve is not None else identity_map()
    if name == "rotation":
        return rotation(float(arg))
    if name == "power":
        k = int(arg)
        return lambda th: np.exp(1j * k * np.asarray(th, float))
    if name == "random":
        return random_monotone_map(np.random.default_rng(int(arg) if arg else seed))
    if name == "cascade":
        return cascade_map(float(arg or 0.7))
    if name == "spiral":
        if domain is None or not (domain.boundary.analytic_tag or "").startswith("spiral"):
            raise ValidationError("the spiral map needs --domain spiral:N")
        return spiral_boundary_map(domain)
    if name == "cusp":
        if domain is None or not (domain.boundary.analytic_tag or "").startswith("cusp"):
            raise ValidationError("the cusp map needs --domain cusp:s")
        return cusp_boundary_map(domain, p, EpsSequence.parse(arg or None))
    if os.path.exists(spec):
        with open(spec) as fh:
            return CircleMap.from_dict(json.load(fh))
    raise ValidationError(f"unknown map spec {spec!r}")


def _complex_list(text):
    out = []
    for tok in text.split(";"):
        tok = tok.strip().replace(" ", "")
        if tok:
            out.append(complex(tok.replace("i", "j")))
    return np.array(out)


def _emit(cfg: RunConfig, text):
    if cfg.out:
        io.atomic_write(cfg.out, text)
    else:
        sys.stdout.write(text)


# -- subcommands -----------------------------------------------------------------------------


def cmd_domain(cfg, a):
    X = parse_domain(cfg.domain)
    _emit(cfg, io.to_json(X.to_dict()))


def cmd_map(cfg, a):
    if a.kind == "file":
        if not a.file:
            raise ValidationError("--kind file needs --file")
        phi = parse_boundary_map(a.file)
    elif a.kind in ("spiral", "cusp"):
        phi = parse_boundary_map(a.kind, parse_domain(cfg.domain), cfg.p)
    else:
        phi = identity_map()
    _emit(cfg, io.to_json(phi.to_dict()))


def cmd_conformal(cfg, a):
    from .conformal import hardy_norm, koebe_ratio, parse_map

    g = parse_map(a.g)
    if cfg.action == "eval":
        z = _complex_list(a.z)
        w, dw = g.eval(z), g.derivative(z)
        rows = [f"{x.real:.17g},{x.imag:.17g},{v.real:.17g},{v.imag:.17g},{d.real:.17g},{d.imag:.17g}"
                for x, v, d in zip(z, w, dw)]
        _emit(cfg, "x,y,re_g,im_g,re_dg,im_dg\n" + "".join(r + "\n" for r in rows))
    elif cfg.action == "hardy":
        r = np.array([float(t) for t in a.r.split(",")])
        norm, means = hardy_norm(g.derivative, cfg.p, r)
        _emit(cfg, io.to_json({"value": norm, "p": cfg.p, "radii": r, "means": means}))
    else:
        X = parse_domain(cfg.domain)
        z = _complex_list(a.z)
        _emit(cfg, io.to_json({"points": z, "ratios": koebe_ratio(g, X, z)}))


def _extend(cfg, a):
    from .extension import composed_extension, harmonic_extend, p_harmonic_extend
    from .mesh import cusp_mesh, disk_mesh

    if a.method == "composed":
        target = parse_domain(cfg.domain)
        phi = parse_boundary_map(cfg.map, None, cfg.p, cfg.seed)
        if not isinstance(phi, CircleMap):
            raise ValidationError("the composed method needs a circle map")
        phi = phi.with_target(target.boundary)
        method = "harmonic" if cfg.p == 2 else "pharmonic"
        return composed_extension(phi, disk_mesh(cfg.mesh), method=method, p=cfg.p,
                                  split_kinks=method == "harmonic")
    X = parse_domain(cfg.domain)
    tag = X.boundary.analytic_tag or ""
    if tag == "circle":
        mesh = disk_mesh(cfg.mesh)
    elif tag.startswith("cusp"):
        mesh = cusp_mesh(float(tag.split(":")[1]), cfg.mesh)
    else:
        raise ValidationError("extend meshes the disk or a cusp domain")
    phi = parse_boundary_map(cfg.map, X, cfg.p, cfg.seed)
    if a.method == "harmonic":
        return harmonic_extend(phi, mesh)
    return p_harmonic_extend(phi, mesh, cfg.p)


def cmd_extend(cfg, a):
    f = _extend(cfg, a)
    if a.elements:
        io.atomic_write(a.elements, f.elements_csv())
    if a.svg:
        io.atomic_write(a.svg, io.field_svg(f))
    _emit(cfg, f.to_csv())
    sys.stderr.write(f"trace error {f.trace_error():.3e}\n")


def cmd_energy(cfg, a):
    from . import energy as en
    from .conformal import parse_map

    act = cfg.action
    if act in ("douglas", "invdouglas", "pdouglas"):
        phi = parse_boundary_map(cfg.map, None, cfg.p, cfg.seed)
        if act == "douglas":
            rep = en.douglas(phi, levels=a.levels or 6)
        elif act == "pdouglas":
            rep = en.p_douglas(phi, cfg.p, levels=a.levels or 5)
        else:
            if not isinstance(phi, CircleMap):
                raise ValidationError("invdouglas needs a circle map")
            rep = en.inverse_douglas(phi, levels=a.levels or 4)
        _emit(cfg, io.to_json(rep.to_dict()))
    elif act == "sobolev":
        fields = []
        top = cfg.mesh
        for L in range(max(1, top - (a.levels or 1) + 1), top + 1):
            sub = RunConfig(cfg.subcommand, "", cfg.domain, cfg.map, cfg.p, L, None, cfg.seed)
            fields.append(_extend(sub, argparse.Namespace(method="pharmonic" if cfg.p != 2 else "harmonic")))
        _emit(cfg, io.to_json(en.sobolev_energy(fields, cfg.p).to_dict()))
    elif act == "cond32":
        g = parse_map(a.g)
        _emit(cfg, io.to_json({"value": en.condition_32(g, cfg.p), "p": cfg.p, "map": a.g}))
    else:
        weight = _weight(a.weight)
        eps = 2.0 ** -np.arange(3, 13)
        th = TWO_PI * np.arange(64) / 64
        prof = en.carleson_profile(weight, eps, th)
        _emit(cfg, io.to_json({"value": float(prof.max()), "eps": eps, "bound": 4 * np.pi,
                               "sup_per_eps": prof.max(axis=1)}))


def _weight(spec):
    name, _, arg = spec.partition(":")
    if name == "one":
        return lambda z: np.ones(np.shape(z))
    if name == "inv_abs_1mz":
        return lambda z: 1.0 / np.abs(1 - z)
    if name == "gprime":
        from .conformal import parse_map
        sub, _, p = arg.rpartition(":")
        g = parse_map(sub)
        q = 2.0 - float(p)
        return lambda z: np.abs(g.derivative(z)) ** q
    raise ValidationError(f"unknown weight {spec!r}")


def cmd_qh(cfg, a):
    from . import hyperbolic as hy

    if cfg.action == "moc":
        from .conformal import parse_map
        g = parse_map(a.g)
        rep = hy.moc_report(g, complex(a.z.replace("i", "j")), a.r, a.delta0, a.halvings)
        _emit(cfg, io.to_json(rep.to_dict()))
        return
    X = parse_domain(cfg.domain)
    tag = X.boundary.analytic_tag or ""
    if cfg.action == "growth":
        if tag.startswith("cusp"):
            X, pts = hy.cusp_approach(float(tag.split(":")[1]))
            x0 = 1.2j
        else:
            x0 = X.witness
            pts = x0 + (1 - np.geomspace(0.25, 3e-4, 24)) * (X.boundary.vertices[0] - x0)
        grid = hy.QhGrid(X, a.delta, x0, levels=a.levels, path=np.r_[x0, pts])
        fit = hy.growth_exponent(X, x0, pts, grid=grid)
        _emit(cfg, io.to_json(fit.to_dict()))
        return
    x0 = complex(a.x0.replace("i", "j")) if a.x0 else X.witness
    pts = _complex_list(a.x)
    grid = hy.QhGrid(X, a.delta, x0, levels=a.levels, path=np.r_[x0, pts])
    h = [grid.distance(z) for z in pts]
    _emit(cfg, "x,y,distance\n" + "".join(f"{z.real:.17g},{z.imag:.17g},{v:.17g}\n" for z, v in zip(pts, h)))


def cmd_cex(cfg, a):
    from . import counterexamples as cx

    N = a.N
    if N < 1:
        raise ValidationError("N must be at least 1")
    if cfg.action == "spiral":
        terms = cx.spiral_terms(N)
    else:
        terms = cx.cusp_terms(N, cfg.p, EpsSequence.parse(a.eps))
    levels = [10 ** k for k in range(1, 8) if 10 ** k < N] + [N]
    sums = cx.partial_sums_at(terms, levels)
    _emit(cfg, "N,partial_sum\n" + "".join(f"{n},{v:.17g}\n" for n, v in zip(levels, sums)))
    if a.json:
        cert = cx.divergence_certificate(lambda n: float(np.sum(terms[:n])), levels)
        io.write_json(a.json, cert.to_dict())


def cmd_svg(cfg, a):
    if cfg.action == "curve":
        _emit(cfg, io.curve_svg(parse_domain(cfg.domain).boundary))
    elif cfg.action == "field":
        f = _extend(cfg, argparse.Namespace(method=a.method))
        _emit(cfg, io.field_svg(f, image=not a.domain_side))
    else:
        with open(a.report) as fh:
            rep = json.load(fh)
        _emit(cfg, io.report_svg(rep["history"], a.label))


# -- self tests ------------------------------------------------------------------------------


def _check(name, ok, failures):
    sys.stdout.write(f"{'ok  ' if ok else 'FAIL'} {name}\n")
    if not ok:
        failures.append(name)


def selftest(command, failures):
    from . import counterexamples as cx
    from . import energy as en
    from .conformal import identity, phi_tau

    if command == "domain":
        X = make_disk(256)
        _check("unit circle length", abs(X.boundary.length - TWO_PI) < 1e-3, failures)
        _check("square contains centre", bool(make_square().contains(0.5 + 0.5j)), failures)
    elif command == "map":
        phi = identity_map()
        th = np.linspace(0, 6, 7)
        _check("identity map", np.allclose(phi.angle(th), th), failures)
    elif command == "conformal":
        _check("identity derivative", abs(identity().derivative(0.3j) - 1) < 1e-15, failures)
        _check("phi_1 boundary limit", abs(phi_tau(1.0).boundary_value(1.0 + 0j)) < 1e-15, failures)
    elif command == "extend":
        from .extension import harmonic_extend
        from .mesh import disk_mesh
        f = harmonic_extend(identity_map(), disk_mesh(4))
        _check("identity extension", np.max(np.abs(f.values - f.mesh.nodes)) < 1e-6, failures)
    elif command == "energy":
        v = en.douglas(identity_map(), levels=6).value
        _check("Douglas energy of the identity", abs(v / (4 * np.pi ** 2) - 1) < 1e-3, failures)
    elif command == "qh":
        from .hyperbolic import QhGrid
        g = QhGrid(make_disk(), 1 / 64, 0j)
        _check("disk qh distance", abs(g.distance(0.5 + 0j) / np.log(2) - 1) < 0.1, failures)
    elif command == "cex":
        _check("spiral N=1", abs(cx.spiral_lower_bound(1) - 1 / np.log(2)) < 1e-15, failures)
        ref = np.log(2) ** -1.0 / (np.pi ** 2 / 6)
        _check("cusp N=1", abs(cx.cusp_lower_bound(1, 1.5) - ref) < 1e-12, failures)
    elif command == "svg":
        s = io.curve_svg(make_disk(64).boundary)
        _check("circle svg has one path", s.count("<path") == 1, failures)


# -- parser ----------------------------------------------------------------------------------


def build_parser():
    ap = argparse.ArgumentParser(prog="sobex", description="Sobolev homeomorphic extension experiments")
    ap.add_argument("--threads", type=int, help="worker cap (same as SOBEX_THREADS)")
    sub = ap.add_subparsers(dest="command")

    def common(p, domain="disk", map_="identity", p_default=2.0):
        p.add_argument("--domain", default=domain)
        p.add_argument("--map", default=map_)
        p.add_argument("--p", type=float, default=p_default)
        p.add_argument("--mesh", type=int, default=5)
        p.add_argument("--out")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--selftest", action="store_true")

    def action_parser(name, actions):
        p = sub.add_parser(name)
        p.add_argument("--selftest", action="store_true")
        acts = p.add_subparsers(dest="action")
        return {act: acts.add_parser(act) for act in actions}, p

    acts, _ = action_parser("domain", ["make"])
    common(acts["make"])

    acts, _ = action_parser("map", ["make"])
    common(acts["make"], domain="cusp:0.5", p_default=1.5)
    acts["make"].add_argument("--kind", choices=["spiral", "cusp", "identity", "file"], default="identity")
    acts["make"].add_argument("--file")

    acts, _ = action_parser("conformal", ["eval", "hardy", "koebe"])
    for p in acts.values():
        common(p, domain="ytau:0.5", p_default=1.0)
        p.add_argument("--g", default="phi_tau:0.5")
        p.add_argument("--z", default="0;0.5;0.5i")
        p.add_argument("--r", default="0.5,0.9,0.99")

    p = sub.add_parser("extend")
    common(p)
    p.add_argument("--method", choices=["harmonic", "pharmonic", "composed"], default="harmonic")
    p.add_argument("--elements")
    p.add_argument("--svg")

    acts, _ = action_parser("energy", ["douglas", "invdouglas", "pdouglas", "sobolev", "cond32", "carleson"])
    for name, p in acts.items():
        common(p, p_default=1.0 if name == "cond32" else 2.0)
        p.add_argument("--levels", type=int)
        p.add_argument("--g", default="identity")
        p.add_argument("--weight", default="inv_abs_1mz")

    acts, _ = action_parser("qh", ["dist", "growth", "moc"])
    for p in acts.values():
        common(p)
        p.add_argument("--delta", type=float, default=1 / 256)
        p.add_argument("--levels", type=int, default=0)
        p.add_argument("--x0")
        p.add_argument("--x", default="0.5;0.9")
        p.add_argument("--g", default="phi_tau:1")
        p.add_argument("--z", default="1")
        p.add_argument("--r", type=float, default=0.5)
        p.add_argument("--delta0", type=float, default=1e-3)
        p.add_argument("--halvings", type=int, default=8)

    acts, _ = action_parser("cex", ["spiral", "cusp"])
    for p in acts.values():
        common(p, p_default=1.5)
        p.add_argument("--N", type=int, default=10 ** 6)
        p.add_argument("--eps", default="power:2")
        p.add_argument("--json")

    acts, _ = action_parser("svg", ["curve", "field", "report"])
    for p in acts.values():
        common(p)
        p.add_argument("--method", default="harmonic")
        p.add_argument("--domain-side", action="store_true")
        p.add_argument("--report")
        p.add_argument("--label", default="")
    return ap


COMMANDS = {"domain": cmd_domain, "map": cmd_map, "conformal": cmd_conformal, "extend": cmd_extend,
            "energy": cmd_energy, "qh": cmd_qh, "cex": cmd_cex, "svg": cmd_svg}


def run(cfg: RunConfig, args) -> int:
    try:
        cfg.validate()
        COMMANDS[cfg.subcommand](cfg, args)
    except NonConvergenceError as e:
        sys.stderr.write(f"error: {e} (residual {e.residual:.3e})\n")
        return 3
    except (ValidationError, GeometryError, MapError, ValueError, OSError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 2
    return 0


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.threads:
        os.environ["SOBEX_THREADS"] = str(args.threads)
    if args.command is None:
        ap.print_usage(sys.stderr)
        return 2
    if getattr(args, "selftest", False):
        failures = []
        selftest(args.command, failures)
        return 1 if failures else 0
    action = getattr(args, "action", None) or ""
    if args.command not in ("extend",) and not action:
        sys.stderr.write(f"usage: sobex {args.command} <action> [options]\n")
        return 2
    cfg = RunConfig(args.command, action, args.domain, args.map, args.p, args.mesh, args.out, args.seed)
    return run(cfg, args)


if __name__ == "__main__":
    sys.exit(main())
