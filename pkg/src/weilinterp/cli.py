"""Command-line front end.

    weilinterp gk casimir --kind lowest --weight 1/2
    weilinterp osc check-commutators
    weilinterp interp mv-report
    weilinterp cohom --rep rep.json
    weilinterp cusp solve --lambda -0.375 --input profile.json --out g.json --residual-report
    weilinterp heis relations --profile h.json --radius 64 --tdepth 64 --table out.csv
    weilinterp run all --seed 7
    weilinterp run criterion --id 3

Exit status: 0 when every check passes, 1 when a check or acceptance
criterion fails, 2 for usage and input errors.  Relative output paths are
written under $WEILINTERP_OUTPUT_DIR (default: the working directory).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
import tempfile
from dataclasses import asdict, dataclass, fields
from fractions import Fraction

import numpy as np

OUTPUT_ENV = "WEILINTERP_OUTPUT_DIR"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- configuration ---------------------------------------------------------------
@dataclass(frozen=True)
class RunConfig:
    L: float = 8.0
    N: int = 2048
    n_max: int = 40
    k_max: int = 24
    R: int = 64
    T: int = 64
    seed: int = 7
    tol: float = 1e-6
    output_dir: str = "."

    def validate(self) -> "RunConfig":
        if not self.L > 0:
            raise UsageError("L must be positive (got %r)" % self.L)
        if self.N < 16 or self.N % 2:
            raise UsageError("N must be an even integer >= 16 (got %r)" % self.N)
        if self.n_max < 1:
            raise UsageError("n_max must be >= 1 (got %r)" % self.n_max)
        if np.sqrt(self.n_max) > self.L:
            raise UsageError("sqrt(n_max) = %.3g must not exceed L = %g; enlarge the grid"
                             % (np.sqrt(self.n_max), self.L))
        if self.k_max < 1:
            raise UsageError("k_max must be >= 1 (got %r)" % self.k_max)
        if self.R < 1 or self.T < 1:
            raise UsageError("R and T must be >= 1")
        if not self.tol > 0:
            raise UsageError("tol must be positive")
        return self

    @classmethod
    def from_sources(cls, args, config_file=None) -> "RunConfig":
        """Defaults, then a JSON config file, then explicit flags."""
        values = {"output_dir": os.environ.get(OUTPUT_ENV, ".")}
        names = {f.name: f.type for f in fields(cls)}
        if config_file:
            data = _read_json(config_file)
            unknown = set(data) - set(names)
            if unknown:
                raise UsageError("unknown config keys: %s" % ", ".join(sorted(unknown)))
            values.update(data)
        for name in names:
            v = getattr(args, name, None)
            if v is not None:
                values[name] = v
        try:
            cfg = cls(**{k: (float(v) if names[k] == "float" else int(v) if names[k] == "int" else v)
                         for k, v in values.items()})
        except (TypeError, ValueError) as exc:
            raise UsageError("bad config value: %s" % exc)
        return cfg.validate()


# -- I/O helpers -----------------------------------------------------------------
def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise UsageError("input file not found: %s" % path)
    except json.JSONDecodeError as exc:
        raise UsageError("%s is not valid JSON: %s" % (path, exc))


def _resolve(path):
    if os.path.isabs(path):
        return path
    return os.path.join(os.environ.get(OUTPUT_ENV, "."), path)


def _write_atomic(path, text):
    path = _resolve(path)
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, (complex, np.complexfloating)):
        return [float(np.real(o)), float(np.imag(o))]
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError("not serializable: %r" % type(o))


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(obj, out=None):
    text = _dumps(obj)
    if out:
        _write_atomic(out, text)
    sys.stdout.write(text)


def _parse_complex(text):
    try:
        return complex(text.replace("i", "j").replace(" ", ""))
    except ValueError:
        raise UsageError("cannot parse %r as a number" % text)


# -- gk ------------------------------------------------------------------------
def _module_from_args(args, prefix=""):
    from . import gk_algebra as gk
    kind = getattr(args, prefix + "kind")
    weight = getattr(args, prefix + "weight")
    try:
        if kind in ("lowest", "highest"):
            if weight is None:
                raise UsageError("--%sweight is required for kind %s" % (prefix.replace("_", "-"), kind))
            return gk.GkModule.lowest(weight) if kind == "lowest" else gk.GkModule.highest(weight)
        if kind == "finite":
            dim = getattr(args, prefix + "dim")
            if dim is None:
                raise UsageError("--%sdim is required for kind finite" % prefix.replace("_", "-"))
            return gk.GkModule.finite(dim)
        cas = getattr(args, prefix + "casimir")
        if weight is None or cas is None:
            raise UsageError("doubly_infinite needs --%sweight (coset) and --%scasimir"
                             % (prefix.replace("_", "-"), prefix.replace("_", "-")))
        return gk.GkModule.doubly_infinite(weight, cas)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(str(exc))


def cmd_gk(args):
    from . import gk_algebra as gk
    if args.gk_cmd == "ps":
        try:
            ps = gk.PrincipalSeries.of(args.zeta0, args.xi)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(str(exc))
        report = gk.principal_series_structure(ps).to_dict()
        report["casimir"] = str(ps.casimir)
        _emit(report, args.out)
        return EXIT_OK
    m = _module_from_args(args)
    try:
        if args.gk_cmd == "casimir":
            _emit({"module": m.to_dict(), "casimir": str(gk.casimir_eigenvalue(m))}, args.out)
        elif args.gk_cmd == "complement":
            c = gk.complementary_module(m)
            _emit({"module": m.to_dict(), "complement": c.to_dict(),
                   "complement_is_finite": not c.is_infinite}, args.out)
        else:  # ext1
            v = _module_from_args(args, "other_")
            _emit({"w": m.to_dict(), "v": v.to_dict(), "ext1": gk.ext1_dim(m, v)}, args.out)
    except ValueError as exc:
        raise UsageError(str(exc))
    return EXIT_OK


# -- osc -----------------------------------------------------------------------
def _load_grid_function(path):
    from . import oscillator as osc
    data = _read_json(path)
    try:
        return osc.GridFunction.from_json(data)
    except (KeyError, ValueError) as exc:
        raise UsageError("%s is not a GridFunction: %s" % (path, exc))


def cmd_osc(args):
    from . import oscillator as osc
    if args.osc_cmd == "check-commutators":
        cfg = RunConfig.from_sources(args)
        worst = {}
        for parity in ("even", "odd"):
            for k in range(args.kmax + 1):
                res = osc.identity_residuals(osc.basis_function(k, parity, cfg.L, cfg.N))
                for key, v in res.items():
                    worst[key] = max(worst.get(key, 0.0), v)
        ok = max(worst.values()) < cfg.tol
        _emit({"L": cfg.L, "N": cfg.N, "k_max": args.kmax, "tolerance": cfg.tol,
               "max_residual": worst, "passed": ok}, args.out)
        return EXIT_OK if ok else EXIT_FAIL
    phi = _load_grid_function(args.input)
    try:
        phi.check()
    except osc.GridError as exc:
        raise UsageError("input function fails grid checks: %s" % exc)
    if args.osc_cmd == "sample":
        try:
            s = osc.sample_map(phi, args.nmax)
        except ValueError as exc:
            raise UsageError(str(exc))
        _emit(s.to_json(), args.out)
        return EXIT_OK
    res, trunc = osc.poisson_residual(phi)
    ok = abs(res) <= max(args.tol * phi.scale(), 10 * trunc)
    _emit({"residual": res, "truncation": trunc, "passed": ok}, args.out)
    return EXIT_OK if ok else EXIT_FAIL


# -- interp --------------------------------------------------------------------
def _check_parity(parity):
    if parity not in ("even", "odd"):
        raise UsageError("parity must be 'even' or 'odd' (got %r)" % parity)


def cmd_interp(args):
    from . import interpolation as interp
    from . import oscillator as osc
    if args.interp_cmd == "design":
        _check_parity(args.parity)
        cfg = RunConfig.from_sources(args)
        try:
            D = interp.build_design(cfg.n_max, cfg.k_max, cfg.L, cfg.N, args.parity,
                                    args.derivative_rows)
        except ValueError as exc:
            raise UsageError(str(exc))
        dim, sv = interp.numerical_kernel(D)
        lk = interp.left_kernel(D, rows="all" if args.derivative_rows else "squares")
        report = {"n_max": cfg.n_max, "k_max": cfg.k_max, "parity": args.parity,
                  "shape": list(D.shape), "kernel_dim": dim, "left_kernel_dim": lk.dim,
                  "condition": float(sv[-1] / sv[0]) if sv[0] > 0 else None}
        if args.parity == "even":
            report["poisson_alignment"] = lk.alignment(interp.PoissonFunctional(cfg.n_max).vector)
        if args.out:
            desc = sv[::-1]
            _write_atomic(args.out, _csv(["index", "singular_value"],
                                         [[i, repr(float(v))] for i, v in enumerate(desc)]))
        _emit(report)
        return EXIT_OK
    if args.interp_cmd == "reconstruct":
        _check_parity(args.parity)
        data = _read_json(args.samples)
        try:
            s = osc.SampleVector.from_json(data)
        except (KeyError, ValueError) as exc:
            raise UsageError("%s is not a SampleVector: %s" % (args.samples, exc))
        try:
            r = interp.reconstruct(s, args.kmax, parity=args.parity, regularization=args.ridge)
        except interp.IllConditionedError as exc:
            sys.stderr.write("error: %s\n" % exc)
            return EXIT_FAIL
        except ValueError as exc:
            raise UsageError(str(exc))
        out = r.coefficients.to_json()
        out.update({"residual": r.residual, "poisson_residual": r.poisson_residual,
                    "condition": r.condition if np.isfinite(r.condition) else None, "rank": r.rank})
        _emit(out, args.out)
        return EXIT_OK
    _check_parity(args.parity)
    try:
        rep = interp.mv_dimension_report(n_max=args.nmax, parity=args.parity,
                                         derivative_rows=args.derivative_rows,
                                         radial_dim=args.radial_dim)
    except ValueError as exc:
        raise UsageError(str(exc))
    if args.verbose:
        _emit(rep, args.out)
    else:
        _emit({"h0": rep["h0"], "h1": rep["h1"]}, args.out)
    return EXIT_OK


# -- cohom ---------------------------------------------------------------------
def cmd_cohom(args):
    from .free_group_cohomology import GroupRep, bar_resolution_dims, mv_cohomology
    data = _read_json(args.rep)
    try:
        rep = GroupRep.from_json(data)
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError("%s is not a valid representation: %s" % (args.rep, exc))
    r = mv_cohomology(rep)
    out = r.to_dict()
    out["exact"] = rep.exact
    oracle = bar_resolution_dims(rep)
    out["bar_resolution"] = {"h0": oracle[0], "h1": oracle[1]}
    _emit(out, args.out)
    return EXIT_OK if (r.h0, r.h1) == oracle else EXIT_FAIL


# -- cusp ----------------------------------------------------------------------
def cmd_cusp(args):
    from . import cusp_ode
    lam = _parse_complex(args.lam)
    data = _read_json(args.input)
    try:
        f = cusp_ode.CuspProfile.from_json(data)
    except (KeyError, ValueError) as exc:
        raise UsageError("%s is not a CuspProfile: %s" % (args.input, exc))
    try:
        g = cusp_ode.solve_cusp(f, lam)
    except cusp_ode.GrowthBoundError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_FAIL
    except ValueError as exc:
        raise UsageError(str(exc))
    if args.out:
        _write_atomic(args.out, _dumps(g.to_json()))
    roots = cusp_ode.indicial_roots(lam)
    report = {"lambda": lam, "roots": [roots.p1, roots.p2], "double_root": roots.double,
              "R": g.R, "residual": g.residual, "passed": g.residual < args.tol}
    if args.residual_report:
        report["growth"] = cusp_ode.growth_report(g).to_dict()
    _emit(report)
    return EXIT_OK if report["passed"] else EXIT_FAIL


# -- heis ----------------------------------------------------------------------
def cmd_heis(args):
    from . import heisenberg_p1 as heis
    if args.profile:
        try:
            form = heis.HomogeneousForm.from_json(_read_json(args.profile))
        except (KeyError, ValueError, TypeError) as exc:
            raise UsageError("bad profile: %s" % exc)
    else:
        form = heis.reference_form()
    if args.radius < 1 or args.tdepth < 1:
        raise UsageError("--radius and --tdepth must be >= 1")
    try:
        table = heis.coefficient_table(form)
        rows, size = [], 1
        while size < min(args.radius, args.tdepth):
            rows.append(heis.relation_residuals(form, size, size, table))
            size *= 2
        rows.append(heis.relation_residuals(form, args.radius, args.tdepth, table))
    except heis.TailDecayError as exc:
        raise UsageError(str(exc))
    except heis.InsufficientRangeError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_FAIL
    if args.table:
        _write_atomic(args.table, _csv(["R", "T", "r_A", "r_I", "r_J"],
                                       [[r.R, r.T, repr(r.r_A), repr(float(r.r_I)), repr(float(r.r_J))]
                                        for r in rows]))
    final = rows[-1]
    monotone = heis.is_monotone([r.r_I for r in rows]) and heis.is_monotone([r.r_J for r in rows])
    ok = final.r_A < 1e-8 and monotone and final.r_I < args.tol and final.r_J < args.tol
    _emit({"profile": form.to_json(), "final": final.to_dict(), "monotone": monotone,
           "tolerance": args.tol, "passed": ok})
    return EXIT_OK if ok else EXIT_FAIL


# -- run -----------------------------------------------------------------------
def cmd_run(args):
    from . import acceptance
    cfg = RunConfig.from_sources(args, args.config)
    settings = acceptance.Settings(L=cfg.L, N=cfg.N, n_max=cfg.n_max, k_max=cfg.k_max,
                                   R=cfg.R, T=cfg.T, seed=cfg.seed)
    if args.run_cmd == "all":
        ids = sorted(acceptance.CRITERIA)
    else:
        if args.id not in acceptance.CRITERIA:
            raise UsageError("criterion id must be one of %s" % sorted(acceptance.CRITERIA))
        ids = [args.id]
    results = []
    for cid in ids:
        r = acceptance.run_criterion(cid, settings)
        sys.stderr.write(r.line() + "\n")
        results.append(r)
    report = {"config": asdict(cfg) | {"output_dir": None},
              "criteria": [r.to_dict() for r in results],
              "passed": all(r.passed for r in results)}
    stem = "acceptance" if args.run_cmd == "all" else "criterion_%d" % args.id
    base = os.path.abspath(cfg.output_dir)
    _write_atomic(os.path.join(base, stem + ".json"), _dumps(report))
    _write_atomic(os.path.join(base, stem + ".csv"),
                  _csv(["id", "title", "passed"], [[r.id, r.title, int(r.passed)] for r in results]))
    sys.stdout.write(_dumps({"passed": report["passed"],
                             "results": {str(r.id): r.passed for r in results}}))
    return EXIT_OK if report["passed"] else EXIT_FAIL


# -- parser --------------------------------------------------------------------
def _add_grid(p):
    p.add_argument("--L", type=float, default=None, help="grid half width (default 8)")
    p.add_argument("--N", type=int, default=None, help="grid points (default 2048)")


def _add_module_args(p, prefix=""):
    flag = "--" + prefix.replace("_", "-")
    p.add_argument(flag + "kind", dest=prefix + "kind", required=True,
                   choices=["lowest", "highest", "finite", "doubly_infinite"])
    p.add_argument(flag + "weight", dest=prefix + "weight", default=None,
                   help="extremal weight (or coset representative), e.g. 1/2")
    p.add_argument(flag + "dim", dest=prefix + "dim", type=int, default=None)
    p.add_argument(flag + "casimir", dest=prefix + "casimir", default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="weilinterp", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="cmd", required=True)

    gk = sub.add_parser("gk", help="(g,K)-module calculator")
    gks = gk.add_subparsers(dest="gk_cmd", required=True)
    for name in ("casimir", "complement", "ext1"):
        p = gks.add_parser(name)
        _add_module_args(p)
        if name == "ext1":
            _add_module_args(p, "other_")
        p.add_argument("--out")
    p = gks.add_parser("ps", help="principal series composition structure")
    p.add_argument("--zeta0", required=True)
    p.add_argument("--xi", required=True)
    p.add_argument("--out")

    osc_p = sub.add_parser("osc", help="oscillator representation checks")
    oss = osc_p.add_subparsers(dest="osc_cmd", required=True)
    p = oss.add_parser("check-commutators")
    _add_grid(p)
    p.add_argument("--kmax", type=int, default=20)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--out")
    p = oss.add_parser("sample")
    p.add_argument("--input", required=True)
    p.add_argument("--nmax", type=int, default=64)
    p.add_argument("--out")
    p = oss.add_parser("poisson")
    p.add_argument("--input", required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--out")

    ip = sub.add_parser("interp", help="interpolation design and reconstruction")
    ips = ip.add_subparsers(dest="interp_cmd", required=True)
    p = ips.add_parser("design")
    _add_grid(p)
    p.add_argument("--nmax", dest="n_max", type=int, default=None)
    p.add_argument("--kmax", dest="k_max", type=int, default=None)
    p.add_argument("--parity", default="even")
    p.add_argument("--derivative-rows", action="store_true")
    p.add_argument("--out", help="CSV of singular values")
    p = ips.add_parser("reconstruct")
    p.add_argument("--samples", required=True)
    p.add_argument("--kmax", type=int, default=24)
    p.add_argument("--parity", default="even")
    p.add_argument("--ridge", type=float, default=0.0)
    p.add_argument("--out")
    p = ips.add_parser("mv-report")
    p.add_argument("--nmax", type=int, default=20)
    p.add_argument("--parity", default="even")
    p.add_argument("--derivative-rows", action="store_true")
    p.add_argument("--radial-dim", type=int, default=None)
    p.add_argument("--verbose", action="store_true", help="include ranks and angles")
    p.add_argument("--out")

    p = sub.add_parser("cohom", help="H^0, H^1 of the free group on two generators")
    p.add_argument("--rep", required=True)
    p.add_argument("--out")

    cp = sub.add_parser("cusp", help="cusp ODE inverter")
    cps = cp.add_subparsers(dest="cusp_cmd", required=True)
    p = cps.add_parser("solve")
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--out")
    p.add_argument("--residual-report", action="store_true")
    p.add_argument("--tol", type=float, default=1e-6)

    hp = sub.add_parser("heis", help="P^1 Heisenberg relations")
    hps = hp.add_subparsers(dest="heis_cmd", required=True)
    p = hps.add_parser("relations")
    p.add_argument("--profile", help="form JSON; default h = 1/(1+x^2)^2")
    p.add_argument("--radius", type=int, default=64)
    p.add_argument("--tdepth", type=int, default=64)
    p.add_argument("--table")
    p.add_argument("--tol", type=float, default=1e-3)

    rp = sub.add_parser("run", help="acceptance suite")
    rps = rp.add_subparsers(dest="run_cmd", required=True)
    for name in ("all", "criterion"):
        p = rps.add_parser(name)
        if name == "criterion":
            p.add_argument("--id", type=int, required=True)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--config", help="JSON file overriding RunConfig defaults")
        _add_grid(p)
        p.add_argument("--nmax", dest="n_max", type=int, default=None)
        p.add_argument("--kmax", dest="k_max", type=int, default=None)
        p.add_argument("--R", type=int, default=None)
        p.add_argument("--T", type=int, default=None)
    return ap


COMMANDS = {"gk": cmd_gk, "osc": cmd_osc, "interp": cmd_interp, "cohom": cmd_cohom,
            "cusp": cmd_cusp, "heis": cmd_heis, "run": cmd_run}


def _attach_negative_values(argv):
    """Turn '--weight -3/2' into '--weight=-3/2'; argparse treats '-3/2' as a flag."""
    out = []
    for tok in argv:
        if out and out[-1].startswith("--") and "=" not in out[-1] and re.match(r"^-[\d.]", tok):
            out[-1] = out[-1] + "=" + tok
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _attach_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with status 2
        return int(exc.code or 0)
    try:
        return COMMANDS[args.cmd](args)
    except UsageError as exc:
        sys.stderr.write("usage error: %s\n" % exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
