"""Command-line front end.

    rp2ends COMMAND [residues ...] [--config PATH] [--out DIR]
                    [--format {csv,json}] [--svg]

Configs are flat ``key = value`` files with ``#`` comments; each command
accepts a fixed key set and rejects unknown keys. Exit codes: 0 success,
2 configuration or precondition error, 3 numerical failure.
"""

import argparse
import csv
import io
import json
import os
import re
import sys

import numpy as np

from . import degeneration as deg
from . import developing as dev
from . import geometry as geo
from . import levinson as lev
from . import projlin
from . import residue as res
from . import wang
from .errors import ConfigError, ParseError, PreconditionError, Rp2EndsError
from .fileio import atomic_path, atomic_write

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
COMMANDS = ("classify", "spectrum", "wang", "develop", "holonomy", "levinson", "family", "triangle")

# ---------------------------------------------------------------------------
# literals

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX = re.compile(
    r"^(?:(?P<re>[+-]?%s)(?:(?P<isgn>[+-])(?P<im>%s)?i)?|(?P<sgn>[+-]?)(?P<im2>%s)?i)$"
    % (_NUM, _NUM, _NUM))
_ANGLE = re.compile(r"^(?P<k>[+-]?(?:%s)?)\*?pi(?:/(?P<n>%s))?$" % (_NUM, _NUM))


def parse_complex(tok):
    """``a``, ``bi``, ``a+bi`` with optional signs and parts; ``i`` alone is 1i."""
    s = tok.strip().replace(" ", "")
    m = _COMPLEX.match(s)
    if not s or not m:
        raise ParseError("not a complex literal: %r" % tok)
    if m.group("re") is not None:
        re_part = float(m.group("re"))
        if m.group("isgn") is None:
            return complex(re_part, 0.0)
        im = float(m.group("im")) if m.group("im") else 1.0
        return complex(re_part, -im if m.group("isgn") == "-" else im)
    im = float(m.group("im2")) if m.group("im2") else 1.0
    return complex(0.0, -im if m.group("sgn") == "-" else im)


def parse_real(tok):
    try:
        return float(tok)
    except ValueError:
        raise ParseError("not a real number: %r" % tok) from None


def parse_angle(tok):
    """A real number or a multiple of pi such as ``pi/3``, ``-2pi/3``, ``5*pi/3``."""
    s = tok.strip().replace(" ", "")
    m = _ANGLE.match(s)
    if m:
        k = m.group("k")
        k = -1.0 if k == "-" else 1.0 if k in ("", "+") else float(k)
        n = float(m.group("n")) if m.group("n") else 1.0
        return k * np.pi / n
    return parse_real(s)


def parse_int(tok):
    try:
        return int(tok)
    except ValueError:
        raise ParseError("not an integer: %r" % tok) from None


def parse_bool(tok):
    t = tok.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ParseError("not a boolean: %r" % tok)


def _items(val):
    return [v for v in re.split(r"[,\s]+", val.strip()) if v]


def list_of(parse):
    return lambda val: [parse(v) for v in _items(val)]


def choice(*opts):
    def p(val):
        if val not in opts:
            raise ParseError("expected one of %s, got %r" % ("|".join(opts), val))
        return val
    return p


def _str(val):
    return val


# ---------------------------------------------------------------------------
# configs

_COEFF_KEY = re.compile(r"^(?P<side>[ab])(?P<m>-?\d+)$")

SCHEMAS = {
    "classify": {"residues": (list_of(parse_complex), None)},
    "spectrum": {"residue": (parse_complex, None), "iota": (parse_angle, None)},
    "wang": {
        "geometry": (choice("flat", "cusp"), "flat"), "residue": (parse_complex, 2 + 0j),
        "perturbation": (parse_real, 0.0), "Nx": (parse_int, 64), "Ny": (parse_int, 65),
        "y0": (parse_real, 0.0), "y1": (parse_real, 10.0), "alpha": (parse_real, 0.25),
        "beta": (parse_real, 1.0), "barrier": (choice("auto", "exponential", "constant"), "auto"),
        "tol": (parse_real, 1e-10), "orientation": (choice("conjugate", "holomorphic"), "conjugate"),
    },
    "develop": {
        "field": (choice("triangle", "model", "grid"), "triangle"), "residue": (parse_complex, 2 + 0j),
        "angle": (parse_angle, 0.0), "y_max": (parse_real, 40.0), "length": (parse_real, 40.0),
        "step": (parse_real, 1e-3), "start_x": (parse_real, 0.0), "start_y": (parse_real, None),
        "sample_every": (parse_real, 0.25), "tol": (parse_real, 1e-6), "field_file": (_str, None),
        "orientation": (choice("conjugate", "holomorphic"), "conjugate"),
    },
    "holonomy": {
        "field": (choice("model", "grid"), "model"), "residue": (parse_complex, 2 + 0j),
        "heights": (list_of(parse_real), [5.0, 10.0, 20.0]), "step": (parse_real, 1e-3),
        "field_file": (_str, None), "orientation": (choice("conjugate", "holomorphic"), "conjugate"),
    },
    "levinson": {
        "system": (choice("upper", "ray"), "upper"), "mu": (list_of(parse_real), [1.0, -1.0]),
        "c": (parse_real, 1.0), "T": (parse_real, 0.0), "k": (parse_int, 2),
        "y_max": (parse_real, 20.0), "n": (parse_int, 20001), "m_max": (parse_int, 60),
        "residue": (parse_complex, 2 + 0j), "iota": (parse_angle, np.pi / 6),
        "y_base": (parse_real, 1.0), "perturbation": (parse_complex, 0.3 + 0j),
        "probes": (list_of(parse_real), [1.0, 2.0, 4.0, 8.0]),
    },
    "family": {
        "kind": (choice(deg.QH, deg.PARABOLIC), deg.QH), "t_list": (list_of(parse_complex), None),
        "t_start": (parse_real, 1e-2), "t_stop": (parse_real, 1e-6), "t_count": (parse_int, 5),
        "Nx": (parse_int, 32), "per_unit": (parse_int, 8), "K": (parse_real, 0.5),
        "branch": (parse_int, 0), "alpha": (parse_real, 0.5), "beta": (parse_real, 1.0),
        "step": (parse_real, 1e-3), "decay_C": (parse_real, None),
        "orientation": (choice("conjugate", "holomorphic"), "conjugate"),
        "witnesses": (parse_bool, False), "homotopy_check": (parse_bool, False),
        "y_base": (parse_real, 1.2), "y_max": (parse_real, 30.0),
        "witness_tol": (parse_real, 2e-2),
    },
    "triangle": {
        "angles": (list_of(parse_angle), None), "length": (parse_real, 40.0),
        "step": (parse_real, 2e-3), "start_x": (parse_real, 0.0), "start_y": (parse_real, 0.0),
        "tol": (parse_real, 1e-6),
    },
}

TRIANGLE_ANGLES = (0.0, np.pi / 3, np.pi / 2, np.pi, 4.0, 5 * np.pi / 3)


def read_config_text(text):
    """Raw key -> value strings; later keys override earlier ones."""
    out = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("line %d: expected key = value, got %r" % (n, raw.strip()))
        k, v = (p.strip() for p in line.split("=", 1))
        if not k:
            raise ConfigError("line %d: empty key" % n)
        out[k] = v
    return out


def build_config(command, raw):
    """Validate raw strings against the command schema; fill defaults."""
    schema = SCHEMAS[command]
    cfg = {k: d for k, (_, d) in schema.items()}
    coeffs = {"a": {}, "b": {}}
    for k, v in raw.items():
        if command == "family" and _COEFF_KEY.match(k):
            m = _COEFF_KEY.match(k)
            try:
                coeffs[m.group("side")][int(m.group("m"))] = list_of(parse_complex)(v)
            except ParseError as e:
                raise ConfigError("key %s: %s" % (k, e)) from None
            continue
        if k not in schema:
            raise ConfigError("unknown key %r for command %s" % (k, command))
        try:
            cfg[k] = schema[k][0](v)
        except ParseError as e:
            raise ConfigError("key %s: %s" % (k, e)) from None
    if command == "family":
        cfg["a"], cfg["b"] = coeffs["a"], coeffs["b"]
    return cfg


def load_config(command, path):
    if path is None:
        return build_config(command, {})
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigError("cannot read config %s: %s" % (path, e.strerror)) from None
    return build_config(command, read_config_text(text))


# ---------------------------------------------------------------------------
# output


def fmt_complex(z):
    z = complex(z)
    if z.imag == 0:
        return repr(z.real)
    sign = "-" if np.signbit(z.imag) else "+"
    return "%r%s%ri" % (z.real, sign, abs(z.imag))


def _jsonable(v):
    if isinstance(v, (complex, np.complexfloating)):
        return fmt_complex(v)
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    return v


def json_text(obj):
    return json.dumps(_jsonable(obj), indent=2) + "\n"


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([x if isinstance(x, str) else fmt_complex(x) if isinstance(x, complex)
                    else repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])
    return buf.getvalue()


def aligned(header, rows):
    cells = [list(map(str, header))] + [[str(c) for c in r] for r in rows]
    w = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "\n".join("  ".join(c.ljust(w[i]) for i, c in enumerate(r)).rstrip() for r in cells) + "\n"


class Output:
    def __init__(self, out_dir, fmt, svg, stream):
        self.dir, self.fmt, self.svg, self.stream = out_dir, fmt, svg, stream

    def path(self, name):
        os.makedirs(self.dir, exist_ok=True)
        return os.path.join(self.dir, name)

    def table(self, stem, header, rows, records):
        """Tabular result: aligned text to stdout, file in the chosen format if --out."""
        if self.fmt == "json":
            text = json_text(records)
        elif self.fmt == "csv":
            text = csv_text(header, rows)
        else:
            text = aligned(header, [[fmt_complex(x) if isinstance(x, complex) else
                                     ("%.10g" % x if isinstance(x, float) else x) for x in r]
                                    for r in rows])
        self.stream.write(text)
        if self.dir is not None:
            ext = "csv" if self.fmt != "json" else "json"
            body = csv_text(header, rows) if ext == "csv" else json_text(records)
            atomic_write(self.path("%s.%s" % (stem, ext)), body)

    def summary(self, stem, obj):
        if self.dir is not None:
            atomic_write(self.path(stem + ".json"), json_text(obj))

    def say(self, line):
        self.stream.write(line + "\n")


def _write_with(path, writer):
    with atomic_path(path) as tmp:
        return writer(tmp)


# ---------------------------------------------------------------------------
# commands


def cmd_classify(cfg, args, out):
    rs = args.residues or cfg["residues"]
    if not rs:
        raise ConfigError("classify needs residues (arguments or 'residues = ...')")
    header = ["R", "class", "lambda1", "lambda2", "lambda3", "alpha1", "alpha2", "alpha3",
              "discriminant", "twist"]
    rows, recs = [], []
    for R in rs:
        r = res.spectrum_report(R)
        rows.append([complex(R), r.holonomy.kind] + [float(v) for v in r.lam]
                    + [float(v) for v in r.alpha] + [float(r.discriminant), r.twist])
        recs.append({"R": complex(R), "class": r.holonomy.kind, "lambda": r.lam,
                     "alpha": r.alpha, "discriminant": r.discriminant, "twist": r.twist})
    out.table("classify", header, rows, recs)


def cmd_spectrum(cfg, args, out):
    rs = args.residues or ([cfg["residue"]] if cfg["residue"] is not None else [])
    if not rs:
        raise ConfigError("spectrum needs a residue")
    header = ["R", "class", "xi", "iota", "iota_hat", "mu1", "mu2", "mu3", "rho1", "rho2", "rho3",
              "twist"]
    rows, recs = [], []
    for R in rs:
        r = res.spectrum_report(R, cfg["iota"])
        if R == 0:
            raise PreconditionError("direction data need R != 0")
        iota = cfg["iota"] if cfg["iota"] is not None else r.iota
        rows.append([complex(R), r.holonomy.kind, complex(r.xi), float(iota), float(r.iota_hat)]
                    + [float(v) for v in r.mu] + [float(v) for v in r.rho] + [r.twist])
        recs.append({"R": complex(R), "class": r.holonomy.kind, "lambda": r.lam, "xi": r.xi,
                     "iota": iota, "iota_hat": r.iota_hat, "mu": r.mu, "rho": r.rho,
                     "twist": r.twist})
    out.table("spectrum", header, rows, recs)


def cmd_wang(cfg, args, out):
    Nx, Ny, y0, y1 = cfg["Nx"], cfg["Ny"], cfg["y0"], cfg["y1"]
    if cfg["geometry"] == "flat":
        g = wang.flat_collar_grid(cfg["residue"], Nx, Ny, y0, y1, cfg["perturbation"],
                                  cfg["orientation"])
    else:
        g = wang.cusp_grid(Nx, Ny, y0, y1)
    bar = wang.build_barriers(g, cfg["alpha"], cfg["beta"], cfg["barrier"])
    rep = wang.solve_wang(g, tol=cfg["tol"], barriers=bar)
    _write_with(out.path("wang_grid.csv"), g.with_u(rep.u).to_csv)
    summ = {"geometry": cfg["geometry"], "Nx": Nx, "Ny": Ny, "y0": y0, "y1": y1,
            "residual_inf": rep.residual_inf, "newton_iters": rep.newton_iters,
            "u_inf": float(np.max(np.abs(rep.u))), "bracketed": rep.bracketed,
            "barrier_kind": bar.kind, "barrier_beta": bar.beta, "barrier_doublings": bar.doublings}
    out.summary("wang_summary", summ)
    out.say("residual %.3e after %d Newton steps; |u|_inf = %.3e; bracketed: %s"
            % (rep.residual_inf, rep.newton_iters, summ["u_inf"], rep.bracketed))


def _grid_field(cfg):
    path = cfg["field_file"]
    if not path:
        raise ConfigError("field = grid needs field_file")
    if not os.path.exists(path):
        raise ConfigError("field file not found: %s" % path)
    try:
        g = wang.CylinderGrid.from_csv(path)
    except (ValueError, KeyError) as e:
        raise ConfigError("bad field file %s: %s" % (path, e)) from None
    return dev.SampledGridField(g)


def _field(cfg):
    if cfg["field"] == "triangle":
        return dev.TriangleModelField()
    if cfg["field"] == "model":
        return dev.model_end_field(cfg["residue"], cfg["orientation"])
    return _grid_field(cfg)


def _describe(loc):
    kind, where = loc
    if kind == "vertex":
        return "vertex v%d" % (where + 1)
    if kind == "segment":
        return "segment v%dv%d" % (where[0] + 1, where[1] + 1)
    return "interior"


def cmd_develop(cfg, args, out):
    fld = _field(cfg)
    start_y = cfg["start_y"] if cfg["start_y"] is not None else (0.0 if fld.whole_plane else 1.0)
    start = (cfg["start_x"], start_y)
    kw = dict(step=cfg["step"], start=start, sample_every=cfg["sample_every"], tol=cfg["tol"])
    if fld.whole_plane:
        curve = dev.develop_ray(fld, cfg["angle"], length=cfg["length"], **kw)
        T = np.eye(3)
        theta = cfg["angle"]
    else:
        curve = dev.develop_ray(fld, cfg["angle"], y_max=cfg["y_max"], **kw)
        if isinstance(fld, dev.ModelEndField) and fld.orientation == "conjugate":
            T = dev.base_change(fld, start)
        else:
            H = dev.holonomy_loop(fld, start_y, step=cfg["step"], x0=start[0])
            T = projlin.principal_triangle(H.std_matrix.T).basis
        theta = cfg["angle"] + float(np.angle(res.xi_branch(cfg["residue"])))
    loc = dev.locate_in_triangle(T, curve.limit, tol=max(10 * cfg["tol"], 1e-6))
    label, kind, where = dev.table_row(theta)
    match = loc == (kind, where)
    _write_with(out.path("develop_curve.csv"), curve.to_csv)
    clipped = 0
    if out.svg:
        clipped = _write_with(out.path("develop.svg"), lambda p: curve.to_svg(p, triangle=T))
    out.summary("develop_summary", {"angle": cfg["angle"], "theta": theta,
                                    "limit": curve.limit.coords, "landing": _describe(loc),
                                    "table_row": label, "expected": _describe((kind, where)),
                                    "matches_table": match, "svg_clipped": clipped})
    out.say("limit %s: %s; table row %s -> %s (%s)"
            % (curve.limit, _describe(loc), label, _describe((kind, where)),
               "match" if match else "MISMATCH"))
    if clipped:
        out.say("warning: %d points outside the affine chart were clipped" % clipped)


def cmd_holonomy(cfg, args, out):
    fld = _field(cfg)
    R = cfg["residue"]
    header = ["y", "eig1", "eig2", "eig3", "det", "class"]
    rows, recs = [], []
    for y in cfg["heights"]:
        H = dev.holonomy_loop(fld, y, step=cfg["step"])
        cls = projlin.classify_matrix(H.std_matrix.T)
        ev = sorted(H.eigenvalues, reverse=True)
        rows.append([float(y)] + [float(v) for v in ev] + [H.det, cls.kind])
        recs.append({"y": y, "eigenvalues": ev, "det": H.det, "class": cls.kind})
    if cfg["field"] == "model":
        lim = sorted(np.exp(2 * np.pi * np.array(res.chi_roots(R))), reverse=True)
        rows.append(["limit"] + [float(v) for v in lim] + [1.0, res.classify_residue(R).kind])
        recs.append({"y": "limit", "eigenvalues": lim})
    out.table("holonomy", header, rows, recs)


def cmd_levinson(cfg, args, out):
    y = np.linspace(cfg["T"], cfg["y_max"], cfg["n"])
    if cfg["system"] == "upper":
        mu = cfg["mu"]
        n = len(mu)

        def R(s, yy):
            yy = np.asarray(yy, dtype=float)
            Rm = np.zeros(yy.shape + (n, n))
            Rm[..., 0, n - 1] = np.exp(-yy)
            return Rm
        c = cfg["c"]
        sys_ = lev.PerturbedSystem(mu, R, lambda s: c, cfg["T"])
    else:
        base = dev.model_end_field(cfg["residue"])
        fld = dev.AnalyticEndField(base.metric, {-3: cfg["residue"], -2: cfg["perturbation"]})
        sys_ = lev.ray_system(fld, cfg["residue"], cfg["iota"], cfg["y_base"])
    k = cfg["k"]
    if not 1 <= k <= len(sys_.mu):
        raise ConfigError("k must lie in 1..%d" % len(sys_.mu))
    sol = lev.iterate_solution(sys_, 0.0, k, y, m_max=cfg["m_max"])
    X = sol.X
    header = ["y"] + ["re_x%d" % (i + 1) for i in range(len(X))] + \
        ["im_x%d" % (i + 1) for i in range(len(X))]
    rows = [[yy] + list(X[:, j].real) + list(np.imag(X[:, j])) for j, yy in enumerate(y)]
    atomic_write(out.path("levinson_solution.csv"), csv_text(header, rows))
    bounds = {repr(p): lev.error_bound(sys_, 0.0, k, p) for p in cfg["probes"]}
    summ = {"system": cfg["system"], "mu": sys_.mu, "k": k, "q": sol.q,
            "iterates": sol.iterates_kept, "diffs": sol.diffs,
            "majorization_ratio": sol.majorization_ratio, "tail_error": sol.tail_error,
            "error_bounds": bounds}
    out.summary("levinson_summary", summ)
    out.say("k = %d (q = %d): %d iterates, majorization ratio %.4f, tail error %.3e"
            % (k, sol.q, sol.iterates_kept, sol.majorization_ratio, sol.tail_error))


def _poly(coeffs):
    return lambda t: sum(c * t**j for j, c in enumerate(coeffs))


def family_spec(cfg):
    if not cfg["a"] and cfg["kind"] == deg.QH:
        raise ConfigError("family needs coefficient keys such as 'a-3 = 2, 1' (2 + t)")
    a = {m: _poly(c) for m, c in cfg["a"].items()}
    b = {m: _poly(c) for m, c in cfg["b"].items()}
    if cfg["t_list"]:
        ts = [t.real if t.imag == 0 else t for t in cfg["t_list"]]
    else:
        ts = list(np.geomspace(cfg["t_start"], cfg["t_stop"], cfg["t_count"]))
    bf = (lambda t: {m: f(t) for m, f in b.items()}) if b else None
    return deg.FamilySpec(a=lambda t: {m: f(t) for m, f in a.items()}, t_sweep=ts,
                          kind=cfg["kind"], b=bf, Nx=cfg["Nx"], per_unit=cfg["per_unit"],
                          K=cfg["K"], branch=cfg["branch"], alpha=cfg["alpha"], beta=cfg["beta"],
                          step=cfg["step"], orientation=cfg["orientation"], decay_C=cfg["decay_C"])


def cmd_family(cfg, args, out):
    spec = family_spec(cfg)
    if spec.kind == deg.QH:
        rows = deg.qh_sweep(spec, homotopy_check=cfg["homotopy_check"])
        deg.write_sweep_csv(rows, out.path("family_sweep.csv"))
        devs = [max(r.deviation) for r in rows]
        at = np.array([abs(r.t) for r in rows])
        rate = float(np.polyfit(np.log(at), np.log(devs), 1)[0]) if len(rows) > 1 and min(devs) > 0 \
            else None
        summ = {"kind": spec.kind, "limit_spectrum": deg.limit_spectrum(spec.limit_residue),
                "final_deviation": devs[-1], "deviation_rate": rate,
                "monotone_tail": deg.deviations_monotone(rows),
                "bracketed": all(r.bracketed for r in rows)}
        if cfg["homotopy_check"]:
            summ["homotopy_defect"] = [r.homotopy_defect for r in rows]
        if cfg["witnesses"]:
            rep = deg.twist_witness_sweep(spec, y_base=cfg["y_base"], y_max=cfg["y_max"],
                                          step=max(spec.step, 2e-3), tol=cfg["witness_tol"])
            summ["witnesses"] = [{"t": r.t, "segments": [w.segment for w in r.witnesses],
                                  "defects": [w.defect for w in r.witnesses]} for r in rep.rows]
            summ["adjacent_witness_deviation"] = rep.adjacent_deviation
        out.summary("family_summary", summ)
        out.say("%d rows; final deviation %.3e; monotone tail: %s"
                % (len(rows), devs[-1], "pass" if summ["monotone_tail"] else "FAIL"))
        return
    rows = deg.parabolic_sweep(spec)
    header = ["t", "row_norm", "scaled_row_norm", "exp_eig1", "exp_eig2", "exp_eig3", "kappa_sup",
              "residual"]
    body = [[r.t, r.row_norm, r.row_norm * abs(np.log(abs(r.t)))]
            + [complex(v).real for v in r.exp_eigenvalues] + [r.kappa_sup, r.residual]
            for r in rows]
    atomic_write(out.path("family_sweep.csv"), csv_text(header, body))
    fit = deg.curvature_fit(spec.t_sweep, spec.K)
    scaled = [b[2] for b in body]
    summ = {"kind": spec.kind, "A": [r.A for r in rows], "kappa_gamma": fit.gamma,
            "kappa_delta": fit.delta,
            "rows_decay_like_inverse_log": all(b <= a * (1 + 1e-6) for a, b in zip(scaled, scaled[1:])),
            "final_exp_eigenvalues": rows[-1].exp_eigenvalues}
    out.summary("family_summary", summ)
    out.say("%d rows; kappa fit gamma = %.3g, delta = %.3g; final e^{2 pi A_t} eigenvalues %s"
            % (len(rows), fit.gamma, fit.delta,
               ", ".join("%.4g" % complex(v).real for v in rows[-1].exp_eigenvalues)))


def cmd_triangle(cfg, args, out):
    fld = dev.TriangleModelField()
    angles = cfg["angles"] if cfg["angles"] else list(TRIANGLE_ANGLES)
    header = ["theta", "p1", "p2", "p3", "landing", "table_row", "match"]
    rows, recs = [], []
    for th in angles:
        c = dev.develop_ray(fld, th, length=cfg["length"], step=cfg["step"],
                            start=(cfg["start_x"], cfg["start_y"]), tol=cfg["tol"])
        loc = dev.locate_in_triangle(np.eye(3), c.limit, tol=max(10 * cfg["tol"], 1e-6))
        label, kind, where = dev.table_row(th)
        ok = loc == (kind, where)
        rows.append([float(th)] + list(c.limit.coords) + [_describe(loc), label, str(ok).lower()])
        recs.append({"theta": th, "limit": c.limit.coords, "landing": _describe(loc),
                     "table_row": label, "match": ok})
        if out.svg and out.dir is not None:
            _write_with(out.path("triangle_%d.svg" % len(rows)),
                        lambda p: c.to_svg(p, triangle=np.eye(3)))
    out.table("triangle", header, rows, recs)


HANDLERS = {"classify": cmd_classify, "spectrum": cmd_spectrum, "wang": cmd_wang,
            "develop": cmd_develop, "holonomy": cmd_holonomy, "levinson": cmd_levinson,
            "family": cmd_family, "triangle": cmd_triangle}
FILE_COMMANDS = ("wang", "develop", "levinson", "family")


# ---------------------------------------------------------------------------
# entry point


def _protect_negatives(argv):
    """Leading space keeps argparse from reading '-2i' or '-i' as an option."""
    out = []
    for a in argv:
        if a.startswith("-") and not a.startswith("--") and _COMPLEX.match(a):
            out.append(" " + a)
        else:
            out.append(a)
    return out


def make_parser():
    p = argparse.ArgumentParser(prog="rp2ends", description=__doc__.split("\n\n")[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("residues", nargs="*", help="complex literals such as 2, -2i, 1+i")
    p.add_argument("--config", metavar="PATH")
    p.add_argument("--out", metavar="DIR")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--svg", action="store_true")
    return p


def main(argv=None, stream=None):
    stream = sys.stdout if stream is None else stream
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = make_parser()
    try:
        args = parser.parse_args(_protect_negatives(argv))
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_CONFIG
    try:
        args.residues = [parse_complex(r) for r in args.residues]
        if args.residues and args.command not in ("classify", "spectrum"):
            raise ConfigError("%s takes no positional arguments" % args.command)
        cfg = load_config(args.command, args.config)
        out_dir = args.out if args.out is not None else ("." if args.command in FILE_COMMANDS
                                                         else None)
        out = Output(out_dir, args.format, args.svg, stream)
        np.seterr(all="ignore")
        HANDLERS[args.command](cfg, args, out)
    except (ConfigError, PreconditionError) as e:
        sys.stderr.write("rp2ends %s: error: %s\n" % (args.command, e))
        return EXIT_CONFIG
    except (Rp2EndsError, np.linalg.LinAlgError, FloatingPointError, ValueError) as e:
        sys.stderr.write("rp2ends %s: numerical failure: %s: %s\n"
                         % (args.command, type(e).__name__, e))
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
