"""Artifact emission: CSV, aligned text and static SVG plots.

Every run produces a :class:`RunArtifact` carrying provenance (config hash,
tool version, seed).  CSV output is deterministic: floats are written with
``repr``, lines end with LF, and the same config and seed reproduce the
file byte for byte.
"""

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import lagrangian_energy

__all__ = [
    "RunArtifact", "provenance_for", "write_meta", "write_csv",
    "write_path_csv",
    "write_table_csv", "write_net_report_csv", "certificate_text",
    "net_report_text", "growth_text", "limit_text", "write_text",
    "svg_loglog", "svg_path",
]

TOOL_VERSION = "0.1.0"


@dataclass
class RunArtifact:
    kind: str  # "path" | "certificate" | "table" | "report"
    outputs: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    summary: str = ""


def provenance_for(config_text, seed):
    digest = hashlib.sha256(config_text.encode("utf-8")).hexdigest()
    return {"config_sha256": digest, "tool_version": TOOL_VERSION,
            "seed": int(seed)}


def write_meta(path, artifact):
    payload = {"kind": artifact.kind, "outputs": artifact.outputs,
               "provenance": artifact.provenance}
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _fmt(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_path_csv(path, geo_path, us, model, profile=None, net=None,
                   eps=None):
    """Path CSV with the fixed column schema
    ``u, x1..xn, xdot1..xdotn, v, vdot, energy``."""
    n = geo_path.n
    header = (["u"] + [f"x{i+1}" for i in range(n)]
              + [f"xdot{i+1}" for i in range(n)] + ["v", "vdot", "energy"])
    rows = []
    for u in us:
        st = geo_path.state_at(float(u))
        energy = lagrangian_energy(st, model, profile, net, eps)
        rows.append([st.u, *st.x, *st.xdot, st.v, st.vdot, energy])
    write_csv(path, header, rows)


def write_table_csv(path, table):
    write_csv(path, ["eps", "err_x", "err_xdot", "err_v", "order"],
               table.csv_rows())


def write_net_report_csv(path, report):
    rows = [(c.eps, c.support_declared, c.support_measured, c.integral,
             c.l1, int(c.support_ok), int(c.indeterminate))
            for c in report.checks]
    write_csv(path, ["eps", "support_declared", "support_measured",
                      "integral", "l1", "support_ok", "indeterminate"], rows)


def _aligned(pairs):
    width = max(len(k) for k, _ in pairs) + 2
    return "\n".join(f"{k:<{width}}{v}" for k, v in pairs) + "\n"


def _vec(x):
    return "[" + ", ".join(repr(float(v)) for v in np.atleast_1d(x)) + "]"


def certificate_text(cert):
    pairs = [
        ("chart", cert.chart),
        ("anchor_x", _vec(cert.x0)),
        ("anchor_xdot", _vec(cert.xdot0)),
        ("b", _fmt(cert.b)),
        ("c", _fmt(cert.c)),
        ("K", _fmt(cert.k)),
        ("norm_F1", _fmt(cert.norm_F1)),
        ("norm_F2", _fmt(cert.norm_F2)),
        ("lip_F1", _fmt(cert.lip_F1)),
        ("lip_F2", _fmt(cert.lip_F2)),
        ("i2_radius", _fmt(cert.i2_radius)),
        ("alpha", _fmt(cert.alpha)),
        ("eps0", _fmt(cert.eps0)),
        ("grid", str(cert.grid)),
        ("safety", _fmt(cert.safety)),
    ]
    return _aligned(pairs)


def net_report_text(report):
    pairs = [
        ("passed", str(report.passed)),
        ("supports_ok", str(report.supports_ok)),
        ("integral_ok", str(report.integral_ok)),
        ("l1_ok", str(report.l1_ok)),
        ("indeterminate", str(report.indeterminate)),
        ("K_declared", _fmt(report.k_declared)),
        ("K_measured", _fmt(report.k_measured)),
        ("tol", _fmt(report.tol)),
    ]
    lines = [_aligned(pairs)]
    lines.append("eps  support  integral  l1\n")
    for c in report.checks:
        lines.append(f"{c.eps!r}  {c.support_measured!r}  "
                     f"{c.integral!r}  {c.l1!r}\n")
    return "".join(lines)


def growth_text(report):
    pairs = [
        ("classification", report.classification),
        ("exponent", _fmt(report.exponent)),
        ("stderr", _fmt(report.stderr)),
        ("R1", _fmt(report.r1)),
        ("R2", _fmt(report.r2)),
        ("margin", _fmt(report.margin)),
        ("samples", str(len(report.samples))),
        ("dropped_directions", str(list(report.dropped_directions))),
    ]
    return _aligned(pairs)


def limit_text(lg):
    pairs = [
        ("x_break", _vec(lg.x_break)),
        ("xdot_minus", _vec(lg.xdot_minus)),
        ("xdot_plus", _vec(lg.xdot_plus)),
        ("grad_f_at_break", _vec(lg.grad_at_break)),
        ("jump_coeff", _fmt(lg.jump_coeff)),
        ("kink_coeff", _fmt(lg.kink_coeff)),
        ("v_limit(1)", _fmt(lg.v_at(1.0))),
    ]
    return _aligned(pairs)


def write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# minimal hand-rolled SVG: deterministic output, no plotting dependency

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")
_W, _H = 640, 480
_ML, _MR, _MT, _MB = 70, 20, 30, 50


def _svg_header(title):
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">\n'
        f'<rect width="{_W}" height="{_H}" fill="white"/>\n'
        f'<text x="{_W/2:.1f}" y="20" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{title}</text>\n')


def _axis_map(lo, hi, pix_lo, pix_hi):
    if hi - lo < 1e-300:
        hi = lo + 1.0

    def mapper(v):
        return pix_lo + (v - lo) / (hi - lo) * (pix_hi - pix_lo)

    return mapper


def svg_loglog(path, eps, series, title="convergence"):
    """Log-log error plot: one polyline per labelled series."""
    eps = np.asarray(eps, dtype=float)
    pts = {}
    all_x, all_y = [], []
    for label, values in series.items():
        values = np.asarray(values, dtype=float)
        keep = (values > 0) & np.isfinite(values) & (eps > 0)
        if not np.any(keep):
            continue
        lx = np.log10(eps[keep])
        ly = np.log10(values[keep])
        pts[label] = (lx, ly)
        all_x.extend(lx)
        all_y.extend(ly)
    parts = [_svg_header(title)]
    if pts:
        x_map = _axis_map(min(all_x), max(all_x), _ML, _W - _MR)
        y_map = _axis_map(min(all_y), max(all_y), _H - _MB, _MT)
        # decade grid lines
        for d in range(math.floor(min(all_x)), math.ceil(max(all_x)) + 1):
            px = x_map(d)
            parts.append(f'<line x1="{px:.2f}" y1="{_MT}" x2="{px:.2f}" '
                         f'y2="{_H - _MB}" stroke="#dddddd"/>\n')
            parts.append(f'<text x="{px:.2f}" y="{_H - _MB + 18}" '
                         f'text-anchor="middle" font-family="sans-serif" '
                         f'font-size="11">1e{d}</text>\n')
        for d in range(math.floor(min(all_y)), math.ceil(max(all_y)) + 1):
            py = y_map(d)
            parts.append(f'<line x1="{_ML}" y1="{py:.2f}" x2="{_W - _MR}" '
                         f'y2="{py:.2f}" stroke="#dddddd"/>\n')
            parts.append(f'<text x="{_ML - 6}" y="{py + 4:.2f}" '
                         f'text-anchor="end" font-family="sans-serif" '
                         f'font-size="11">1e{d}</text>\n')
        for i, (label, (lx, ly)) in enumerate(pts.items()):
            color = _COLORS[i % len(_COLORS)]
            coords = " ".join(f"{x_map(x):.2f},{y_map(y):.2f}"
                              for x, y in zip(lx, ly))
            parts.append(f'<polyline points="{coords}" fill="none" '
                         f'stroke="{color}" stroke-width="1.5"/>\n')
            for x, y in zip(lx, ly):
                parts.append(f'<circle cx="{x_map(x):.2f}" '
                             f'cy="{y_map(y):.2f}" r="3" fill="{color}"/>\n')
            parts.append(f'<text x="{_W - _MR - 8}" y="{_MT + 16 * (i + 1)}" '
                         f'text-anchor="end" font-family="sans-serif" '
                         f'font-size="12" fill="{color}">{label}</text>\n')
    parts.append(f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" '
                 f'height="{_H - _MT - _MB}" fill="none" stroke="black"/>\n')
    parts.append(f'<text x="{(_ML + _W - _MR) / 2:.1f}" y="{_H - 12}" '
                 f'text-anchor="middle" font-family="sans-serif" '
                 f'font-size="12">eps</text>\n')
    parts.append("</svg>\n")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("".join(parts))


def svg_path(path_file, us, components, labels, title="trajectory"):
    """Linear plot of labelled path components against the parameter."""
    us = np.asarray(us, dtype=float)
    parts = [_svg_header(title)]
    lo = min(float(np.min(c)) for c in components)
    hi = max(float(np.max(c)) for c in components)
    x_map = _axis_map(float(us.min()), float(us.max()), _ML, _W - _MR)
    y_map = _axis_map(lo, hi, _H - _MB, _MT)
    for i, (comp, label) in enumerate(zip(components, labels)):
        color = _COLORS[i % len(_COLORS)]
        coords = " ".join(f"{x_map(u):.2f},{y_map(v):.2f}"
                          for u, v in zip(us, comp))
        parts.append(f'<polyline points="{coords}" fill="none" '
                     f'stroke="{color}" stroke-width="1.5"/>\n')
        parts.append(f'<text x="{_W - _MR - 8}" y="{_MT + 16 * (i + 1)}" '
                     f'text-anchor="end" font-family="sans-serif" '
                     f'font-size="12" fill="{color}">{label}</text>\n')
    parts.append(f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" '
                 f'height="{_H - _MT - _MB}" fill="none" stroke="black"/>\n')
    parts.append(f'<text x="{(_ML + _W - _MR) / 2:.1f}" y="{_H - 12}" '
                 f'text-anchor="middle" font-family="sans-serif" '
                 f'font-size="12">u</text>\n')
    parts.append("</svg>\n")
    with open(path_file, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("".join(parts))
