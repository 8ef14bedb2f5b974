"""CSV and SVG rendering of aggregated results."""

import csv
import io
import math
import warnings
from dataclasses import dataclass
from xml.sax.saxutils import escape

CSV_HEADER = ("t", "scheme", "mean_subopt", "std_subopt", "n_reps", "bound")


def _fmt(x):
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return f"{float(x):.17g}"


def emit_csv(agg, bounds=None):
    """Render an :class:`~sgdavg.analysis.Aggregate` as CSV text.

    ``bounds`` maps scheme label -> {t: bound value}; missing entries leave
    the ``bound`` field empty. Rows are sorted by (scheme, t).
    """
    bounds = bounds or {}
    lines = [",".join(CSV_HEADER)]
    pts = [int(t) for t in agg.record_points]
    for scheme in sorted(agg.mean):
        b = bounds.get(scheme, {})
        for i, t in enumerate(pts):
            mean = float(agg.mean[scheme][i])
            std = float(agg.std[scheme][i])
            lines.append(
                ",".join([str(t), scheme, _fmt(mean), _fmt(std), str(agg.count), _fmt(b.get(t))])
            )
    return "\n".join(lines) + "\n"


def parse_csv(text):
    """Inverse of :func:`emit_csv`: list of row dicts with numeric fields restored."""
    reader = csv.reader(io.StringIO(text))
    header = tuple(next(reader))
    if header != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header!r}")
    rows = []
    for rec in reader:
        if not rec:
            continue
        t, scheme, mean, std, n, bound = rec
        rows.append(
            {
                "t": int(t),
                "scheme": scheme,
                "mean_subopt": float(mean) if mean else math.nan,
                "std_subopt": float(std) if std else None,
                "n_reps": int(n),
                "bound": float(bound) if bound else None,
            }
        )
    return rows


# -- SVG ----------------------------------------------------------------------

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")


@dataclass(frozen=True)
class LogAxes:
    """Maps (t, value) to SVG coordinates on log10 axes inside a frame."""

    log_tmin: float
    log_tmax: float
    log_vmin: float
    log_vmax: float
    left: float = 70.0
    top: float = 20.0
    width: float = 560.0
    height: float = 380.0

    def x(self, t):
        frac = (math.log10(t) - self.log_tmin) / (self.log_tmax - self.log_tmin)
        return self.left + frac * self.width

    def y(self, v):
        frac = (math.log10(v) - self.log_vmin) / (self.log_vmax - self.log_vmin)
        return self.top + (1.0 - frac) * self.height


def _axes_for(t_values, v_values):
    lt = [math.log10(t) for t in t_values]
    lv = [math.log10(v) for v in v_values]
    tmin, tmax = math.floor(min(lt)), math.ceil(max(lt))
    vmin, vmax = math.floor(min(lv)), math.ceil(max(lv))
    if tmax == tmin:
        tmax += 1
    if vmax == vmin:
        vmax += 1
    return LogAxes(tmin, tmax, vmin, vmax)


def _positive_points(scheme, ts, vs):
    pts = []
    for t, v in zip(ts, vs):
        if v > 0 and math.isfinite(v):
            pts.append((t, v))
        else:
            warnings.warn(f"{scheme}: omitting nonpositive value {v!r} at t={t} from the log-log plot", stacklevel=3)
    return pts


def emit_plot(agg, bounds=None, title="training suboptimality"):
    """Self-contained SVG 1.1 log-log plot, one polyline per scheme.

    ``bounds`` (scheme -> {t: value}) adds dashed curves. Nonpositive means
    cannot be placed on a log axis and are omitted with a warning.
    """
    bounds = bounds or {}
    ts = [int(t) for t in agg.record_points]
    curves = {s: _positive_points(s, ts, [float(v) for v in agg.mean[s]]) for s in sorted(agg.mean)}
    bound_curves = {
        s: sorted((t, v) for t, v in b.items() if v > 0) for s, b in bounds.items() if b
    }
    all_pts = [p for c in curves.values() for p in c] + [p for c in bound_curves.values() for p in c]
    if not all_pts:
        all_pts = [(1, 1.0), (10, 10.0)]
    ax = _axes_for([p[0] for p in all_pts], [p[1] for p in all_pts])

    W, H = ax.left + ax.width + 170, ax.top + ax.height + 60
    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W:g}" height="{H:g}" '
        f'viewBox="0 0 {W:g} {H:g}">',
        f"<title>{escape(title)}</title>",
        f'<rect class="frame" x="{ax.left:g}" y="{ax.top:g}" width="{ax.width:g}" height="{ax.height:g}" '
        'fill="none" stroke="black"/>',
    ]
    for k in range(int(ax.log_tmin), int(ax.log_tmax) + 1):
        x = ax.x(10.0**k)
        out.append(
            f'<line class="xtick" data-decade="{k}" x1="{x:.3f}" y1="{ax.top + ax.height:g}" '
            f'x2="{x:.3f}" y2="{ax.top + ax.height + 5:g}" stroke="black"/>'
        )
        out.append(
            f'<text x="{x:.3f}" y="{ax.top + ax.height + 20:g}" font-size="12" '
            f'text-anchor="middle">1e{k}</text>'
        )
    for k in range(int(ax.log_vmin), int(ax.log_vmax) + 1):
        y = ax.y(10.0**k)
        out.append(
            f'<line class="ytick" data-decade="{k}" x1="{ax.left - 5:g}" y1="{y:.3f}" '
            f'x2="{ax.left:g}" y2="{y:.3f}" stroke="black"/>'
        )
        out.append(
            f'<text x="{ax.left - 8:g}" y="{y + 4:.3f}" font-size="12" text-anchor="end">1e{k}</text>'
        )
    out.append(
        f'<text x="{ax.left + ax.width / 2:g}" y="{H - 10:g}" font-size="13" '
        'text-anchor="middle">iterations t</text>'
    )

    legend_y = ax.top + 10
    legend_x = ax.left + ax.width + 15
    for i, (scheme, pts) in enumerate(curves.items()):
        color = _COLORS[i % len(_COLORS)]
        coords = " ".join(f"{ax.x(t):.3f},{ax.y(v):.3f}" for t, v in pts)
        out.append(
            f'<polyline class="scheme" data-scheme="{escape(scheme)}" points="{coords}" '
            f'fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        if scheme in bound_curves:
            bc = " ".join(f"{ax.x(t):.3f},{ax.y(v):.3f}" for t, v in bound_curves[scheme])
            out.append(
                f'<polyline class="bound" data-scheme="{escape(scheme)}" points="{bc}" fill="none" '
                f'stroke="{color}" stroke-dasharray="6,4" stroke-width="1"/>'
            )
        y = legend_y + 18 * i
        out.append(
            f'<line x1="{legend_x:g}" y1="{y:g}" x2="{legend_x + 20:g}" y2="{y:g}" stroke="{color}" '
            'stroke-width="2"/>'
        )
        out.append(
            f'<text class="legend-entry" x="{legend_x + 26:g}" y="{y + 4:g}" font-size="12">'
            f"{escape(scheme)}</text>"
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def bounds_table(reports):
    """scheme -> {t: bound} from a list of compliance reports."""
    table = {}
    for rep in reports:
        table.setdefault(rep.scheme, {}).update({r.t: r.bound for r in rep.rows})
    return table

