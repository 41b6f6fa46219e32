"""Rendering of piecewise-monomial functions.

Everything is drawn in valuation coordinates, where the functions are
piecewise linear with rational breaks; the radial picture is recovered
through r = q^v.  SVG output must be byte-for-byte reproducible: the
figure is built without pyplot, the hash salt is pinned, and no
timestamp metadata is embedded.
"""
from __future__ import annotations

from fractions import Fraction

from .pmfun import PMFunction, format_rational

_SVG_SALT = "ramcalc"


def _span(f: PMFunction) -> Fraction:
    # draw a little past the last break so the final slope is visible
    if f.breaks:
        return f.breaks[-1] * Fraction(4, 3)
    return Fraction(1)


def _knots(f: PMFunction, vmax: Fraction):
    vs = [Fraction(0), *f.breaks, vmax]
    return vs, [f(v).finite for v in vs]


def render_ascii(f: PMFunction, width: int = 61, height: int = 17) -> str:
    if width < 20 or height < 5:
        raise ValueError("rendering grid too small")
    vmax = _span(f)
    ymin = f.intercept
    ymax = f(vmax).finite
    cols = width - 1
    rows = height - 1

    def col_of(v: Fraction) -> int:
        return int(round(v / vmax * cols))

    def row_of(y: Fraction) -> int:
        # row 0 is the top line
        return rows - int(round((y - ymin) / (ymax - ymin) * rows))

    grid = [[" "] * width for _ in range(height)]
    knot_cols = {col_of(v) for v in (Fraction(0), *f.breaks, vmax)}
    prev_row = None
    for c in range(width):
        y = f(vmax * c / cols).finite
        r = row_of(y)
        if prev_row is not None:
            lo, hi = sorted((prev_row, r))
            for rr in range(lo + 1, hi):
                grid[rr][c] = "|"
        grid[r][c] = "*" if c in knot_cols else "."
        prev_row = r

    top = format_rational(ymax)
    bottom = format_rational(ymin)
    label_w = max(len(top), len(bottom))
    lines = [f"f on v in [0, {format_rational(vmax)}]    (r = q^v)"]
    for r in range(height):
        label = top if r == 0 else bottom if r == rows else ""
        lines.append(f"{label.rjust(label_w)} |" + "".join(grid[r]).rstrip())
    lines.append(" " * label_w + " +" + "-" * width)
    if f.breaks:
        ticks = [" "] * width
        for b in f.breaks:
            ticks[col_of(b)] = "^"
        lines.append(" " * (label_w + 2) + "".join(ticks).rstrip())
        legend = ", ".join(
            f"v = {format_rational(b)} -> {format_rational(f(b).finite)}"
            for b in f.breaks
        )
        lines.append(f"breaks: {legend}")
    return "\n".join(lines) + "\n"


def render_svg(f: PMFunction, out_path: str, title: str = "") -> None:
    import matplotlib
    from matplotlib.backends.backend_svg import FigureCanvasSVG
    from matplotlib.figure import Figure

    vmax = _span(f)
    vs, ys = _knots(f, vmax)
    with matplotlib.rc_context({"svg.hashsalt": _SVG_SALT}):
        fig = Figure(figsize=(6.4, 4.2))
        FigureCanvasSVG(fig)
        ax = fig.add_subplot()
        ax.plot([float(v) for v in vs], [float(y) for y in ys],
                color="#1f6f8b", linewidth=2, zorder=3)
        for b in f.breaks:
            fb = f(b).finite
            ax.plot([float(b)], [float(fb)], "o", color="#1f6f8b",
                    markersize=5, zorder=4)
            ax.axvline(float(b), color="#b0b0b0", linewidth=0.8,
                       linestyle=":", zorder=1)
            ax.annotate(
                f"v = {format_rational(b)}",
                xy=(float(b), float(fb)),
                xytext=(4, -10), textcoords="offset points", fontsize=9,
            )
        ax.set_xlim(0, float(vmax))
        ax.set_ylim(bottom=float(f.intercept))
        ax.set_xlabel("v    (r = q^v)")
        ax.set_ylabel("f(v)")
        if title:
            ax.set_title(title)
        ax.grid(True, color="#e4e4e4", linewidth=0.6, zorder=0)
        fig.savefig(out_path, format="svg", metadata={"Date": None})
