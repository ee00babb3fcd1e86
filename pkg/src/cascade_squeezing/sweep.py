"""Parameter sweeps over the drive amplitude, with CSV and SVG emitters.

The CSV schema is fixed: one comment line carrying the full parameter set,
then `epsilon,var_plus,var_minus,squeezing,vacuum_level` with one row per
grid point, 9 significant digits, locale-independent.  Cells that are not
defined under the selected ordering convention (or at an out-of-regime grid
point) are left empty and a note is collected for stderr.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .atom import atomic_steady_state
from .errors import ValidationError
from .moments import steady_moments_closed
from .params import SystemParams, params_from_gamma_c
from .quadrature import (
    VACUUM_LEVEL_ARBITRARY,
    squeezing_normal,
    vacuum_normal,
    variance_arbitrary,
    variance_normal_minus_closed,
    variance_normal_plus_closed,
)

__all__ = ["SweepConfig", "SweepResult", "run_sweep", "format_csv", "render_svg"]

CSV_HEADER = "epsilon,var_plus,var_minus,squeezing,vacuum_level"

ORDERINGS = ("normal", "arbitrary", "both")
FORMATS = ("csv", "svg", "both")


@dataclass(frozen=True)
class SweepConfig:
    kappa: float = 0.8
    gamma_c: float = 16.0 / 15.0
    eps_min: float = 0.0
    eps_max: float = 0.4
    steps: int = 101
    ordering: str = "normal"
    out: str | None = None
    fmt: str = "csv"

    def __post_init__(self) -> None:
        if self.kappa <= 0.0:
            raise ValidationError(f"kappa must be > 0, got {self.kappa!r}")
        if self.gamma_c < 0.0:
            raise ValidationError(f"gamma_c must be >= 0, got {self.gamma_c!r}")
        if self.eps_min < 0.0:
            raise ValidationError(f"eps_min must be >= 0, got {self.eps_min!r}")
        if self.eps_max < self.eps_min:
            raise ValidationError("eps_max must be >= eps_min")
        if self.eps_max > self.kappa / 2.0:
            raise ValidationError("eps_max must be <= kappa/2 (threshold)")
        if self.steps < 2:
            raise ValidationError(f"steps must be >= 2, got {self.steps!r}")
        if self.ordering not in ORDERINGS:
            raise ValidationError(f"ordering must be one of {ORDERINGS}")
        if self.fmt not in FORMATS:
            raise ValidationError(f"format must be one of {FORMATS}")

    def grid(self) -> list[float]:
        span = self.eps_max - self.eps_min
        return [self.eps_min + span * i / (self.steps - 1) for i in range(self.steps)]


@dataclass(frozen=True)
class SweepResult:
    config: SweepConfig
    rows: list[dict]
    notes: list[str]


def _normal_row(params: SystemParams, notes: list[str]) -> dict:
    row = {
        "epsilon": params.epsilon,
        "var_plus": variance_normal_plus_closed(params),
        "var_minus": None,
        "squeezing": None,
        "vacuum_level": vacuum_normal(params),
    }
    if params.dynamics_valid:
        row["var_minus"] = variance_normal_minus_closed(params)
    else:
        notes.append(
            f"epsilon={params.epsilon:.9g}: var_minus undefined at epsilon >= kappa/2"
        )
    if params.gamma_c > 0.0:
        row["squeezing"] = squeezing_normal(params)
    else:
        notes.append(
            f"epsilon={params.epsilon:.9g}: squeezing undefined at gamma_c = 0"
        )
    return row


def _arbitrary_row(params: SystemParams, notes: list[str]) -> dict:
    row = {
        "epsilon": params.epsilon,
        "var_plus": None,
        "var_minus": None,
        "squeezing": None,
        "vacuum_level": VACUUM_LEVEL_ARBITRARY,
    }
    if params.dynamics_valid:
        moments = steady_moments_closed(params, atomic_steady_state(params))
        row["var_plus"], row["var_minus"] = variance_arbitrary(moments)
    else:
        notes.append(
            f"epsilon={params.epsilon:.9g}: steady moments undefined at "
            "epsilon >= kappa/2"
        )
    return row


def run_sweep(config: SweepConfig) -> SweepResult:
    """Evaluate the configured quantity over the drive grid.

    For ordering 'both' call once per convention (see split_orderings).
    """
    if config.ordering == "both":
        raise ValidationError("run_sweep expects a single ordering; split first")
    rows: list[dict] = []
    notes: list[str] = []
    make_row = _normal_row if config.ordering == "normal" else _arbitrary_row
    for eps in config.grid():
        params = params_from_gamma_c(config.kappa, eps, config.gamma_c)
        rows.append(make_row(params, notes))
    return SweepResult(config=config, rows=rows, notes=notes)


def split_orderings(config: SweepConfig) -> list[SweepConfig]:
    if config.ordering != "both":
        return [config]
    return [replace(config, ordering="normal"), replace(config, ordering="arbitrary")]


def _cell(value: float | None) -> str:
    return "" if value is None else format(value, ".9g")


def format_csv(result: SweepResult) -> str:
    """Deterministic text: identical config gives a byte-identical file."""
    c = result.config
    lines = [
        f"# kappa={c.kappa:.9g} gamma_c={c.gamma_c:.9g} eps_min={c.eps_min:.9g}"
        f" eps_max={c.eps_max:.9g} steps={c.steps} ordering={c.ordering}",
        CSV_HEADER,
    ]
    for row in result.rows:
        lines.append(",".join(
            _cell(row[key])
            for key in ("epsilon", "var_plus", "var_minus", "squeezing", "vacuum_level")
        ))
    return "\n".join(lines) + "\n"


def render_svg(result: SweepResult, y_key: str, y_label: str) -> str:
    """Single-polyline plot with plain axes; no styling dependencies."""
    width, height = 640, 480
    margin = 60
    points = [(row["epsilon"], row[y_key]) for row in result.rows
              if row[y_key] is not None]
    if not points:
        raise ValidationError(f"no defined values for column {y_key!r}")
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0

    def sx(x: float) -> float:
        return margin + (x - x_lo) / (x_hi - x_lo) * (width - 2 * margin)

    def sy(y: float) -> float:
        return height - margin - (y - y_lo) / (y_hi - y_lo) * (height - 2 * margin)

    polyline = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in points)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" '
        f'stroke="black"/>',
    ]
    for i in range(5):
        xv = x_lo + (x_hi - x_lo) * i / 4
        yv = y_lo + (y_hi - y_lo) * i / 4
        parts.append(
            f'<line x1="{sx(xv):.2f}" y1="{height - margin}" x2="{sx(xv):.2f}" '
            f'y2="{height - margin + 5}" stroke="black"/>'
            f'<text x="{sx(xv):.2f}" y="{height - margin + 20}" font-size="12" '
            f'text-anchor="middle">{xv:.3g}</text>'
        )
        parts.append(
            f'<line x1="{margin - 5}" y1="{sy(yv):.2f}" x2="{margin}" '
            f'y2="{sy(yv):.2f}" stroke="black"/>'
            f'<text x="{margin - 8}" y="{sy(yv) + 4:.2f}" font-size="12" '
            f'text-anchor="end">{yv:.3g}</text>'
        )
    parts.append(
        f'<text x="{width / 2:.0f}" y="{height - 15}" font-size="14" '
        f'text-anchor="middle">epsilon</text>'
    )
    parts.append(
        f'<text x="18" y="{height / 2:.0f}" font-size="14" text-anchor="middle" '
        f'transform="rotate(-90 18 {height / 2:.0f})">{y_label}</text>'
    )
    parts.append(f'<polyline points="{polyline}" fill="none" stroke="blue"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
