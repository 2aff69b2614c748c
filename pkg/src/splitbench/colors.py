"""Fixed color resources: categorical cluster palette and the diverging scale."""

from __future__ import annotations

# 12-slot categorical palette (ColorBrewer Paired). Cluster color indices are
# slots into this list; allocation/reuse is the partition tree's concern.
PALETTE = (
    "#a6cee3", "#1f78b4", "#b2df8a", "#33a02c",
    "#fb9a99", "#e31a1c", "#fdbf6f", "#ff7f00",
    "#cab2d6", "#6a3d9a", "#ffff99", "#b15928",
)

PALETTE_SIZE = len(PALETTE)

BLUE = (0, 0, 255)
YELLOW = (255, 255, 0)
RED = (255, 0, 0)


def palette_hex(index: int) -> str:
    """Hex color for a palette slot; indices beyond the palette wrap around."""
    return PALETTE[index % PALETTE_SIZE]


def _lerp(a: tuple[int, int, int], b: tuple[int, int, int], t: float) -> tuple[int, int, int]:
    # half-up rounding so the documented midpoint (255, 128, 0) is exact
    return tuple(int(a[i] + (b[i] - a[i]) * t + 0.5) for i in range(3))


class DivergingScale:
    """Blue (-cmax) -> yellow (0) -> red (+cmax), piecewise-linear per half.

    Inputs outside [-cmax, cmax] are clamped.
    """

    def __init__(self, cmax: float = 3.0):
        if cmax <= 0:
            raise ValueError("cmax must be positive")
        self.cmax = float(cmax)

    def rgb(self, value: float) -> tuple[int, int, int]:
        v = min(max(float(value), -self.cmax), self.cmax)
        if v < 0:
            return _lerp(YELLOW, BLUE, -v / self.cmax)
        return _lerp(YELLOW, RED, v / self.cmax)

    def hex(self, value: float) -> str:
        r, g, b = self.rgb(value)
        return f"#{r:02x}{g:02x}{b:02x}"
