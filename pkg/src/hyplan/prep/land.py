"""
Site eligibility of grid cells for wind and solar deployment.
"""
from dataclasses import dataclass

LAND_CLASSES = frozenset(
    {"water", "urban", "protected", "forest", "grassland", "cropland", "shrubland", "barren", "wetland", "snow"}
)
EXCLUDED_CLASSES = frozenset({"water", "urban", "protected"})
# degrees
MAX_SLOPE = {"wind": 20.0, "solar": 5.0}


@dataclass(frozen=True)
class SiteMask:
    cell_id: str
    slope: float
    land_class: str
    eligible: bool


def site_mask(
    slope: float,
    land_class: str,
    technology: str = "wind",
    max_slope: float | None = None,
    excluded: frozenset[str] = EXCLUDED_CLASSES,
) -> bool:
    """True when a cell of this slope and land class may host ``technology`` ("wind" or "solar")."""
    land_class = land_class.strip().lower()
    if land_class not in LAND_CLASSES:
        raise ValueError(f"unknown land class {land_class!r} (expected one of {sorted(LAND_CLASSES)})")
    if max_slope is None:
        if technology not in MAX_SLOPE:
            raise ValueError(f"unknown technology {technology!r} for a site mask")
        max_slope = MAX_SLOPE[technology]
    return slope <= max_slope and land_class not in excluded


def mask_cells(cells, technology: str, max_slope: float | None = None) -> list[SiteMask]:
    """SiteMask per row of a cell table with columns cell_id, slope, land_class."""
    return [
        SiteMask(str(row.cell_id), float(row.slope), str(row.land_class), site_mask(float(row.slope), str(row.land_class), technology, max_slope))
        for row in cells.itertuples(index=False)
    ]
