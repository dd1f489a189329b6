"""SVG heatmap rendering for normalized confusion matrices.

Hand-built SVG keeps the output deterministic and dependency-free:
cells are grayscale rects (0 -> white, 1 -> black, linear), undefined
rows get a flat hatch color so they cannot be mistaken for zeros.
"""

from __future__ import annotations

from pathlib import Path
from xml.etree import ElementTree as ET

from scenerec.evaluation import NormalizedConfusion

CELL = 22
LABEL_SPACE = 110
UNDEFINED_FILL = "#f3e3e3"


def value_fill(value: float) -> str:
    """Linear value -> grayscale mapping used for every defined cell."""
    level = int(round(255 * (1.0 - min(max(value, 0.0), 1.0))))
    return f"rgb({level},{level},{level})"


def render_heatmap_svg(normalized: NormalizedConfusion, title: str = "confusion") -> str:
    names = normalized.class_names
    n = len(names)
    width = LABEL_SPACE + n * CELL + 20
    height = LABEL_SPACE + n * CELL + 40
    svg = ET.Element(
        "svg",
        xmlns="http://www.w3.org/2000/svg",
        width=str(width),
        height=str(height),
        viewBox=f"0 0 {width} {height}",
    )
    ET.SubElement(svg, "rect", x="0", y="0", width=str(width), height=str(height), fill="white")
    ET.SubElement(
        svg, "text", x=str(LABEL_SPACE), y="16",
        attrib={"font-size": "13", "font-family": "sans-serif"},
    ).text = f"{title} (rows: ground truth, columns: predicted)"

    x0, y0 = LABEL_SPACE, LABEL_SPACE
    for j, name in enumerate(names):
        cx = x0 + j * CELL + CELL // 2
        label = ET.SubElement(
            svg, "text", x=str(cx), y=str(y0 - 6),
            attrib={
                "font-size": "10",
                "font-family": "sans-serif",
                "text-anchor": "start",
                "transform": f"rotate(-60 {cx} {y0 - 6})",
            },
        )
        label.text = name
    for i, name in enumerate(names):
        label = ET.SubElement(
            svg, "text", x=str(x0 - 6), y=str(y0 + i * CELL + CELL - 7),
            attrib={"font-size": "10", "font-family": "sans-serif", "text-anchor": "end"},
        )
        label.text = name

    for i in range(n):
        for j in range(n):
            if normalized.defined[i]:
                value = float(normalized.values[i, j])
                fill = value_fill(value)
                tooltip = f"{names[i]} -> {names[j]}: {value:.4f}"
            else:
                fill = UNDEFINED_FILL
                tooltip = f"{names[i]} -> {names[j]}: undefined (no ground-truth pixels)"
            rect = ET.SubElement(
                svg, "rect",
                x=str(x0 + j * CELL), y=str(y0 + i * CELL),
                width=str(CELL), height=str(CELL),
                fill=fill, stroke="#cccccc",
                attrib={"stroke-width": "0.5"},
            )
            ET.SubElement(rect, "title").text = tooltip

    legend_y = y0 + n * CELL + 24
    note = ET.SubElement(
        svg, "text", x=str(x0), y=str(legend_y),
        attrib={"font-size": "10", "font-family": "sans-serif"},
    )
    note.text = f"shade: white=0, black=1 (linear); {UNDEFINED_FILL} = undefined row"
    return ET.tostring(svg, encoding="unicode")


def export_heatmap(normalized: NormalizedConfusion, svg_path, csv_path=None,
                   title: str = "confusion") -> None:
    """Write the SVG figure and, optionally, the matching value CSV."""
    Path(svg_path).write_text(render_heatmap_svg(normalized, title), encoding="utf-8")
    if csv_path is not None:
        from scenerec.evaluation import write_normalized_csv

        write_normalized_csv(normalized, csv_path)
