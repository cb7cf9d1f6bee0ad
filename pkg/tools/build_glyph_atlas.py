"""Regenerate src/unspell/synthrender/_atlas.py from a TrueType serif face.

Needs Pillow; the package itself only reads the generated module.

    python tools/build_glyph_atlas.py /usr/share/fonts/truetype/dejavu/DejaVuSerif.ttf
"""

import string
import sys
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw, ImageFont

CELL_W, CELL_H = 24, 40
# baseline row inside the cell; leaves room for descenders
BASELINE = 30


def rasterise(font_path: str, size: int = 34) -> dict[str, np.ndarray]:
    font = ImageFont.truetype(font_path, size)
    glyphs = {}
    for ch in string.ascii_lowercase:
        canvas = Image.new("L", (3 * CELL_W, 2 * CELL_H), 0)
        draw = ImageDraw.Draw(canvas)
        draw.text((CELL_W, CELL_H // 2 + BASELINE), ch, fill=255, font=font, anchor="ls")
        a = np.asarray(canvas) > 127
        cols = np.where(a.any(axis=0))[0]
        ink = a[CELL_H // 2: CELL_H // 2 + CELL_H, cols[0]:cols[-1] + 1]
        if ink.shape[1] > CELL_W:
            # condense over-wide letters (m, w) into the fixed cell
            idx = np.linspace(0, ink.shape[1] - 1, CELL_W).round().astype(int)
            ink = ink[:, idx]
        cell = np.zeros((CELL_H, CELL_W), bool)
        off = (CELL_W - ink.shape[1]) // 2
        cell[:, off:off + ink.shape[1]] = ink
        glyphs[ch] = cell
    return glyphs


def to_hex(cell: np.ndarray) -> list[str]:
    rows = []
    for r in cell:
        bits = "".join("1" if b else "0" for b in r)
        rows.append(f"{int(bits, 2):0{CELL_W // 4}x}")
    return rows


def main(font_path: str) -> None:
    glyphs = rasterise(font_path)
    lines = [
        '"""1-bit glyph atlas for a serif face in fixed-width cells (generated by tools/build_glyph_atlas.py)."""',
        "",
        f"CELL_W = {CELL_W}",
        f"CELL_H = {CELL_H}",
        f"BASELINE = {BASELINE}",
        "",
        "GLYPHS = {",
    ]
    for ch, cell in glyphs.items():
        lines.append(f'    "{ch}": "{"".join(to_hex(cell))}",')
    lines.append("}")
    out = Path(__file__).resolve().parents[1] / "src" / "unspell" / "synthrender" / "_atlas.py"
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {out}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "/usr/share/fonts/truetype/dejavu/DejaVuSerif.ttf")
