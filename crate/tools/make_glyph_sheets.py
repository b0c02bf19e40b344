#!/usr/bin/env python3
"""Draws the bundled glyph sheets used by the synthetic corpus generator.

Each sheet is a binary PBM holding a grid of CELL x CELL glyph cells, six
per row. Glyphs keep their vertical placement inside the cell so words can
be composed by concatenating cells on a shared baseline. The sheets are
committed; rerun this only to change the glyph designs.

    python3 tools/make_glyph_sheets.py crates/core/assets/glyphs
"""
import math
import os
import sys

from PIL import Image, ImageDraw

CELL = 96
COLS = 6
W = 9  # stroke width


def canvas():
    img = Image.new("1", (CELL, CELL), 0)
    return img, ImageDraw.Draw(img)


def line(d, pts, w=W):
    d.line(pts, fill=1, width=w, joint="curve")
    for x, y in pts:
        d.ellipse([x - w / 2 + 0.5, y - w / 2 + 0.5, x + w / 2 - 0.5, y + w / 2 - 0.5], fill=1)


def arc(d, box, start, end, w=W):
    d.arc(box, start, end, fill=1, width=w)


def ring(d, box, w=W):
    d.ellipse(box, outline=1, width=w)


def dot(d, x, y, r):
    d.ellipse([x - r, y - r, x + r, y + r], fill=1)


# ---------------------------------------------------------------- Devanagari-like
# headline across the full glyph width at rows 14..22, body down to row 86.
HEAD_TOP, HEAD_BOT, BASE = 14, 22, 86


def deva(body, left=12, right=84, bar=True):
    img, d = canvas()
    d.rectangle([left, HEAD_TOP, right, HEAD_BOT], fill=1)
    if bar:
        d.rectangle([right - 9, HEAD_TOP, right, BASE], fill=1)
    body(d)
    return img


DEVA = [
    # ka-like: central stem with loops either side
    lambda: deva(lambda d: (d.rectangle([40, 18, 48, BASE], fill=1), ring(d, [14, 40, 46, 70]), arc(d, [26, 36, 66, 72], 270, 90)), bar=False),
    # ga-like: two stems
    lambda: deva(lambda d: (d.rectangle([22, 18, 30, 66], fill=1), arc(d, [14, 50, 36, 74], 0, 180))),
    # pa-like: U open at the top
    lambda: deva(lambda d: (line(d, [(24, 20), (22, 56), (34, 64), (70, 62)]))),
    # ma-like: closed loop against the stem
    lambda: deva(lambda d: (ring(d, [18, 30, 52, 62]), line(d, [(36, 62), (72, 62)]), d.rectangle([18, 18, 26, 46], fill=1))),
    # na-like: hook into the stem
    lambda: deva(lambda d: line(d, [(30, 20), (30, 54), (50, 58), (72, 50)])),
    # ta-like: curve swinging left
    lambda: deva(lambda d: (arc(d, [16, 24, 60, 64], 90, 300), line(d, [(36, 64), (72, 64)]))),
    # va-like: ring attached to stem
    lambda: deva(lambda d: (ring(d, [20, 34, 60, 74]), line(d, [(56, 52), (72, 52)]))),
    # ra-like: no stem, hook below the headline
    lambda: deva(lambda d: (line(d, [(48, 20), (30, 40), (50, 58), (34, 80)])), left=16, right=80, bar=False),
    # sa-like: loop plus cross stroke
    lambda: deva(lambda d: (ring(d, [16, 26, 44, 58]), line(d, [(30, 58), (48, 72), (72, 60)]), line(d, [(44, 44), (72, 44)]))),
    # la-like: double curve
    lambda: deva(lambda d: (arc(d, [14, 22, 44, 52], 90, 360), arc(d, [20, 46, 56, 84], 180, 60))),
    # ha-like: stacked curves, no stem
    lambda: deva(lambda d: (arc(d, [20, 20, 58, 50], 270, 160), line(d, [(30, 48), (58, 62), (40, 84)])), left=14, right=72, bar=False),
    # da-like: curl descending, no stem
    lambda: deva(lambda d: (line(d, [(44, 20), (44, 36)]), arc(d, [22, 30, 62, 70], 200, 120), line(d, [(50, 68), (62, 84)])), left=16, right=74, bar=False),
]


# ---------------------------------------------------------------- Kannada-like
# rounded bodies on rows ~34..86 with a hook (talekattu) on top.
def hook(d, x0=30, x1=60, y=30, stem=16):
    arc(d, [x0, y - 12, x1, y + 12], 180, 330)
    # stem joining the hook to the body below
    line(d, [(x0 + 4, y), (x0 + 4, y + stem)])


KAN = [
    # ka-like: round body with inner curl
    lambda d: (ring(d, [16, 36, 80, 86]), hook(d), line(d, [(48, 58), (48, 70)])),
    # ga-like: open bowl
    lambda d: (arc(d, [14, 34, 82, 86], 0, 200), hook(d, 36, 66, stem=44)),
    # ja-like: loop with a tail to the right
    lambda d: (ring(d, [14, 44, 52, 86]), line(d, [(50, 66), (82, 44)]), hook(d, 20, 50, 36)),
    # ta-like: double bowl
    lambda d: (arc(d, [12, 44, 50, 86], 0, 180), arc(d, [46, 44, 84, 86], 0, 180), hook(d, 24, 56, 38), line(d, [(50, 44), (50, 64)])),
    # da-like: round body with diagonal slash
    lambda d: (ring(d, [18, 38, 78, 86]), line(d, [(30, 80), (66, 44)]), hook(d)),
    # na-like: spiral
    lambda d: (arc(d, [14, 36, 82, 86], 150, 30), arc(d, [32, 50, 64, 78], 0, 270), hook(d, 40, 70)),
    # pa-like: loop with inner ring
    lambda d: (ring(d, [14, 38, 82, 86], 8), ring(d, [36, 54, 60, 76], 7), hook(d, 26, 56)),
    # ba-like: bowl with vertical stroke into the middle
    lambda d: (arc(d, [14, 38, 82, 86], 330, 210), line(d, [(48, 40), (48, 66)]), hook(d, 46, 76)),
    # ma-like: three humps
    lambda d: (arc(d, [10, 48, 40, 86], 180, 0), arc(d, [36, 48, 66, 86], 180, 0), line(d, [(62, 66), (84, 84)]), hook(d, 20, 50, 38)),
    # ra-like: leaning loop
    lambda d: (ring(d, [22, 40, 74, 86]), line(d, [(22, 86), (40, 66)]), line(d, [(74, 42), (84, 32)])),
    # la-like: hooked wave
    lambda d: (arc(d, [12, 40, 52, 86], 90, 360), arc(d, [44, 40, 84, 86], 180, 90), hook(d, 22, 52)),
    # va-like: tilted ovals
    lambda d: (ring(d, [16, 44, 56, 86]), ring(d, [46, 44, 84, 86]), hook(d, 34, 64, 36)),
]


# ---------------------------------------------------------------- digits
# heights rows 14..86, widths ~44; straight sides so vertical strokes dominate.
T, B, L, R = 18, 82, 28, 68
MID = (T + B) // 2


def digit(n):
    img, d = canvas()
    if n == 0:
        line(d, [(L, T + 10), (L, B - 10)])
        line(d, [(R, T + 10), (R, B - 10)])
        arc(d, [L - 4, T - 4, R + 4, T + 28], 180, 360)
        arc(d, [L - 4, B - 28, R + 4, B + 4], 0, 180)
    elif n == 1:
        line(d, [(52, T - 2), (52, B + 2)])
        line(d, [(52, T - 2), (34, T + 14)])
    elif n == 2:
        arc(d, [L - 2, T - 4, R + 2, T + 32], 180, 20)
        line(d, [(R + 1, T + 18), (L, B)])
        line(d, [(L, B), (R + 2, B)])
    elif n == 3:
        arc(d, [L - 2, T - 4, R + 2, MID + 4], 200, 90)
        arc(d, [L - 2, MID - 4, R + 2, B + 4], 270, 160)
        line(d, [(R - 2, T + 12), (R - 2, B - 12)])
    elif n == 4:
        line(d, [(58, T - 2), (58, B + 2)])
        line(d, [(58, T - 2), (L - 2, 62), (R + 4, 62)])
    elif n == 5:
        line(d, [(R, T), (L, T), (L, MID - 2)])
        arc(d, [L - 4, MID - 12, R + 4, B + 4], 220, 150)
        line(d, [(R + 2, MID + 8), (R + 2, B - 10)])
    elif n == 6:
        line(d, [(L, T + 14), (L, B - 12)])
        arc(d, [L - 4, T - 4, R + 4, T + 30], 180, 320)
        ring(d, [L - 4, MID - 6, R + 4, B + 4])
    elif n == 7:
        line(d, [(L - 2, T), (R + 2, T), (46, B + 2)])
    elif n == 8:
        ring(d, [L, T - 4, R, MID + 4])
        ring(d, [L - 4, MID - 2, R + 4, B + 4])
        line(d, [(L - 1, MID + 8), (L - 1, B - 8)])
        line(d, [(R + 1, MID + 8), (R + 1, B - 8)])
    elif n == 9:
        line(d, [(R, T + 12), (R, B - 14)])
        ring(d, [L - 4, T - 4, R + 4, MID + 6])
        arc(d, [L - 4, B - 30, R + 4, B + 4], 0, 140)
    return img


def sheet(glyphs):
    rows = math.ceil(len(glyphs) / COLS)
    out = Image.new("1", (COLS * CELL, rows * CELL), 0)
    for i, g in enumerate(glyphs):
        out.paste(g, ((i % COLS) * CELL, (i // COLS) * CELL))
    return out


def write_pbm(img, path):
    w, h = img.size
    px = img.load()
    stride = (w + 7) // 8
    with open(path, "wb") as f:
        f.write(f"P4\n{w} {h}\n".encode())
        for y in range(h):
            row = bytearray(stride)
            for x in range(w):
                if px[x, y]:
                    row[x // 8] |= 0x80 >> (x % 8)
            f.write(bytes(row))


def kan_cell(fn):
    img, d = canvas()
    fn(d)
    return img


def main(out_dir):
    os.makedirs(out_dir, exist_ok=True)
    sheets = {
        "devnagari": ([g() for g in DEVA], "joined"),
        "kannada": ([kan_cell(g) for g in KAN], "spaced"),
        "english_numeral": ([digit(n) for n in range(10)], "spaced"),
    }
    index = ["# label file cell count style"]
    for name, (glyphs, style) in sheets.items():
        write_pbm(sheet(glyphs), os.path.join(out_dir, f"{name}.pbm"))
        index.append(f"{name} {name}.pbm {CELL} {len(glyphs)} {style}")
    with open(os.path.join(out_dir, "sheets.txt"), "w") as f:
        f.write("\n".join(index) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "crates/core/assets/glyphs")
