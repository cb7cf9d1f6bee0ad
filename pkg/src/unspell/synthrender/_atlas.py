"""1-bit glyph atlas for a serif face in fixed-width cells (generated by tools/build_glyph_atlas.py)."""

CELL_W = 24
CELL_H = 40
BASELINE = 30

GLYPHS = {
    "a": "00000000000000000000000000000000000000000000000000000000000000000000000001f80007fe000f0f000e03800c03800c03800001c001ffc007ffc00f01c01e01c01c01c01c01c01c03c01e03c00f0fc00ffff003f1f0000000000000000000000000000000000000000000000000000000000000",
    "b": "0000000000000000000000003f00003f0000070000070000070000070000070000070000071f00077fc00761e00780f00780700700780700780700780700780700780700780700780700780780700780f007e1e03f7fc03f1f00000000000000000000000000000000000000000000000000000000000000",
    "c": "000000000000000000000000000000000000000000000000000000000000000000000000007e0001ffc003c1e00780e00700e00f00600e00600e00000e00000e00000e00000e00000f00000700600780e003c1c001ff80007e00000000000000000000000000000000000000000000000000000000000000",
    "d": "000000000000000000000000000fc0000fc00001c00001c00001c00001c00001c00001c003f1c007f9c00f0dc01e07c01c03c03c03c03801c03801c03801c03801c03801c03801c03c03c01c03c01e03c00f0fc007fdf803f1f8000000000000000000000000000000000000000000000000000000000000",
    "e": "000000000000000000000000000000000000000000000000000000000000000000000000007e0001ff8003c3c00781e00700e00f00f00e00700e00700ffff00ffff00e00000e00000f000007007007806003c1e001ffc0007f00000000000000000000000000000000000000000000000000000000000000",
    "f": "000000000000000000000000001f80003fe00070e000f06000e00000e00000e00000e00007ff0007ff0000e00000e00000e00000e00000e00000e00000e00000e00000e00000e00000e00000e00000e00000e00007fe0007fe00000000000000000000000000000000000000000000000000000000000000",
    "g": "00000000000000000000000000000000000000000000000000000000000000000000000003f1f807fdf80f0fc01e07c01c03c03c03c03801c03801c03801c03801c03801c03801c03c03c01c03c01e07c00f0dc007f9c003f1c00001c00001c01803801c03801e0f001ffe0007f800000000000000000000",
    "h": "0000000000000000000000003f00003f0000070000070000070000070000070000070000071f00073fc00761c00780e00780e00700e00700e00700e00700e00700e00700e00700e00700e00700e00700e00700e03fe3fc3fe3fc000000000000000000000000000000000000000000000000000000000000",
    "i": "00000000000000000000000000300000780000780000300000000000000000000000000001f80001f80000380000380000380000380000380000380000380000380000380000380000380000380000380000380001ff0001ff00000000000000000000000000000000000000000000000000000000000000",
    "j": "000000000000000000000000000300000380000380000300000000000000000000000000001f80001f8000038000038000038000038000038000038000038000038000038000038000038000038000038000038000038000038000038000038001038001838001870001fe0000fc00000000000000000000",
    "k": "0000000000000000000000003f00003f00000700000700000700000700000700000700000707f80707f8070180070300070600070c0007380007780007fc0007de00078e00070f000707800703800701c00701e03fe7fc3fe7fc000000000000000000000000000000000000000000000000000000000000",
    "l": "00000000000000000000000001f80001f80000380000380000380000380000380000380000380000380000380000380000380000380000380000380000380000380000380000380000380000380000380000380001ff0001ff00000000000000000000000000000000000000000000000000000000000000",
    "m": "000000000000000000000000000000000000000000000000000000000000000000000000f9e0f0fbf3f8383a3c3c3c1c3c1c1c381c1c381c1c381c1c381c1c381c1c381c1c381c1c381c1c381c1c381c1c381c1cfe7f3ffe7f3f000000000000000000000000000000000000000000000000000000000000",
    "n": "0000000000000000000000000000000000000000000000000000000000000000000000003f1f003f3fc00761c00780e00780e00700e00700e00700e00700e00700e00700e00700e00700e00700e00700e00700e03fe3fc3fe3fc000000000000000000000000000000000000000000000000000000000000",
    "o": "00000000000000000000000000000000000000000000000000000000000000000000000000fc0003ff000787800f01c00e01e01e00e01c00e01c00f01c00f01c00f01c00f01c00e01e00e00e01e00f01c007878003ff0000fc00000000000000000000000000000000000000000000000000000000000000",
    "p": "0000000000000000000000000000000000000000000000000000000000000000000000003f1f003f7fc007e1e00780f00780700700780700780700780700780700780700780700780700780780700780f00761e0077fc0071f000700000700000700000700000700003fe0003fe000000000000000000000",
    "q": "00000000000000000000000000000000000000000000000000000000000000000000000003f1f807fdf80f0fc01e07c01c03c03c03c03801c03801c03801c03801c03801c03801c03c03c01c03c01e07c00f0dc007f9c003f1c00001c00001c00001c00001c00001c0000ff8000ff8000000000000000000",
    "r": "0000000000000000000000000000000000000000000000000000000000000000000000000fc7e00fcfe001f86001e06001e00001c00001c00001c00001c00001c00001c00001c00001c00001c00001c00001c0000ffc000ffc00000000000000000000000000000000000000000000000000000000000000",
    "s": "00000000000000000000000000000000000000000000000000000000000000000000000000fc0001ff800383c00701c00700c007000007800003f00001fe00007f80000fc00003c00001e00600e00601c00703c003ff8000fe00000000000000000000000000000000000000000000000000000000000000",
    "t": "00000000000000000000000000000000000000000000700000700000700000700000700003ff8003ff800070000070000070000070000070000070000070000070000070000070000070000070c00070c00071c0003f80001f00000000000000000000000000000000000000000000000000000000000000",
    "u": "0000000000000000000000000000000000000000000000000000000000000000000000003f07e03f07e00700e00700e00700e00700e00700e00700e00700e00700e00700e00700e00701e00701e00703e00786e003fcfc00f8fc000000000000000000000000000000000000000000000000000000000000",
    "v": "0000000000000000000000000000000000000000000000000000000000000000000000003fc3f83fc3f80e00600700600700c00780c003818003818001c30001c30001e30000e60000e600007c00007c00007c00003800003800000000000000000000000000000000000000000000000000000000000000",
    "w": "000000000000000000000000000000000000000000000000000000000000000000000000fe183ffe1c3f303c04303c08303e08186e08186e18186e181c46181c46301c47300e83300e83600f83e00781e00781c00781c00301c0000000000000000000000000000000000000000000000000000000000000",
    "x": "0000000000000000000000000000000000000000000000000000000000000000000000003fc7f03fc7f007818003838003c30001e60000ec00007c00007800003c00007c0000ce0000cf000187800303800703c01f87f81f87f8000000000000000000000000000000000000000000000000000000000000",
    "y": "0000000000000000000000000000000000000000000000000000000000000000000000003fc3f83fc3f80e00600700600700c00780c003818003818001c30001c30001e30000e60000e600007c00007c0000380000380000380000300000300000600018600018c0001fc0000f8000000000000000000000",
    "z": "00000000000000000000000000000000000000000000000000000000000000000000000007ffe007ffe00601e00603c0060380000700000f00001e00003c0000380000700000f00001e00001c0300380300780300ffff00ffff0000000000000000000000000000000000000000000000000000000000000",
}
