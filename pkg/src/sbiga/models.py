"""Canonical SB multipatch geometries used by demos, configs and tests.

Boundary loops run with the interior on their right (det J > 0); all blocks
use q(xi) = xi (singular centers) unless stated otherwise.
"""

import numpy as np

from .geometry import SBPatch, line_curve, circle_arc, make_domain

__all__ = [
    "square4",
    "disk4",
    "fan2",
    "two_blocks_square",
    "chamfered_square",
    "square_with_hole",
    "square_with_circle_hole",
    "perforated_disk",
    "l_bracket",
]


def _rect_loop(lo, hi, degree):
    """Clockwise rectangle boundary: left, top, right, bottom."""
    x0, y0 = lo
    x1, y1 = hi
    return [
        line_curve((x0, y0), (x0, y1), degree),
        line_curve((x0, y1), (x1, y1), degree),
        line_curve((x1, y1), (x1, y0), degree),
        line_curve((x1, y0), (x0, y0), degree),
    ]


def square4(degree=3, side=1.0, center=(0.0, 0.0), offset=(-0.15, 0.1), bc=None):
    """Four-patch square plate with (offset) scaling center."""
    cx, cy = center
    h = 0.5 * side
    loop = _rect_loop((cx - h, cy - h), (cx + h, cy + h), degree)
    x0 = np.array([cx + offset[0], cy + offset[1]])
    patches = [SBPatch(c, x0) for c in loop]
    return make_domain(patches, bc=bc)


def disk4(degree=3, radius=1.0, center=(0.0, 0.0), bc=None):
    """Four-quadrant disk, scaling center at the disk center."""
    arcs = [
        circle_arc(center, radius, 0.0, -0.5 * np.pi, degree),
        circle_arc(center, radius, -0.5 * np.pi, -np.pi, degree),
        circle_arc(center, radius, -np.pi, -1.5 * np.pi, degree),
        circle_arc(center, radius, -1.5 * np.pi, -2.0 * np.pi, degree),
    ]
    patches = [SBPatch(c, center) for c in arcs]
    return make_domain(patches, bc=bc)


def fan2(degree=3, bc=None):
    """Two-triangle ("bilinear") cover of the unit square: scaling center at
    the origin corner, interface along the diagonal."""
    c1 = line_curve((0.0, 1.0), (1.0, 1.0), degree)
    c2 = line_curve((1.0, 1.0), (1.0, 0.0), degree)
    patches = [SBPatch(c1, (0.0, 0.0)), SBPatch(c2, (0.0, 0.0))]
    return make_domain(patches, bc=bc)


def two_blocks_square(degree=3, bc=None):
    """Unit square split at x = 1/2 into two star blocks (two centers);
    the cut line is a straight interface between the center groups."""
    left = [
        line_curve((0.5, 0.0), (0.0, 0.0), degree),
        line_curve((0.0, 0.0), (0.0, 1.0), degree),
        line_curve((0.0, 1.0), (0.5, 1.0), degree),
        line_curve((0.5, 1.0), (0.5, 0.0), degree),
    ]
    right = [
        line_curve((1.0, 0.0), (0.5, 0.0), degree),
        line_curve((0.5, 0.0), (0.5, 1.0), degree),
        line_curve((0.5, 1.0), (1.0, 1.0), degree),
        line_curve((1.0, 1.0), (1.0, 0.0), degree),
    ]
    patches = [SBPatch(c, (0.25, 0.5)) for c in left]
    patches += [SBPatch(c, (0.75, 0.5)) for c in right]
    return make_domain(patches, bc=bc)


def chamfered_square(degree=3):
    """Trim spec for the unit square with one corner cut off by a straight
    trimming curve (two boundary intersections -> 5-patch block)."""
    from .trim import TrimSpec

    trim = line_curve((0.6, 0.0), (1.0, 0.4), degree)
    blocks = [
        {
            "center": (0.4, 0.5),
            "loop": [
                ("boundary", 0, 0, False),   # (0,0) -> (0,1)
                ("boundary", 1, 0, False),   # (0,1) -> (1,1)
                ("boundary", 2, 0, False),   # (1,1) -> (1,0.4)
                ("trim", 0, True),           # (1,0.4) -> (0.6,0)
                ("boundary", 3, 1, False),   # (0.6,0) -> (0,0)
            ],
        }
    ]
    spec = TrimSpec(
        trim_curve=trim,
        intersections=[(3, 0.4, 0.0), (2, 0.6, 1.0)],
        blocks=blocks,
    )
    square = make_domain([SBPatch(c, (0.5, 0.5)) for c in _rect_loop((0, 0), (1, 1), degree)])
    return square, spec


def _polyline_loop(vertices, degree):
    """Closed polyline as one degree-p curve with C0 corner knots."""
    from .splines import KnotVector

    verts = [np.asarray(v, dtype=float) for v in vertices]
    ne = len(verts)
    g = np.linspace(0.0, 1.0, degree + 1)
    pts = []
    for k in range(ne):
        a, b = verts[k], verts[(k + 1) % ne]
        seg = a[None, :] + g[:, None] * (b - a)[None, :]
        pts.append(seg if k == 0 else seg[1:])
    pts = np.vstack(pts)
    knots = np.concatenate(
        [np.zeros(degree + 1)]
        + [np.full(degree, k / ne) for k in range(1, ne)]
        + [np.ones(degree + 1)]
    )
    return np.vstack(pts), KnotVector(knots, degree)


def square_with_hole(degree=3, half_diagonal=0.15):
    """Trim spec: unit square with an interior diamond hole (a closed
    trimming loop), divided by two horizontal cut lines into two star
    blocks with straight inter-block interfaces."""
    from .geometry import NurbsCurve
    from .trim import TrimSpec

    d = half_diagonal
    R, T, L, B = (0.5 + d, 0.5), (0.5, 0.5 + d), (0.5 - d, 0.5), (0.5, 0.5 - d)
    pts, kv = _polyline_loop([R, T, L, B], degree)
    trim = NurbsCurve(kv, pts)
    blocks = [
        {
            "center": (0.5, 0.85),
            "loop": [
                ("boundary", 0, 1, False),        # (0,0.5) -> (0,1)
                ("boundary", 1, 0, False),        # (0,1) -> (1,1)
                ("boundary", 2, 0, False),        # (1,1) -> (1,0.5)
                ("line", (1.0, 0.5), R),
                ("trim", 0, False),               # R -> T
                ("trim", 1, False),               # T -> L
                ("line", L, (0.0, 0.5)),
            ],
        },
        {
            "center": (0.5, 0.15),
            "loop": [
                ("boundary", 0, 0, False),        # (0,0) -> (0,0.5)
                ("line", (0.0, 0.5), L),
                ("trim", 2, False),               # L -> B
                ("trim", 3, False),               # B -> R
                ("line", R, (1.0, 0.5)),
                ("boundary", 2, 1, False),        # (1,0.5) -> (1,0)
                ("boundary", 3, 0, False),        # (1,0) -> (0,0)
            ],
        },
    ]
    spec = TrimSpec(
        trim_curve=trim,
        trim_splits=[0.25, 0.5, 0.75],
        boundary_splits=[(0, 0.5), (2, 0.5)],
        blocks=blocks,
    )
    square = make_domain([SBPatch(c, (0.5, 0.5)) for c in _rect_loop((0, 0), (1, 1), degree)])
    return square, spec


def square_with_circle_hole(degree=3, r=0.15, dist=0.32):
    """Trim spec: unit square minus a circular hole as four quarter-ring
    star blocks (diagonal cut lines to the square corners)."""
    from .trim import TrimSpec

    H = np.array([0.5, 0.5])
    s = 1.0 / np.sqrt(2.0)
    corner = {0: (1.0, 1.0), 1: (0.0, 1.0), 2: (0.0, 0.0), 3: (1.0, 0.0)}
    side = {0: ("boundary", 2, 0, False), 1: ("boundary", 1, 0, False),
            2: ("boundary", 0, 0, False), 3: ("boundary", 3, 0, False)}
    loops = []
    for k in range(4):
        ang = 0.5 * np.pi * k
        rot = np.array([[np.cos(ang), -np.sin(ang)], [np.sin(ang), np.cos(ang)]])
        Ap = H + rot @ np.array([r * s, r * s])
        Am = H + rot @ np.array([r * s, -r * s])
        arc = circle_arc(H, r, ang - 0.25 * np.pi, ang + 0.25 * np.pi, degree)
        loops.append(
            {
                "center": tuple(H + rot @ np.array([dist, 0.0])),
                "loop": [
                    ("curve", arc, False),                       # Am -> Ap
                    ("line", tuple(Ap), corner[k]),
                    side[k],                                     # corner[k] -> corner[k-1]
                    ("line", corner[(k - 1) % 4], tuple(Am)),
                ],
            }
        )
    spec = TrimSpec(blocks=loops)
    square = make_domain([SBPatch(c, (0.5, 0.5)) for c in _rect_loop((0, 0), (1, 1), degree)])
    return square, spec


def _hole_ring_blocks(H, r, w, degree, dist):
    """Four star blocks covering the square ring [H +- w] minus the hole of
    radius r: one per side, centers at distance ``dist`` from H.

    Returns (blocks, arc patch positions): blocks as (center, curves) with
    the arc always the first curve of each block.
    """
    H = np.asarray(H, dtype=float)
    s = 1.0 / np.sqrt(2.0)
    blocks = []
    for k in range(4):
        ang = 0.5 * np.pi * k
        rot = np.array([[np.cos(ang), -np.sin(ang)], [np.sin(ang), np.cos(ang)]])

        def T(pt):
            return H + rot @ np.asarray(pt, dtype=float)

        Ap = T((r * s, r * s))      # arc end at +45 deg
        Am = T((r * s, -r * s))     # arc end at -45 deg
        Cp = T((w, w))
        Cm = T((w, -w))
        arc = circle_arc(H, r, ang - 0.25 * np.pi, ang + 0.25 * np.pi, degree)
        curves = [
            arc,                                    # Am -> Ap (ccw around H)
            line_curve(Ap, Cp, degree),
            line_curve(Cp, Cm, degree),
            line_curve(Cm, Am, degree),
        ]
        blocks.append((T((dist, 0.0)), curves))
    return blocks


def _frame_blocks(lo, hi, ilo, ihi, degree):
    """Four trapezoid star blocks covering rect(lo,hi) minus rect(ilo,ihi)."""
    (x0, y0), (x1, y1) = lo, hi
    (a0, b0), (a1, b1) = ilo, ihi
    quads = [
        # outer edge (cw), corner diag, inner edge, corner diag
        (((x1, y0), (x0, y0)), ((x0, y0), (a0, b0)), ((a0, b0), (a1, b0)), ((a1, b0), (x1, y0)),
         (0.5 * (a0 + a1), 0.5 * (y0 + b0))),
        (((x0, y0), (x0, y1)), ((x0, y1), (a0, b1)), ((a0, b1), (a0, b0)), ((a0, b0), (x0, y0)),
         (0.5 * (x0 + a0), 0.5 * (b0 + b1))),
        (((x0, y1), (x1, y1)), ((x1, y1), (a1, b1)), ((a1, b1), (a0, b1)), ((a0, b1), (x0, y1)),
         (0.5 * (a0 + a1), 0.5 * (b1 + y1))),
        (((x1, y1), (x1, y0)), ((x1, y0), (a1, b0)), ((a1, b0), (a1, b1)), ((a1, b1), (x1, y1)),
         (0.5 * (a1 + x1), 0.5 * (b0 + b1))),
    ]
    blocks = []
    for e0, e1, e2, e3, center in quads:
        curves = [line_curve(p, q, degree) for p, q in (e0, e1, e2, e3)]
        blocks.append((np.asarray(center), curves))
    return blocks


def perforated_disk(degree=3, R=1.0, hole_r=0.05, hole_d=0.4, ring_w=0.1):
    """Simply supported disk with four trimmed holes on the axes (25 star
    blocks).  Returns (domain, info) with info listing rim and hole arc
    patch indices."""
    patches = []
    info = {"rim_arcs": [], "hole_arcs": []}

    def add_block(center, curves, arc_tag=None):
        base = len(patches)
        for ci, c in enumerate(curves):
            patches.append(SBPatch(c, center))
            if arc_tag is not None and ci == 0:
                info[arc_tag].append(base + ci)

    holes = [np.array([hole_d, 0.0]), np.array([0.0, hole_d]),
             np.array([-hole_d, 0.0]), np.array([0.0, -hole_d])]
    for H in holes:
        for center, curves in _hole_ring_blocks(H, hole_r, ring_w, degree, 0.08):
            add_block(center, curves, arc_tag="hole_arcs")

    w = ring_w
    d = hole_d
    # clockwise octagon: top edge left->right, then down the right side
    order = [(-w, d - w), (w, d - w), (d - w, w), (d - w, -w),
             (w, -(d - w)), (-w, -(d - w)), (-(d - w), -w), (-(d - w), w)]
    curves = [
        line_curve(order[i], order[(i + 1) % 8], degree) for i in range(8)
    ]
    add_block(np.zeros(2), curves)

    # outer blocks: 4 axis + 4 diagonal
    a_in = np.array([d + w, w])     # inner corner of an axis block, +x hole
    theta = np.arctan2(a_in[1], a_in[0])
    for k in range(4):
        ang = 0.5 * np.pi * k
        rot = np.array([[np.cos(ang), -np.sin(ang)], [np.sin(ang), np.cos(ang)]])

        def T(pt):
            return rot @ np.asarray(pt, dtype=float)

        Ep = T(R * np.array([np.cos(theta), np.sin(theta)]))
        Em = T(R * np.array([np.cos(theta), -np.sin(theta)]))
        Sp = T((d + w, w))
        Sm = T((d + w, -w))
        curves = [
            circle_arc((0, 0), R, ang + theta, ang - theta, degree),  # Ep -> Em
            line_curve(Em, Sm, degree),
            line_curve(Sm, Sp, degree),
            line_curve(Sp, Ep, degree),
        ]
        add_block(T((0.5 * (d + w + R), 0.0)), curves, arc_tag="rim_arcs")

        # diagonal block between axis direction k and k+1
        Fp = T(R * np.array([np.cos(0.5 * np.pi - theta), np.sin(0.5 * np.pi - theta)]))
        curves = [
            circle_arc((0, 0), R, ang + 0.5 * np.pi - theta, ang + theta, degree),  # Fp -> Ep
            line_curve(Ep, Sp, degree),
            line_curve(Sp, T((d - w, w)), degree),
            line_curve(T((d - w, w)), T((w, d - w)), degree),
            line_curve(T((w, d - w)), T((w, d + w)), degree),
            line_curve(T((w, d + w)), Fp, degree),
        ]
        add_block(T((0.55 / np.sqrt(2.0), 0.55 / np.sqrt(2.0))), curves, arc_tag="rim_arcs")

    return make_domain(patches), info


def l_bracket(degree=3, hole_r=0.15):
    """L-shaped bracket (20 star blocks): vertical leg [0,1]x[0,3] with two
    clamped holes, horizontal leg [1,3]x[0,1], line load on the right edge.
    Returns (domain, info)."""
    patches = []
    info = {"hole_arcs": [], "load_edges": []}

    def add_block(center, curves, arc_tag=None, load_index=None):
        base = len(patches)
        for ci, c in enumerate(curves):
            patches.append(SBPatch(c, center))
            if arc_tag is not None and ci == 0:
                info[arc_tag].append(base + ci)
            if load_index is not None and ci == load_index:
                info["load_edges"].append(base + ci)

    w = 0.3
    for Hy in (0.5, 2.5):
        H = np.array([0.5, Hy])
        for center, curves in _hole_ring_blocks(H, hole_r, w, degree, 0.24):
            add_block(center, curves, arc_tag="hole_arcs")
        lo = (0.0, Hy - 0.5)
        hi = (1.0, Hy + 0.5)
        ilo = (0.2, Hy - w)
        ihi = (0.8, Hy + w)
        for center, curves in _frame_blocks(lo, hi, ilo, ihi, degree):
            add_block(center, curves)

    for lo, hi in (((0.0, 1.0), (1.0, 1.5)), ((0.0, 1.5), (1.0, 2.0))):
        add_block(
            (0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])), _rect_loop(lo, hi, degree)
        )
    for k, (lo, hi) in enumerate((((1.0, 0.0), (2.0, 1.0)), ((2.0, 0.0), (3.0, 1.0)))):
        add_block(
            (0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])),
            _rect_loop(lo, hi, degree),
            load_index=(2 if k == 1 else None),
        )
    return make_domain(patches), info
