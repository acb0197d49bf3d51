#!/usr/bin/env python3
"""Regenerates the bundled track files in data/tracks."""

import json
import math
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "tracks"


def write(name, doc):
    OUT.mkdir(parents=True, exist_ok=True)
    path = OUT / f"{name}.json"
    path.write_text(json.dumps(doc, indent=1) + "\n")
    print(f"wrote {path}")


def ring(radius=50.0, n=72, half_width=5.0):
    pts = [[radius * math.cos(2 * math.pi * i / n), radius * math.sin(2 * math.pi * i / n), 0.0] for i in range(n)]
    return {
        "format": 1,
        "name": "flat_ring",
        "periodic": True,
        "centerline": {"points": pts},
        "width": {"y_min": -half_width, "y_max": half_width},
    }


def stadium(straight=100.0, radius=30.0, n_arc=24, n_straight=10, half_width=5.0):
    pts = []
    for i in range(n_straight):
        pts.append([-straight / 2 + straight * i / n_straight, -radius, 0.0])
    for i in range(n_arc):
        a = -math.pi / 2 + math.pi * i / n_arc
        pts.append([straight / 2 + radius * math.cos(a), radius * math.sin(a), 0.0])
    for i in range(n_straight):
        pts.append([straight / 2 - straight * i / n_straight, radius, 0.0])
    for i in range(n_arc):
        a = math.pi / 2 + math.pi * i / n_arc
        pts.append([-straight / 2 + radius * math.cos(a), radius * math.sin(a), 0.0])
    return {
        "format": 1,
        "name": "stadium",
        "periodic": True,
        "centerline": {"points": pts},
        "width": {"y_min": -half_width, "y_max": half_width},
    }


def bump(t, t0, width):
    """Smooth periodic window centred at t0."""
    d = math.atan2(math.sin(t - t0), math.cos(t - t0))
    return math.exp(-((d / width) ** 2))


def nonplanar(n=96, half_width=6.0):
    """Counter-clockwise loop with rolling hills, a quarter-pipe wall on the
    outside of the east hairpin and a gully through the west hairpin."""
    pts, profile = [], []
    for i in range(n):
        t = 2 * math.pi * i / n
        x = 105.0 * math.cos(t)
        y = 55.0 * math.sin(t) + 12.0 * math.sin(2 * t)
        z = 3.0 * math.sin(t + 0.6) + 1.5 * math.sin(3 * t)
        pts.append([x, y, z])
        # y < 0 is the outside of a left turn: the wall rises there.
        wq = bump(t, 0.0, 0.45)
        wg = bump(t, math.pi, 0.45)
        a2 = 0.035 * wq + 0.03 * wg
        a3 = -0.0035 * wq
        profile.append([0.0, 0.0, round(a2, 8), round(a3, 9)])
    return {
        "format": 1,
        "name": "nonplanar_sample",
        "periodic": True,
        "centerline": {"points": pts},
        "cross_section": profile,
        "width": {"y_min": -half_width, "y_max": half_width},
    }


if __name__ == "__main__":
    write("flat_ring", ring())
    write("stadium", stadium())
    write("nonplanar_sample", nonplanar())
