"""Polygons of exact rational slopes: construction, Newton polygon of a
polynomial from coefficient valuations, comparison predicates, and the merge
used when splicing numerics of a short exact sequence.

A polygon of width d is stored as its ascending slope multiset; its vertices
are the points (k, s_1 + ... + s_k) for k = 0..d.  "P lies above Q" means
every ordinate of P is >= the matching ordinate of Q.
"""

from __future__ import annotations

import math
from fractions import Fraction


class Polygon:
    """Lower-convex polygon given by an ascending multiset of rational slopes."""

    __slots__ = ("slopes",)

    def __init__(self, slopes):
        self.slopes = tuple(sorted(Fraction(s) for s in slopes))

    @property
    def width(self):
        return len(self.slopes)

    @property
    def endpoint(self):
        return (len(self.slopes), sum(self.slopes, Fraction(0)))

    def ordinate(self, k):
        if not 0 <= k <= self.width:
            raise ValueError(f"ordinate index {k} outside [0, {self.width}]")
        return sum(self.slopes[:k], Fraction(0))

    @property
    def vertices(self):
        acc = Fraction(0)
        out = [(0, acc)]
        for i, s in enumerate(self.slopes):
            acc += s
            out.append((i + 1, acc))
        return out

    def __eq__(self, other):
        return isinstance(other, Polygon) and self.slopes == other.slopes

    def __hash__(self):
        return hash(self.slopes)

    def __repr__(self):
        return f"Polygon({', '.join(str(s) for s in self.slopes)})"


def from_slopes(values):
    """Polygon with the given (unsorted) slope multiset."""
    return Polygon(values)


def newton_polygon(valuations):
    """Newton polygon of a polynomial from its coefficient valuations.

    ``valuations[i]`` is the valuation of the degree-i coefficient (a
    Fraction/int, or math.inf for a zero coefficient).  Returns the polygon
    whose slopes are the valuations of the roots, ascending: the lower convex
    hull of the points (i, v_i) read from degree d back down to degree 0.
    """
    vals = list(valuations)
    if not vals:
        raise ValueError("no coefficients")
    if all(v == math.inf for v in vals):
        raise ValueError("all coefficients vanish")
    if vals[-1] == math.inf:
        raise ValueError("leading coefficient must have finite valuation")
    if vals[0] == math.inf:
        raise ValueError("zero constant term: polygons with infinite slopes "
                         "are unsupported")
    pts = [(i, Fraction(v)) for i, v in enumerate(vals) if v != math.inf]

    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point unless it turns strictly upward
            if (y2 - y1) * (pt[0] - x2) >= (pt[1] - y2) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)

    slopes = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        s = Fraction(y1 - y2, x2 - x1)
        slopes.extend([s] * (x2 - x1))
    slopes.reverse()
    return Polygon(slopes)


def _check_width(P, Q):
    if P.width != Q.width:
        raise ValueError(f"width mismatch: {P.width} != {Q.width}")


def lies_above(P, Q):
    """True iff every ordinate of P is >= the matching ordinate of Q."""
    _check_width(P, Q)
    return all(P.ordinate(k) >= Q.ordinate(k) for k in range(1, P.width + 1))


def same_endpoint(P, Q):
    _check_width(P, Q)
    return P.endpoint == Q.endpoint


def merge(P, Q):
    """Polygon of the concatenated slope multisets.

    Its ordinate at k is min over m of ordinate_P(m) + ordinate_Q(k - m);
    merging preserves the lies_above relation for matching endpoints.
    """
    return Polygon(P.slopes + Q.slopes)
