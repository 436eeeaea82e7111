"""Closed-form oracles for the built-in family, written out by hand.

Everything here is transcribed by hand from closed-form expressions;
nothing is computed by the package.  Irrational eigenvalues live in a
quadratic field so that eigen-identities can be checked exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction as F

MU_SAMPLES = (F(850, 11), F(90), F(96), F(99), F(101), F(103), F(544, 5))
MU_THRESHOLDS = {"mu3": F(94), "mu4": F(85251, 869), "mu5": F(85234, 849), "mu1": F(102)}


def is_square(q: F) -> bool:
    q = F(q)
    if q < 0:
        return False
    return (math.isqrt(q.numerator) ** 2 == q.numerator
            and math.isqrt(q.denominator) ** 2 == q.denominator)


@dataclass(frozen=True)
class Surd:
    """``a + b sqrt(d)`` with rational ``a``, ``b`` and a fixed radicand ``d``."""

    a: F
    b: F
    d: F

    @staticmethod
    def of(x, d) -> "Surd":
        return Surd(F(x), F(0), F(d))

    def _lift(self, o):
        return o if isinstance(o, Surd) else Surd.of(o, self.d)

    def __add__(self, o):
        o = self._lift(o)
        return Surd(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.a, -self.b, self.d)

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        o = self._lift(o)
        return Surd(self.a * o.a + self.b * o.b * self.d, self.a * o.b + self.b * o.a, self.d)

    __rmul__ = __mul__

    def __truediv__(self, o):
        return Surd(self.a / F(o), self.b / F(o), self.d)

    def is_zero(self) -> bool:
        if is_square(self.d):
            r = F(math.isqrt(self.d.numerator), math.isqrt(self.d.denominator))
            return self.a + self.b * r == 0
        return self.a == 0 and self.b == 0

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(float(self.d))


def pm(a, b, d):
    """The pair ``a - b sqrt(d)``, ``a + b sqrt(d)``."""
    return Surd(F(a), -F(b), F(d)), Surd(F(a), F(b), F(d))


def vertex_eigenvalues(m):
    """Eigenvalue per vertex and face, keyed ``{vertex: {face: value}}``."""
    return {
        1: {2: F(-84), 4: F(60), 6: F(-162)},
        2: {2: F(-93), 4: F(33), 5: F(144)},
        3: {2: F(74), 3: F(-60), 6: F(75)},
        4: {2: F(65), 3: F(-33), 5: F(-93)},
        5: {1: m - 18, 4: F(-42), 6: F(-111)},
        6: {1: m - 9, 4: F(-69), 5: F(93)},
        7: {1: m - 176, 3: F(42), 6: F(126)},
        8: {1: m - 167, 3: F(69), 5: F(-144)},
    }


def facet_points(m):
    return {
        "B1": (F(11, 34), (2040 + 11 * m) / 5372, F(1)),
        "B2": (F(10, 17), (204 + 5 * m) / 1343, F(0)),
    }


def interior_point(m):
    return (F(68) / (442 - 3 * m), 2 * (9180 - 61 * m) / (79 * (442 - 3 * m)),
            4 * (544 - 5 * m) / (1326 - 9 * m))


def segment_parameter(m):
    return (850 - 11 * m) / (9 * m - 1326)


def facet_normal_eigenvalues(m):
    """Real eigenvalue of each facet equilibrium pointing into the cube."""
    return {"B1": (2550 - 33 * m) / 68, "B2": (15 * m - 1632) / 17}


def facet_focus_pairs(m):
    """Complex pairs ``(re, im^2)`` of the facet equilibria inside their faces."""
    d1 = 19987 * (44671 * m * m - 6976596 * m - 1178700372)
    d2 = 2765 * (12965 * m * m - 2471460 * m - 66034188)
    return {
        "B1": ((2038674 - 19987 * m) / F(182648), -d1 / F(182648) ** 2),
        "B2": ((282030 - 2765 * m) / F(22831), -d2 / F(22831) ** 2),
    }


def branch_matrices(m):
    """Branch matrices ``xi1..xi6`` on the column-vector convention."""
    return {
        1: ((F(42) * (m - 176) / (37 * (18 - m)), F(0)),
            (F(4029) * (m - 106) / (518 * (18 - m)), F(1))),
        2: ((F(11) * (167 - m) / 1495, F(162) * (167 - m) / 37375),
            (F(3723, 1495), F(-29434, 37375))),
        3: ((F(5) * (6502 - 41 * m) / 23828, (190 - m) / F(322)),
            (F(2040, 851), F(-16, 23))),
        4: ((F(531) / (8 * (m - 9)), F(13, 40)),
            (F(7803) / (32 * (m - 9)), F(-99, 160))),
        5: ((F(294) / (5 * (m - 18)), F(63) * (m - 32) / (155 * (m - 18))),
            (F(1122) / (5 * (m - 18)), (127 * m + 4446) / (5580 - 310 * m))),
        6: ((F(93) * (167 - m) / (65 * (m - 9)), F(0)),
            (F(64464) / (715 * (m - 9)), F(1))),
    }


def branch_eigenpairs(m):
    """``{xi: [(eigenvalue, eigenvector), ...]}``; vectors are ``(x, 1)``."""
    a2, c2 = 16491 - 275 * m, 75359 - 275 * m
    d2 = 75625 * m * m - 101760050 * m + 15751183081
    a3, c3 = 15934 - 205 * m, 49086 - 205 * m
    d3 = 42025 * m * m - 37032780 * m + 5621864196
    a4, c4 = 3837 - 33 * m, 3243 + 33 * m
    d4 = 3 * (363 * m * m + 371906 * m + 800643)
    # Eigenvector offset is 22674 + 127 mu; the matrix fixes the sign (see ledger).
    a5, c5 = 13782 - 127 * m, 22674 + 127 * m
    d5 = 16129 * m * m + 40819452 * m - 607817916
    out = {
        1: [(Surd.of(F(42) * (176 - m) / (37 * (m - 18)), 0), (Surd.of(F(14) * (m - 102) / (51 * (m - 106)), 0),)),
            (Surd.of(1, 0), (Surd.of(0, 0),))],
        6: [(Surd.of(F(93) * (167 - m) / (65 * (m - 9)), 0), (Surd.of(F(11) * (102 - m) / 408, 0),)),
            (Surd.of(1, 0), (Surd.of(0, 0),))],
    }
    for k, (a, c, d, lam_den, vec_den, lam_scale) in {
        2: (a2, c2, d2, F(74750), F(186150), F(1)),
        3: (a3, c3, d3, F(47656), F(114240), F(1)),
        4: (a4, c4, d4, 320 * (m - 9), F(26010), F(3)),
        5: (a5, c5, d5, 620 * (m - 18), F(139128), F(1)),
    }.items():
        lams = [s * lam_scale / lam_den for s in pm(a, 1, d)]
        vecs = [(s / vec_den,) for s in pm(c, 1, d)]
        out[k] = list(zip(lams, vecs))
    return out


def cycle_matrices(m):
    """Return matrices of the cycles, keyed by base S-edge and cycle name."""
    return {
        5: {
            "H2": ((F(3) * (3199 * m + 740274) / (29900 * (m - 9)),
                    F(-79) * (2572 * m - 238203) / (373750 * (m - 9))),
                   (F(-398871) * (m - 94) / (119600 * (m - 9)),
                    F(-9) * (94624 * m - 28591281) / (1495000 * (m - 9)))),
            "H4": ((F(3) * (13219 * m + 5308734) / (190624 * (m - 9)),
                    (530658 - 5567 * m) / (12880 * (m - 9))),
                   (F(-459) * (5949 * m - 574846) / (762496 * (m - 9)),
                    F(-9) * (1871 * m - 801474) / (51520 * (m - 9)))),
            "H5": ((F(21) * (1177 * m + 123226) / (52762 * (m - 18)),
                    F(-1659) * (m - 94) / (3565 * (m - 18))),
                   (F(-4029) * (267 * m - 24914) / (369334 * (m - 18)),
                    F(-19) * (541 * m - 187014) / (24955 * (m - 18)))),
            "H6": ((F(-42) * (m - 176) / (37 * (m - 18)), F(0)),
                   (F(-4029) * (m - 106) / (518 * (m - 18)), F(1))),
        },
        8: {
            "H1": ((F(-93) * (m - 167) / (65 * (m - 9)), F(0)),
                   (F(64464) / (715 * (m - 9)), F(1))),
            "H2": ((F(-924093) * (m - 167) / (598000 * (m - 9)), F(869) * (m - 167) / 2990000),
                   (F(-15991101) / (598000 * (m - 9)), F(3876933, 2990000))),
            "H4": ((F(-9) * (56269 * m - 9931190) / (381248 * (m - 9)),
                    (149290 - 1667 * m) / F(1906240)),
                   (F(-17901) / (1702 * (m - 9)), F(10293, 8510))),
            "H5": ((F(-3) * (23883 * m - 4222210) / (59570 * (m - 18)),
                    F(-79) * (52 * m * m - 10969 * m + 612630) / (1846670 * (m - 18))),
                   (F(-64464) / (4255 * (m - 18)),
                    F(16) * (10382 * m - 174789) / (131905 * (m - 18)))),
        },
    }


def cycle_eigenpairs(m):
    """``{base: {name: [(eigenvalue, (x,)), ...]}}`` for the non-triangular cycles."""
    a2 = 122787543 - 123922 * m
    d2 = 320140324 * m * m - 60787796412 * m + 2893236225489
    a4 = 142050954 - 75491 * m
    d4 = 2615265201481 * m * m - 504216904560828 * m + 24312026567983716
    a5 = 353512794 + 104449 * m
    d5 = 3386009761 * m * m - 644714033868 * m + 30745583285796
    lam = {
        "H2": [s * 3 / (2990000 * (m - 9)) for s in pm(a2, 79, d2)],
        "H4": [s * 3 / (3812480 * (m - 9)) for s in pm(a4, 1, d4)],
        "H5": [s / (3693340 * (m - 18)) for s in pm(a5, 79, d5)],
    }
    vec = {
        5: {
            "H2": [s / (42075 * (m - 94)) for s in pm(617217 - 5618 * m, 1, d2)],
            "H4": [s / (765 * (5949 * m - 574846)) for s in pm(35876274 - 339871 * m, 1, d4)],
            "H5": [s / (510 * (267 * m - 24914)) for s in pm(2181906 - 20579 * m, 1, d5)],
        },
        8: {
            "H2": [s / 337365 for s in pm(17927 * m - 1701498, 1, d2)],
            "H4": [s / 13366080 for s in pm(1612579 * m - 155884746, 1, d4)],
            "H5": [s / 708288 for s in pm(57553 * m - 5466054, 1, d5)],
        },
    }
    return {base: {n: list(zip(lam[n], [(v,) for v in vs])) for n, vs in by.items()}
            for base, by in vec.items()}


def is_eigenpair(mat, lam: Surd, x: Surd) -> bool:
    """``mat (x, 1) == lam (x, 1)`` exactly."""
    (p, q), (r, s) = mat
    top = x * p + q - lam * x
    bottom = x * r + s - lam
    return top.is_zero() and bottom.is_zero()


def projective_branches(m):
    """Local formulas of the projective map on ``[0, 2]``, keyed by interval label."""
    return {
        "J1": lambda x: 588 * (m - 176) * x / (79 * (65 * m - 6834) * x - 518 * (m - 18)),
        "J3": lambda x: 2 * (74 * (m - 78) + (131 * m - 55298) * x) / (74 * (m + 34) + (131 * m - 92146) * x),
        "J2": lambda x: (324 * m + (226 * m - 160251) * x - 24674) / (162 * m + (113 * m - 141380) * x + 2380),
        "J6": lambda x: ((-3476 * m + (2761 * m - 412581) * x + 419016)
                         / (-2453 * m + 158 * (11 * m - 1530) * x + 248175)),
        "J4": lambda x: -4 * (-26 * m + (13 * m - 2772) * x + 2889) / (-94 * m + (47 * m + 49212) * x - 48789),
        "J5": lambda x: -42 * (-6 * m + (3 * m - 530) * x + 626) / ((m + 96270) * x - 2 * (m + 52374)),
    }


def projective_breakpoints(m):
    return [F(0), F(74, 329), F(74, 149), F(1), (4137 + 22 * m) / (4236 + 11 * m),
            (75 + 2 * m) / (84 + m), F(2)]


def fixed_point_j1(m):
    return (14 * m - 1428) / (65 * m - 6834)


def fixed_point_j6(m):
    return (22 * m - 2652) / (11 * m - 1530)


def period_two_point(m):
    """``(x, first interval, second interval)`` of the repelling 2-cycle."""
    m = F(m)
    if MU_THRESHOLDS["mu3"] < m < MU_THRESHOLDS["mu4"]:
        den = 71941 * m - 6256224
        rad = (320140324 * m * m - 60787796412 * m + 2893236225489) / den ** 2
        return 3 * math.sqrt(rad) - float(5 * (7486 * m - 751455) / den), "J2", "J4"
    if MU_THRESHOLDS["mu4"] < m < MU_THRESHOLDS["mu5"]:
        den = 9965897 * m - 946939158
        rad = (2615265201481 * m * m - 504216904560828 * m + 24312026567983716) / den ** 2
        return 3 * math.sqrt(rad) - float(5 * (533489 * m - 52940718) / den), "J3", "J4"
    if m > MU_THRESHOLDS["mu5"]:
        den = 9157 * m - 787158
        rad = (3386009761 * m * m - 644714033868 * m + 30745583285796) / den ** 2
        return math.sqrt(rad) / 8 - float(5 * (8467 * m - 845394) / (8 * den)), "J3", "J5"
    return None


# Regime rows: representative parameter -> (likely limit set, glue cycle, case).
REGIME_ROWS = {
    F(90): (("H6",), "H6", "a"),
    F(96): (("H1", "H6"), "H2", "b"),
    F(99): (("H1", "H6"), "H4", "c"),
    F(101): (("H1", "H6"), "H5", "d"),
    F(103): (("B1", "B2"), "H5", "e"),
}


def branch_sectors(m):
    """Sector of each branch as forms ``(a, b)`` with ``a u + b v > 0``.

    ``(u, v)`` are ``(u2, u6)`` on the first S-edge and ``(u1, u5)`` on the second.
    """
    return {
        1: [(F(-255), F(74))],
        2: [(F(75), F(-74))],
        3: [(F(-75), F(74)), (F(255), F(-74))],
        4: [(F(-93), m - 9), (F(4335), -11 * (m - 9))],
        5: [(F(93), -(m - 9))],
        6: [(F(-4335), 11 * (m - 9))],
    }
