"""3-vector helpers that stay exact on Fraction components.

Vectors are plain tuples (or lists) of numbers; components may be ints,
Fractions, floats, complex, or numpy arrays.  numpy is only involved when
the caller passes arrays, so exact-rational pipelines never round.
"""

import math


def dot3(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def cross3(a, b):
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def add3(a, b):
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def sub3(a, b):
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def scale3(c, a):
    return (c * a[0], c * a[1], c * a[2])


def norm3(a) -> float:
    return math.sqrt(float(a[0]) ** 2 + float(a[1]) ** 2 + float(a[2]) ** 2)
