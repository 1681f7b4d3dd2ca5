"""Straight-from-formula weighted AC1 for the toy ratings fixture.

Categories {0,1,2,3}; ordinal weights w(k,l) = 1 - d(d+1) / (D(D+1)), d = |k-l|, D = 3.
"""
from fractions import Fraction

Q = 4
D = Q - 1


def weight(k, l):
    d = abs(k - l)
    return 1 - Fraction(d * (d + 1), D * (D + 1))


def ac1(items):
    n = len(items)
    counts = [[sum(1 for s in scores if s == k) for k in range(Q)] for scores in items]
    pa = Fraction(0)
    for row in counts:
        r = sum(row)
        for k in range(Q):
            rstar = sum(weight(k, l) * row[l] for l in range(Q))
            pa += Fraction(row[k]) * (rstar - 1) / (r * (r - 1))
    pa /= n
    pi = [sum(Fraction(row[k], sum(row)) for row in counts) / n for k in range(Q)]
    tw = sum(weight(k, l) for k in range(Q) for l in range(Q))
    pe = tw / (Q * (Q - 1)) * sum(p * (1 - p) for p in pi)
    return pa, pe, (pa - pe) / (1 - pe)


if __name__ == "__main__":
    toy = [(3, 3), (2, 3), (0, 1), (1, 3)]
    pa, pe, value = ac1(toy)
    print("toy pa", pa, float(pa))
    print("toy pe", pe, float(pe))
    print("toy ac1", value, repr(float(value)))
    three = [(3, 3, 2), (0, 0, 0), (2, 1, 2), (3, 2, 3), (1, 1, 0)]
    pa, pe, value = ac1(three)
    print("three-rater ac1", value, repr(float(value)))
