"""Independent reference computations on plain nested lists of Fractions.

Nothing here imports the package's arithmetic; the tests compare the
numpy-backed results against these loops.
"""

from fractions import Fraction
from itertools import product


def chapman_kolmogorov(f, g):
    """Row-by-row sum over the middle variable: (g∘f)[a][c] = Σ_b f[a][b] g[b][c]."""
    return [[sum((f[a][b] * g[b][c] for b in range(len(g))), Fraction(0)) for c in range(len(g[0]))]
            for a in range(len(f))]


def kron(f, g):
    return [[f[a][b] * g[c][d] for b in range(len(f[0])) for d in range(len(g[0]))]
            for a in range(len(f)) for c in range(len(g))]


def marginal(rows, sizes, keep):
    """Sum out coordinates not in ``keep`` from rows over the product of ``sizes``."""
    keep = sorted(keep)
    out_sizes = [sizes[k] for k in keep]
    out = []
    for row in rows:
        acc = {}
        for j, idx in enumerate(product(*(range(s) for s in sizes))):
            key = tuple(idx[k] for k in keep)
            acc[key] = acc.get(key, Fraction(0)) + row[j]
        out.append([acc.get(key, Fraction(0)) for key in product(*(range(s) for s in out_sizes))])
    return out


def relational_compose(f, g):
    """f, g: lists of sets of indices; union of images."""
    return [set().union(*(g[y] for y in fx)) for fx in f]


def is_product_of_marginals(row, sizes):
    """A single distribution over a product equals the product of its marginals."""
    margs = [marginal([row], sizes, [k])[0] for k in range(len(sizes))]
    for j, idx in enumerate(product(*(range(s) for s in sizes))):
        p = Fraction(1)
        for k, i in enumerate(idx):
            p *= margs[k][i]
        if p != row[j]:
            return False
    return True
