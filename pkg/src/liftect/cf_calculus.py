"""Constructible-function calculus on finite models: pullback, pushforward,
Radon transforms through incidence kernels, and the inversion identity check.

On finite discrete sets the Euler characteristic is the counting measure, so
pushforward reduces to fiber sums and the Radon transform to incidence sums.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "ConstructibleFunction",
    "Kernel",
    "cf_pullback",
    "cf_pushforward",
    "radon",
    "schapira_check",
    "fano_kernel",
]


class ConstructibleFunction:
    """Integer-valued function on a finite set, stored as {point: value}.

    Points with value 0 may be omitted; arithmetic is pointwise, making the
    collection a ring.
    """

    def __init__(self, domain, values=None):
        self.domain = frozenset(domain)
        vals = dict(values or {})
        if any(x not in self.domain for x in vals):
            raise ValueError("value assigned outside the domain")
        self.values = {x: int(v) for x, v in vals.items() if v != 0}

    def __call__(self, x):
        if x not in self.domain:
            raise KeyError(x)
        return self.values.get(x, 0)

    def __eq__(self, other):
        return (isinstance(other, ConstructibleFunction)
                and self.domain == other.domain and self.values == other.values)

    def __add__(self, other):
        self._check(other)
        return ConstructibleFunction(
            self.domain, {x: self(x) + other(x) for x in self.domain})

    def __sub__(self, other):
        self._check(other)
        return ConstructibleFunction(
            self.domain, {x: self(x) - other(x) for x in self.domain})

    def __mul__(self, other):
        if isinstance(other, int):
            return ConstructibleFunction(
                self.domain, {x: v * other for x, v in self.values.items()})
        self._check(other)
        return ConstructibleFunction(
            self.domain, {x: self(x) * other(x) for x in self.domain})

    __rmul__ = __mul__

    def _check(self, other):
        if self.domain != other.domain:
            raise ValueError("domain mismatch")

    def total_integral(self) -> int:
        """Euler integral over a finite discrete set: the plain sum."""
        return sum(self.values.values())

    @classmethod
    def indicator(cls, domain, subset):
        return cls(domain, {x: 1 for x in subset})

    @classmethod
    def constant(cls, domain, c):
        return cls(domain, {x: c for x in domain})


@dataclass(frozen=True)
class Kernel:
    """Incidence kernel: a subset of X x Y given as a set of pairs."""

    X: frozenset
    Y: frozenset
    pairs: frozenset

    def __post_init__(self):
        for x, y in self.pairs:
            if x not in self.X or y not in self.Y:
                raise ValueError(f"pair {(x, y)} outside X x Y")

    def fiber_x(self, x):
        """S_x = {y : (x, y) in S}."""
        return {y for (a, y) in self.pairs if a == x}

    def transpose(self):
        return Kernel(self.Y, self.X, frozenset((y, x) for x, y in self.pairs))

    @classmethod
    def diagonal(cls, X):
        X = frozenset(X)
        return cls(X, X, frozenset((x, x) for x in X))

    @classmethod
    def full(cls, X, Y):
        X, Y = frozenset(X), frozenset(Y)
        return cls(X, Y, frozenset((x, y) for x in X for y in Y))


def cf_pullback(phi: ConstructibleFunction, f: dict, domain) -> ConstructibleFunction:
    """Pullback along f: domain -> phi.domain, pointwise composition."""
    domain = frozenset(domain)
    if set(f) != domain or any(f[x] not in phi.domain for x in domain):
        raise ValueError("f must be a total map into the codomain")
    return ConstructibleFunction(domain, {x: phi(f[x]) for x in domain})


def cf_pushforward(phi: ConstructibleFunction, f: dict, codomain) -> ConstructibleFunction:
    """Pushforward along f: integrate over fibers (counting measure)."""
    codomain = frozenset(codomain)
    if set(f) != phi.domain or any(f[x] not in codomain for x in phi.domain):
        raise ValueError("f must be a total map into the codomain")
    out = {y: 0 for y in codomain}
    for x in phi.domain:
        out[f[x]] += phi(x)
    return ConstructibleFunction(codomain, out)


def radon(phi: ConstructibleFunction, kernel: Kernel) -> ConstructibleFunction:
    """Pull back to the product, cut down to the kernel, push to Y."""
    if phi.domain != kernel.X:
        raise ValueError("function domain must be the kernel's X")
    out = {y: 0 for y in kernel.Y}
    for x, y in kernel.pairs:
        out[y] += phi(x)
    return ConstructibleFunction(kernel.Y, out)


def schapira_check(kernel: Kernel, kernel_back: Kernel):
    """Check the inversion identity for a kernel pair.

    Verifies the fiber hypotheses: |S_x ∩ S'_x| constant (= chi1) over x and
    |S_x ∩ S'_{x'}| constant (= chi2) over x != x'. If they hold, checks
    (R' ∘ R) phi = (chi1 - chi2) phi + chi2 (sum phi) 1_X exactly on every
    indicator function. Returns (chi1, chi2, verified, detail).
    """
    X = kernel.X
    if kernel_back.X != kernel.Y or kernel_back.Y != X:
        raise ValueError("second kernel must map Y back to X")
    back_fibers = {x: {y for (y, b) in kernel_back.pairs if b == x} for x in X}
    chi1 = None
    for x in X:
        c = len(kernel.fiber_x(x) & back_fibers[x])
        if chi1 is None:
            chi1 = c
        elif c != chi1:
            return chi1, None, False, ("fiber hypothesis 1 fails", x)
    chi2 = None
    for x in X:
        for x2 in X:
            if x == x2:
                continue
            c = len(kernel.fiber_x(x) & back_fibers[x2])
            if chi2 is None:
                chi2 = c
            elif c != chi2:
                return chi1, chi2, False, ("fiber hypothesis 2 fails", (x, x2))
    if chi2 is None:
        chi2 = 0  # |X| = 1: no off-diagonal pairs
    ones = ConstructibleFunction.constant(X, 1)
    for x0 in X:
        phi = ConstructibleFunction.indicator(X, {x0})
        lhs = radon(radon(phi, kernel), kernel_back)
        rhs = (chi1 - chi2) * phi + (chi2 * phi.total_integral()) * ones
        if lhs != rhs:
            return chi1, chi2, False, ("identity fails on indicator", x0)
    return chi1, chi2, True, None


def fano_kernel():
    """Point-line incidence of the order-2 projective plane (7 points, 7
    lines from the difference set {1, 2, 4} mod 7)."""
    points = frozenset(range(7))
    lines = []
    for i in range(7):
        lines.append(frozenset({(i + 1) % 7, (i + 2) % 7, (i + 4) % 7}))
    line_ids = frozenset(range(7))
    pairs = frozenset((p, li) for li in line_ids for p in lines[li])
    return Kernel(points, line_ids, pairs)
