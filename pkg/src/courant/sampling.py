"""Seeded random polynomial data for the identity checkers."""

from __future__ import annotations

import random
from itertools import combinations_with_replacement

from .field import Chart, RatFunc
from .linalg import Matrix, Vector


class Sampler:
    """Polynomials of degree <= ``degree`` with small integer coefficients.

    Every draw is a pure function of the seed and the draw order.
    """

    def __init__(self, chart: Chart, seed: int = 0, degree: int = 2, coeff: int = 2):
        self.chart = chart
        self.seed = seed
        self.rng = random.Random(seed)
        self.coeff = coeff
        self.monomials: list[RatFunc] = [chart.one]
        xs = chart.coords()
        for d in range(1, degree + 1):
            for combo in combinations_with_replacement(range(chart.dim), d):
                m = chart.one
                for i in combo:
                    m = m * xs[i]
                self.monomials.append(m)

    def poly(self) -> RatFunc:
        out = self.chart.zero
        for m in self.monomials:
            if self.rng.random() < 0.5:
                c = self.rng.choice([i for i in range(-self.coeff, self.coeff + 1) if i])
                out = out + m * c
        return out

    def nonzero_poly(self) -> RatFunc:
        while True:
            p = self.poly()
            if not p.is_zero():
                return p

    def vector(self, n: int) -> Vector:
        return tuple(self.poly() for _ in range(n))

    def vector_field(self) -> Vector:
        return self.vector(self.chart.dim)

    def matrix(self, m: int, n: int) -> Matrix:
        return Matrix(self.chart, [[self.poly() for _ in range(n)] for _ in range(m)])
