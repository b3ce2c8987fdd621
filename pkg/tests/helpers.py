"""Shared test scaffolding."""

import numpy as np


class OdeOperator:
    """Adapter letting ``driver.advance`` integrate y' = f(y).

    Stages are y = y^n + sum(a1 dt f + a2 dt^2 f'(y) f), the textbook
    two-derivative form, independent of either spatial operator.
    """

    def __init__(self, f, df):
        self.f = f
        self.df = df

    def derivatives(self, y, second=True):
        L = self.f(y)
        return (L, self.df(y) * L if second else None)

    def md_stage(self, yn, contributions, dt):
        y = yn
        for a1, a2, (L, Ldot) in contributions:
            y = y + a1 * dt * L
            if a2:
                y = y + a2 * dt * dt * Ldot
        return y

    def limit(self, y):
        return y


def smooth_sine(x):
    return np.sin(2 * np.pi * x)
