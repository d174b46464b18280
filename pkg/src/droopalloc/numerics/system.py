"""Small DAE containers used for tests and generic callers.

Anything with ``n``, ``m``, ``evaluate(x, y, kp)`` and label lists can be
handed to the numerics routines; :class:`DaeSystem` from the network module
is the main one.
"""
import numpy as np


class FunctionalDae:
    """DAE defined by callables ``f(x, y)`` and ``g(x, y)`` returning sequences."""

    def __init__(self, f, g, n, m, jacobian=None):
        self._f, self._g = f, g
        self.n, self.m = n, m
        self._jac = jacobian
        self.n_gains = 0
        self.x_labels = [f"x{i}" for i in range(n)]
        self.y_labels = [f"y{i}" for i in range(m)]
        self.f_tags = [f"f{i}" for i in range(n)]
        self.g_tags = [f"g{i}" for i in range(m)]

    def evaluate(self, x, y, kp=None):
        return list(self._f(x, y)) if self.n else [], list(self._g(x, y)) if self.m else []

    def residual(self, x, y, kp=None):
        F, G = self.evaluate(np.asarray(x, float), np.asarray(y, float))
        return np.asarray(F, dtype=float).reshape(self.n), np.asarray(G, dtype=float).reshape(self.m)

    def jacobian_blocks(self, x, y, kp=None):
        if self._jac is None:
            return None
        return self._jac(x, y)


class LinearDae(FunctionalDae):
    """``x' = A x`` with no algebraic part and an exact Jacobian."""

    def __init__(self, A):
        A = np.asarray(A, dtype=float)
        n = A.shape[0]
        super().__init__(lambda x, y: A @ np.asarray(x, float), None, n, 0,
                         jacobian=lambda x, y: (A, np.zeros((n, 0)), np.zeros((0, n)),
                                                np.zeros((0, 0))))
        self.A = A

    def evaluate(self, x, y, kp=None):
        x = list(x)
        return [sum(a * v for a, v in zip(row, x)) for row in self.A.tolist()], []

    def residual(self, x, y, kp=None):
        return self.A @ np.asarray(x, float), np.zeros(0)
