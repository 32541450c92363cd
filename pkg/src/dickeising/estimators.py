"""scikit-learn style wrappers around the functional core.

These let the toolkit slot into pipelines and grid utilities that expect
``fit``/``transform``/``predict`` and ``get_params``.  All physics lives in
the functional modules; the classes here only validate arrays and delegate.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .meanfield import ModelParams, ReducedParams, minimize, observables
from .metrology import blue_estimator
from .phase_diagram import first_order_branch, second_order_branch
from .quadrature import QuadratureConfig


def _quadrature(est):
    return QuadratureConfig(base_points=est.quad_points, refine_tol=est.quad_tol)


class MeanFieldObservables(TransformerMixin, BaseEstimator):
    """Map rows ``(h, J, g)`` to ``(x_sq, s_x, m_z, chi)`` at fixed ``omega`` and ``beta``.

    ``fit`` only validates the configuration; the transform is stateless.
    """

    def __init__(self, omega=1.0, beta=1.0, quad_points=64, quad_tol=1e-10):
        self.omega = omega
        self.beta = beta
        self.quad_points = quad_points
        self.quad_tol = quad_tol

    def fit(self, X, y=None):
        X = check_array(X, ensure_min_features=3)
        if X.shape[1] != 3:
            raise ValueError(f"expected columns (h, J, g), got {X.shape[1]} columns")
        self.quadrature_ = _quadrature(self)
        ModelParams(0.0, 1.0, 0.0, self.omega, self.beta)  # validates omega, beta
        self.n_features_in_ = 3
        return self

    def transform(self, X):
        check_is_fitted(self, "quadrature_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} columns, got {X.shape[1]}")
        out = np.empty((X.shape[0], 4))
        for i, (h, J, g) in enumerate(X):
            obs = observables(ModelParams(h, J, g, self.omega, self.beta), self.quadrature_)
            out[i] = obs.x_sq, obs.s_x, obs.m_z, obs.chi
        return out

    def get_feature_names_out(self, input_features=None):
        return np.array(["x_sq", "s_x", "m_z", "chi"], dtype=object)


class BLUEstimator(BaseEstimator):
    """Best linear unbiased estimator of a parameter shift from count readings.

    ``fit`` takes an ``(n, 3)`` design array with columns ``mu``, ``mu'`` and
    ``sigma^2`` per scan point, plus optional ``sample_weight`` as the number
    of readings per point.  ``predict`` maps per-point mean counts to shift
    estimates.
    """

    def fit(self, X, y=None, sample_weight=None):
        X = check_array(X)
        if X.shape[1] != 3:
            raise ValueError("design columns must be (mu, mu_prime, sigma2)")
        grid = np.arange(X.shape[0], dtype=float)
        self.design_ = blue_estimator(grid, X[:, 0], X[:, 1], X[:, 2], sample_weight)
        self.weights_ = self.design_.weights
        self.offset_ = self.design_.offset
        self.predicted_variance_ = self.design_.predicted_variance
        self.n_features_in_ = X.shape[0]
        return self

    def predict(self, counts):
        check_is_fitted(self, "design_")
        counts = check_array(counts)
        if counts.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} readings per scan, got {counts.shape[1]}")
        return self.design_.estimate(counts)


class PhaseBoundaryTracer(BaseEstimator):
    """Trace both transition branches at one ``omega_t`` and label states.

    ``fit`` takes a 1-D ascending ``beta_t`` grid.  ``predict`` takes rows
    ``(beta_t, h_t)`` and returns ``"normal"`` or ``"superradiant"``.
    """

    def __init__(self, omega_t=0.3, quad_points=64, quad_tol=1e-10):
        self.omega_t = omega_t
        self.quad_points = quad_points
        self.quad_tol = quad_tol

    def fit(self, beta_grid, y=None):
        beta_grid = check_array(np.asarray(beta_grid, dtype=float).reshape(-1, 1)).ravel()
        q = _quadrature(self)
        self.quadrature_ = q
        self.second_order_ = second_order_branch(self.omega_t, beta_grid, q)
        self.first_order_ = first_order_branch(self.omega_t, beta_grid, q)
        return self

    def predict(self, X):
        check_is_fitted(self, "quadrature_")
        X = check_array(X)
        if X.shape[1] != 2:
            raise ValueError("expected columns (beta_t, h_t)")
        return np.array([minimize(ReducedParams(h, b, self.omega_t), self.quadrature_).phase.value
                         for b, h in X], dtype=object)
