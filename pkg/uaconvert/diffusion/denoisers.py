from __future__ import annotations

from abc import ABC, abstractmethod

import numpy as np
from scipy import linalg
from scipy.special import logsumexp

from ..errors import NumericalError
from ..toyworld.gmm import GmmWorld, PosteriorGmm, posterior_given_y
from .schedule import NoiseSchedule


class DenoiserModel(ABC):
    """Conditional noise predictor eps(x_t, y, t)."""

    @abstractmethod
    def predict(self, x_t: np.ndarray, y: np.ndarray, step_index: int) -> np.ndarray:
        """Predicted noise, same shape as `x_t` ((d,) or (K, d))."""
        ...


class AnalyticGmmDenoiser(DenoiserModel):
    """
    Ideal noise predictor for a Gaussian-mixture posterior. At level alpha-bar the
    diffused posterior is a mixture with means sqrt(ab) m_k and covariances
    ab S_k + (1 - ab) I; eps* = -sqrt(1 - ab) * grad log p_t(x_t).
    """

    def __init__(self, posterior: PosteriorGmm, schedule: NoiseSchedule) -> None:
        self.posterior = posterior
        self.schedule = schedule
        self._log_w = np.log(posterior.weights_given_y)

    def eps_at(self, x_t: np.ndarray, alpha_bar: float) -> np.ndarray:
        x = np.asarray(x_t, dtype=np.float64)
        batch = np.atleast_2d(x)
        d = self.posterior.dim
        n_comp = self._log_w.size
        diffs = np.empty((n_comp,) + batch.shape)
        precs = np.empty_like(diffs)
        log_r = np.empty((batch.shape[0], n_comp))
        for k in range(n_comp):
            cov = alpha_bar * self.posterior.covs_given_y[k] + (1.0 - alpha_bar) * np.eye(d)
            try:
                cf = linalg.cho_factor(cov, lower=True)
            except linalg.LinAlgError as e:
                raise NumericalError(f"diffused covariance {k} is singular") from e
            diffs[k] = batch - np.sqrt(alpha_bar) * self.posterior.means_given_y[k]
            precs[k] = linalg.cho_solve(cf, diffs[k].T).T
            maha = np.einsum("ij,ij->i", diffs[k], precs[k])
            logdet = 2.0 * np.sum(np.log(np.diag(cf[0])))
            log_r[:, k] = self._log_w[k] - 0.5 * (maha + logdet)
        resp = np.exp(log_r - logsumexp(log_r, axis=1, keepdims=True))
        score = -np.einsum("ik,kij->ij", resp, precs)
        eps = -np.sqrt(1.0 - alpha_bar) * score
        return eps.reshape(x.shape)

    def predict(self, x_t: np.ndarray, y: np.ndarray, step_index: int) -> np.ndarray:
        return self.eps_at(x_t, self.schedule.alpha_bar(step_index))


def analytic_gmm_denoiser(
    world: GmmWorld, y: np.ndarray, schedule: NoiseSchedule | None = None
) -> AnalyticGmmDenoiser:
    """Exact denoiser for the posterior of `world` given observation `y`."""
    return AnalyticGmmDenoiser(posterior_given_y(world, y), schedule or NoiseSchedule())
