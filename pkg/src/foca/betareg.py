"""Constant-precision beta regression with logit link.

Each response y_i in (0, 1) is Beta(mu_i * phi, (1 - mu_i) * phi) with
mu_i = logistic(x_i . beta).  The fit maximizes the log-likelihood jointly in
(beta, log phi) with a damped Newton iteration that falls back to Fisher
scoring whenever the observed information is not positive definite.
"""

from __future__ import annotations

import csv
import logging
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import digamma, expit, gammaln, logit, polygamma
from scipy.stats import norm

from .errors import DomainError, NotConverged, RankDeficient, SchemaError

log = logging.getLogger(__name__)

DATASET_COLUMNS = ("y", "cov_s", "cov_c", "cov_r", "cov_cp", "lexp", "nl")
PARAMETER_NAMES = ("b1", "b2", "b3", "b4", "b5", "b6", "b7")

MAX_ITER = 200
PARAM_TOL = 1e-8
GRAD_TOL = 1e-6
LL_NOISE = 1e-11


def trigamma(x):
    return polygamma(1, x)


def beta_log_density(y, mu, phi):
    """Log density of the mean/precision beta distribution.

    Works elementwise on arrays. Raises DomainError unless 0 < y, mu < 1
    and phi > 0.
    """
    y = np.asarray(y, dtype=float)
    mu = np.asarray(mu, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if not (np.all((y > 0) & (y < 1)) and np.all((mu > 0) & (mu < 1)) and np.all(phi > 0)):
        raise DomainError("beta density needs y, mu in (0, 1) and phi > 0")
    a = mu * phi
    b = (1.0 - mu) * phi
    out = gammaln(phi) - gammaln(a) - gammaln(b) + (a - 1.0) * np.log(y) + (b - 1.0) * np.log1p(-y)
    return float(out) if out.ndim == 0 else out


@dataclass
class BetaRegData:
    """Response vector plus design matrix (intercept column included)."""

    y: np.ndarray
    X: np.ndarray
    names: tuple[str, ...] = PARAMETER_NAMES

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=float).ravel()
        self.X = np.atleast_2d(np.asarray(self.X, dtype=float))
        if self.X.shape[0] != self.y.shape[0]:
            raise ValueError(f"X has {self.X.shape[0]} rows but y has {self.y.shape[0]}")
        if len(self.names) != self.X.shape[1]:
            self.names = tuple(f"b{j + 1}" for j in range(self.X.shape[1]))
        bad = np.flatnonzero(~((self.y > 0) & (self.y < 1)))
        if bad.size:
            i = int(bad[0])
            raise DomainError(f"response {self.y[i]!r} outside the open interval (0, 1)", row=i + 1)

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @classmethod
    def from_covariates(cls, y, covariates) -> "BetaRegData":
        """Build from the six non-intercept covariate columns; adds the intercept."""
        covariates = np.atleast_2d(np.asarray(covariates, dtype=float))
        X = np.column_stack([np.ones(covariates.shape[0]), covariates])
        return cls(y, X)


def _split(theta, p):
    return theta[:p], np.exp(theta[p])


def _pieces(beta, phi, data):
    mu = expit(data.X @ beta)
    if np.any((mu <= 0) | (mu >= 1)):
        raise DomainError("fitted mean left (0, 1); the linear predictor overflowed")
    a = mu * phi
    b = (1.0 - mu) * phi
    return mu, a, b


def log_likelihood(beta, phi, data: BetaRegData) -> float:
    beta = np.asarray(beta, dtype=float)
    if not phi > 0:
        raise DomainError(f"precision must be positive, got {phi!r}")
    mu = expit(data.X @ beta)
    return float(np.sum(beta_log_density(data.y, mu, phi)))


def score(beta, phi, data: BetaRegData) -> np.ndarray:
    """Gradient of the log-likelihood in (beta, log phi)."""
    beta = np.asarray(beta, dtype=float)
    mu, a, b = _pieces(beta, phi, data)
    ystar = np.log(data.y) - np.log1p(-data.y)
    mustar = digamma(a) - digamma(b)
    g = mu * (1.0 - mu)
    u_beta = data.X.T @ (phi * (ystar - mustar) * g)
    dphi = (digamma(phi) - mu * digamma(a) - (1.0 - mu) * digamma(b)
            + mu * np.log(data.y) + (1.0 - mu) * np.log1p(-data.y))
    return np.append(u_beta, phi * np.sum(dphi))


def _information(beta, phi, data, observed):
    """Negative Hessian (observed) or Fisher information (expected) in (beta, log phi)."""
    mu, a, b = _pieces(beta, phi, data)
    X = data.X
    ta, tb = trigamma(a), trigamma(b)
    g = mu * (1.0 - mu)
    ystar = np.log(data.y) - np.log1p(-data.y)
    resid = ystar - (digamma(a) - digamma(b))
    # second derivatives in (mu, phi)
    l_mumu = -phi ** 2 * (ta + tb)
    l_muphi = -phi * (mu * ta - (1.0 - mu) * tb)
    l_phiphi = trigamma(phi) - mu ** 2 * ta - (1.0 - mu) ** 2 * tb
    if observed:
        l_muphi = l_muphi + resid
        l_eta_eta = l_mumu * g ** 2 + phi * resid * g * (1.0 - 2.0 * mu)
        dphi = (digamma(phi) - mu * digamma(a) - (1.0 - mu) * digamma(b)
                + mu * np.log(data.y) + (1.0 - mu) * np.log1p(-data.y))
        l_gg = phi ** 2 * np.sum(l_phiphi) + phi * np.sum(dphi)
    else:
        l_eta_eta = l_mumu * g ** 2
        l_gg = phi ** 2 * np.sum(l_phiphi)
    l_eta_g = phi * l_muphi * g
    p = X.shape[1]
    H = np.empty((p + 1, p + 1))
    H[:p, :p] = (X.T * l_eta_eta) @ X
    H[:p, p] = H[p, :p] = X.T @ l_eta_g
    H[p, p] = l_gg
    return -H


def observed_information(beta, phi, data: BetaRegData) -> np.ndarray:
    return _information(np.asarray(beta, float), phi, data, observed=True)


def expected_information(beta, phi, data: BetaRegData) -> np.ndarray:
    return _information(np.asarray(beta, float), phi, data, observed=False)


@dataclass
class BetaRegFit:
    beta_hat: np.ndarray
    phi_hat: float
    se: np.ndarray
    p_values: np.ndarray
    loglik: float
    converged: bool
    iterations: int
    se_log_phi: float = float("nan")
    grad_norm: float = float("nan")
    names: tuple[str, ...] = PARAMETER_NAMES
    loglik_trace: list = field(default_factory=list)
    message: str = ""

    def fitted(self, data: BetaRegData) -> np.ndarray:
        return expit(data.X @ self.beta_hat)

    def summary_rows(self) -> list[dict]:
        from .scoring import COEFFICIENT_DESCRIPTIONS
        rows = []
        for j, name in enumerate(self.names):
            desc = COEFFICIENT_DESCRIPTIONS[j] if len(self.names) == 7 else name
            rows.append({
                "coefficient": name, "description": desc, "estimate": float(self.beta_hat[j]),
                "se": float(self.se[j]), "p_value": float(self.p_values[j]),
            })
        return rows


def _initial(data: BetaRegData):
    """Least squares on logit(y) for beta; method of moments for phi."""
    z = logit(data.y)
    beta0, *_ = np.linalg.lstsq(data.X, z, rcond=None)
    mu0 = expit(data.X @ beta0)
    e = z - data.X @ beta0
    dof = max(data.n - data.p, 1)
    # variance of y on the response scale via the delta method
    sigma2 = (e @ e) / dof * (mu0 * (1.0 - mu0)) ** 2
    with np.errstate(divide="ignore"):
        phi0 = float(np.mean(mu0 * (1.0 - mu0) / sigma2) - 1.0)
    if not np.isfinite(phi0) or phi0 < 1.0:
        phi0 = 1.0
    return beta0, phi0


def _solve_direction(H, grad):
    try:
        L = np.linalg.cholesky(H)
    except np.linalg.LinAlgError:
        return None
    return np.linalg.solve(L.T, np.linalg.solve(L, grad))


def fit(data: BetaRegData, init=None, max_iter: int = MAX_ITER) -> BetaRegFit:
    """Maximum-likelihood fit of (beta, phi).

    ``init`` is an optional (beta, phi) starting point. A fit that misses
    the convergence rule is returned with ``converged=False`` and a warning;
    callers that need a hard failure use :func:`require_converged`.
    """
    if data.n < data.p + 1:
        raise RankDeficient(f"need at least {data.p + 1} observations, got {data.n}")
    rank = np.linalg.matrix_rank(data.X)
    if rank < data.p:
        raise RankDeficient(f"design matrix has rank {rank} < {data.p} columns (collinear covariates)")
    if init is None:
        beta0, phi0 = _initial(data)
    else:
        beta0, phi0 = np.asarray(init[0], dtype=float), float(init[1])
    p = data.p
    theta = np.append(beta0, np.log(phi0))

    def objective(t):
        b, ph = _split(t, p)
        try:
            return log_likelihood(b, ph, data)
        except DomainError:
            return -np.inf

    ll = objective(theta)
    if not np.isfinite(ll):
        # fall back to a flat start when the least-squares start overflows
        theta = np.zeros(p + 1)
        theta[0] = logit(np.mean(data.y))
        ll = objective(theta)
    trace = [ll]
    converged = False
    grad_norm = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        b, ph = _split(theta, p)
        grad = score(b, ph, data)
        grad_norm = float(np.linalg.norm(grad))
        step = _solve_direction(observed_information(b, ph, data), grad)
        if step is None:
            step = _solve_direction(expected_information(b, ph, data), grad)
        if step is None:
            raise RankDeficient("information matrix is singular")
        t = 1.0
        accepted = False
        # below this predicted gain likelihood differences are rounding noise
        noise = LL_NOISE * max(1.0, abs(ll))
        if 0.5 * float(grad @ step) < noise:
            cand = theta + step
            ll_new = objective(cand)
            accepted = ll_new >= ll - noise
        for _ in range(0 if accepted else 60):
            cand = theta + t * step
            ll_new = objective(cand)
            if ll_new >= ll:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            converged = grad_norm < GRAD_TOL
            it -= 1
            break
        rel = np.linalg.norm(cand - theta) / max(np.linalg.norm(theta), 1.0)
        theta, ll = cand, ll_new
        trace.append(ll)
        b, ph = _split(theta, p)
        grad_norm = float(np.linalg.norm(score(b, ph, data)))
        if rel < PARAM_TOL and grad_norm < GRAD_TOL:
            converged = True
            break
    beta_hat, phi_hat = _split(theta, p)
    info = observed_information(beta_hat, phi_hat, data)
    try:
        np.linalg.cholesky(info)
    except np.linalg.LinAlgError:
        info = expected_information(beta_hat, phi_hat, data)
    cov = np.linalg.inv(info)
    se_all = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    result = BetaRegFit(
        beta_hat=beta_hat, phi_hat=float(phi_hat), se=se_all[:p],
        p_values=np.empty(p), loglik=ll, converged=converged, iterations=it,
        se_log_phi=float(se_all[p]), grad_norm=grad_norm,
        names=data.names, loglik_trace=trace,
        message="converged" if converged else f"no convergence after {it} iterations "
                                                 f"(gradient norm {grad_norm:.3g})",
    )
    result.p_values = wald_pvalues(result)
    if not converged:
        warnings.warn(result.message, RuntimeWarning, stacklevel=2)
    log.debug("beta regression: %s, loglik %.6f", result.message, ll)
    return result


def require_converged(result: BetaRegFit) -> BetaRegFit:
    if not result.converged:
        raise NotConverged(result.message, fit=result)
    return result


def wald_pvalues(result: BetaRegFit) -> np.ndarray:
    """Two-sided normal-tail p-values of estimate / standard error."""
    beta = np.asarray(result.beta_hat, dtype=float)
    se = np.asarray(result.se, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(beta == 0, 0.0, np.abs(beta) / se)
    return 2.0 * norm.sf(z)


def simulate(beta, phi, X, seed=None) -> BetaRegData:
    """Draw responses from the model at design ``X`` (deterministic per seed)."""
    if not phi > 0:
        raise DomainError(f"precision must be positive, got {phi!r}")
    X = np.atleast_2d(np.asarray(X, dtype=float))
    rng = np.random.default_rng(seed)
    mu = expit(X @ np.asarray(beta, dtype=float))
    y = rng.beta(mu * phi, (1.0 - mu) * phi)
    # draws that round onto the boundary are nudged back inside
    y = np.where(y <= 0.0, np.nextafter(0.0, 1.0), y)
    y = np.where(y >= 1.0, np.nextafter(1.0, 0.0), y)
    return BetaRegData(y, X, PARAMETER_NAMES if X.shape[1] == 7 else ())


def realistic_design(n, seed=None, partial_rate=0.5, nl_rate=0.15) -> np.ndarray:
    """Covariates shaped like evaluation campaigns.

    Goal means are averages of rubric grades, each role is kept with
    probability ``1 - partial_rate`` (partial evaluations), LExp is a fair
    coin and Nl fires with probability ``nl_rate``.
    """
    rng = np.random.default_rng(seed)
    grades = np.array([0, 25, 50, 75, 100], dtype=float)
    sizes = (3, 2, 2, 2)
    cols = []
    for k in sizes:
        means = rng.choice(grades, size=(n, k)).mean(axis=1)
        keep = rng.random(n) >= partial_rate
        cols.append(means * keep)
    lexp = (rng.random(n) < 0.5).astype(float)
    nl = (rng.random(n) < nl_rate).astype(float)
    return np.column_stack([np.ones(n), *cols, lexp, nl])


@dataclass
class ResidualSet:
    index: np.ndarray
    values: np.ndarray

    def pairs(self) -> list[tuple[int, float]]:
        return [(int(i), float(r)) for i, r in zip(self.index, self.values)]

    @property
    def mean(self) -> float:
        return float(np.mean(self.values))


def residuals(result: BetaRegFit, data: BetaRegData) -> ResidualSet:
    """Standardized residuals (y - mu) / sqrt(mu (1 - mu) / (1 + phi))."""
    mu = result.fitted(data)
    r = (data.y - mu) / np.sqrt(mu * (1.0 - mu) / (1.0 + result.phi_hat))
    return ResidualSet(np.arange(1, data.n + 1), r)


def load_dataset(path, delimiter=None) -> BetaRegData:
    """Read ``y,cov_s,cov_c,cov_r,cov_cp,lexp,nl`` rows (header required)."""
    text = Path(path).read_text(encoding="utf-8")
    if delimiter is None:
        try:
            delimiter = csv.Sniffer().sniff(text.splitlines()[0], delimiters=",;\t").delimiter
        except (csv.Error, IndexError):
            delimiter = ","
    rows = list(csv.reader(text.splitlines(), delimiter=delimiter))
    if not rows:
        raise SchemaError(f"{path}: empty dataset")
    header = tuple(h.strip() for h in rows[0])
    if header != DATASET_COLUMNS:
        raise SchemaError(f"{path}: header must be {','.join(DATASET_COLUMNS)}, got {','.join(header)}")
    values = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(DATASET_COLUMNS):
            raise SchemaError(f"{path}: line {lineno} has {len(row)} fields, expected 7")
        try:
            values.append([float(c) for c in row])
        except ValueError as exc:
            raise SchemaError(f"{path}: line {lineno}: {exc}") from exc
    arr = np.array(values, dtype=float).reshape(-1, 7)
    bad = np.flatnonzero(~((arr[:, 0] > 0) & (arr[:, 0] < 1)))
    if bad.size:
        i = int(bad[0])
        raise DomainError(f"y = {arr[i, 0]!r} outside (0, 1) (line {i + 2} of {path})", row=i + 1)
    return BetaRegData.from_covariates(arr[:, 0], arr[:, 1:])


def write_dataset(data: BetaRegData, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(DATASET_COLUMNS)
        for y, x in zip(data.y, data.X[:, 1:]):
            w.writerow([repr(float(y))] + [repr(float(v)) for v in x])
