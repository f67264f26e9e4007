"""Linear-model comparison of nasalance across systems and environments.

The model is ordinary least squares on per-token nasalance with
deviation-coded system, environment, their interaction, and a vowel
control term. From the fit: estimated marginal means per system x
environment cell (vowel averaged with equal weights), pairwise environment
contrasts within each system, and the difference-of-differences that asks
whether two systems capture an environment contrast at different
magnitudes. p-values are two-sided Student t with the fit's residual df,
Bonferroni-adjusted over an explicit family size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import betainc

from .errors import DesignError, NumericError, RankDeficiencyError

# with zero residual variance, estimates this small count as exact zeros
_ZERO_ESTIMATE_TOL = 1e-10


@dataclass(frozen=True)
class TokenRecord:
    """One vowel token with its factors and midpoint nasalance."""

    source_id: str
    speaker: str
    system: str
    word: str
    vowel: str
    environment: str
    t_mid_s: float
    nasalance_pct: float

    def __post_init__(self):
        if not (0.0 <= self.nasalance_pct <= 100.0):
            raise ValueError(
                f"nasalance_pct {self.nasalance_pct} outside [0, 100]"
            )
        for name in ("system", "vowel", "environment"):
            if not getattr(self, name):
                raise ValueError(f"empty factor level: {name}")


def deviation_code(levels) -> np.ndarray:
    """Sum (deviation) coding matrix, k levels x (k-1) columns.

    Level i < k gets a 1 in column i; the last level gets -1 everywhere,
    so coefficients compare levels against the grand mean.
    """
    levels = list(levels)
    k = len(levels)
    if k < 2:
        raise DesignError(f"factor needs at least 2 levels, got {levels!r}")
    if len(set(levels)) != k:
        raise DesignError(f"duplicate factor levels in {levels!r}")
    m = np.zeros((k, k - 1))
    for i in range(k - 1):
        m[i, i] = 1.0
    m[k - 1, :] = -1.0
    return m


@dataclass(frozen=True)
class Design:
    """Design matrix with named columns and the coding tables behind them."""

    X: np.ndarray
    y: np.ndarray
    names: tuple[str, ...]
    codings: dict


def _factor_levels(records, attr, order):
    observed = {getattr(r, attr) for r in records}
    if order is not None:
        levels = [lv for lv in order if lv in observed]
        missing = observed - set(levels)
        if missing:
            raise DesignError(f"{attr} order is missing levels {sorted(missing)}")
    else:
        levels = sorted(observed)
    return levels


def build_design(records, level_order=None) -> Design:
    """Design matrix: intercept, system, environment, their interaction, vowel.

    Factors are deviation-coded with levels in lexicographic order unless
    level_order (a dict of factor name to level sequence) says otherwise.
    System and environment need at least two levels; a single-level vowel
    control is vacuous and drops out.
    """
    records = list(records)
    if not records:
        raise DesignError("no records")
    level_order = level_order or {}
    sys_levels = _factor_levels(records, "system", level_order.get("system"))
    env_levels = _factor_levels(records, "environment", level_order.get("environment"))
    vow_levels = _factor_levels(records, "vowel", level_order.get("vowel"))
    for name, levels in (("system", sys_levels), ("environment", env_levels)):
        if len(levels) < 2:
            raise DesignError(f"{name} has a single observed level: {levels!r}")

    codings = {
        "system": (tuple(sys_levels), deviation_code(sys_levels)),
        "environment": (tuple(env_levels), deviation_code(env_levels)),
    }
    if len(vow_levels) >= 2:
        codings["vowel"] = (tuple(vow_levels), deviation_code(vow_levels))

    names = ["intercept"]
    names += [f"system.{lv}" for lv in sys_levels[:-1]]
    names += [f"environment.{lv}" for lv in env_levels[:-1]]
    for s_lv in sys_levels[:-1]:
        for e_lv in env_levels[:-1]:
            names.append(f"env.{e_lv}:sys.{s_lv}")
    if "vowel" in codings:
        names += [f"vowel.{lv}" for lv in vow_levels[:-1]]

    sys_index = {lv: i for i, lv in enumerate(sys_levels)}
    env_index = {lv: i for i, lv in enumerate(env_levels)}
    vow_index = {lv: i for i, lv in enumerate(vow_levels)}
    sys_m = codings["system"][1]
    env_m = codings["environment"][1]
    rows = []
    for r in records:
        s = sys_m[sys_index[r.system]]
        e = env_m[env_index[r.environment]]
        row = [1.0, *s, *e, *np.outer(s, e).ravel()]
        if "vowel" in codings:
            row.extend(codings["vowel"][1][vow_index[r.vowel]])
        rows.append(row)
    X = np.array(rows, dtype=np.float64)
    y = np.array([r.nasalance_pct for r in records], dtype=np.float64)
    return Design(X=X, y=y, names=tuple(names), codings=codings)


@dataclass(frozen=True)
class FitResult:
    """OLS output plus the coding tables needed to build prediction rows."""

    names: tuple[str, ...]
    estimates: np.ndarray
    covariance: np.ndarray
    residual_variance: float
    residual_df: int
    codings: dict = field(default_factory=dict)


def ols_fit(X, y, names=None, codings=None) -> FitResult:
    """Least squares via QR decomposition (never the raw normal equations).

    covariance = residual_variance * (X'X)^-1, computed from the R factor.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or y.ndim != 1 or len(y) != X.shape[0]:
        raise ValueError("X must be 2-d with one y per row")
    n, p = X.shape
    names = tuple(names) if names is not None else tuple(f"x{i}" for i in range(p))
    if len(names) != p:
        raise ValueError("one name per column required")
    if n <= p:
        raise NumericError(f"need more observations than columns (n={n}, p={p})")
    q, r = np.linalg.qr(X, mode="reduced")
    diag = np.abs(np.diag(r))
    tol = diag.max() * max(n, p) * np.finfo(float).eps if diag.size else 0.0
    aliased = [names[i] for i in range(p) if diag[i] <= tol]
    if aliased:
        raise RankDeficiencyError("design matrix is rank deficient", columns=aliased)
    beta = solve_triangular(r, q.T @ y)
    resid = y - X @ beta
    rss = float(resid @ resid)
    df = n - p
    sigma2 = rss / df
    r_inv = solve_triangular(r, np.eye(p))
    xtx_inv = r_inv @ r_inv.T
    cov = sigma2 * xtx_inv
    cov = (cov + cov.T) / 2.0
    return FitResult(
        names=names,
        estimates=beta,
        covariance=cov,
        residual_variance=sigma2,
        residual_df=df,
        codings=dict(codings) if codings else {},
    )


def fit_nasalance_model(records, level_order=None) -> FitResult:
    """Convenience: build_design + ols_fit with coding tables attached."""
    design = build_design(records, level_order=level_order)
    return ols_fit(design.X, design.y, names=design.names, codings=design.codings)


def _require_codings(fit: FitResult):
    if "system" not in fit.codings or "environment" not in fit.codings:
        raise ValueError("fit carries no system/environment coding tables")


def _cell_row(fit: FitResult, system: str, environment: str) -> np.ndarray:
    """Prediction row for one system x environment cell, vowel averaged."""
    sys_levels, sys_m = fit.codings["system"]
    env_levels, env_m = fit.codings["environment"]
    if system not in sys_levels:
        raise ValueError(f"unknown system level {system!r}")
    if environment not in env_levels:
        raise ValueError(f"unknown environment level {environment!r}")
    s = sys_m[sys_levels.index(system)]
    e = env_m[env_levels.index(environment)]
    row = [1.0, *s, *e, *np.outer(s, e).ravel()]
    if "vowel" in fit.codings:
        row.extend(fit.codings["vowel"][1].mean(axis=0))
    return np.array(row, dtype=np.float64)


@dataclass(frozen=True)
class EmmRow:
    system: str
    environment: str
    emm: float
    se: float


@dataclass(frozen=True)
class EmmTable:
    rows: tuple[EmmRow, ...]
    fit: FitResult

    def __iter__(self):
        return iter(self.rows)

    def cell(self, system: str, environment: str) -> EmmRow:
        for row in self.rows:
            if row.system == system and row.environment == environment:
                return row
        raise KeyError((system, environment))


def emmeans(fit: FitResult) -> EmmTable:
    """Estimated marginal means for every system x environment cell.

    The vowel control is averaged with equal weight per level (not observed
    proportions), so an EMM is the model's cell value at the vowel centroid.
    """
    _require_codings(fit)
    sys_levels = fit.codings["system"][0]
    env_levels = fit.codings["environment"][0]
    rows = []
    for s in sys_levels:
        for e in env_levels:
            x = _cell_row(fit, s, e)
            emm = float(x @ fit.estimates)
            se = math.sqrt(max(float(x @ fit.covariance @ x), 0.0))
            rows.append(EmmRow(system=s, environment=e, emm=emm, se=se))
    return EmmTable(rows=tuple(rows), fit=fit)


@dataclass(frozen=True)
class ContrastRow:
    description: str
    estimate: float
    se: float
    t: float
    df: int
    p: float
    p_adjusted: float
    degenerate: bool = False


@dataclass(frozen=True)
class ContrastTable:
    rows: tuple[ContrastRow, ...]
    family_size: int

    def __iter__(self):
        return iter(self.rows)

    def __len__(self):
        return len(self.rows)


def _contrast_from_vector(fit: FitResult, d: np.ndarray, description: str):
    estimate = float(d @ fit.estimates)
    var = float(d @ fit.covariance @ d)
    se = math.sqrt(max(var, 0.0))
    if se > 0:
        t = estimate / se
        p = student_t_p(t, fit.residual_df)
        return ContrastRow(description, estimate, se, t, fit.residual_df, p, p)
    if abs(estimate) <= _ZERO_ESTIMATE_TOL:
        return ContrastRow(description, estimate, 0.0, 0.0, fit.residual_df, 1.0, 1.0)
    # nonzero estimate with zero standard error: report as degenerate
    t = math.inf if estimate > 0 else -math.inf
    return ContrastRow(description, estimate, 0.0, t, fit.residual_df, 0.0, 0.0,
                       degenerate=True)


def _adjusted(rows, family_size):
    m = family_size if family_size is not None else len(rows)
    if m < 1:
        raise ValueError(f"family size must be >= 1, got {m}")
    adjusted = bonferroni([row.p for row in rows], m)
    rows = [
        ContrastRow(r.description, r.estimate, r.se, r.t, r.df, r.p, p_adj,
                    degenerate=r.degenerate)
        for r, p_adj in zip(rows, adjusted)
    ]
    return ContrastTable(rows=tuple(rows), family_size=m)


def pairwise_env_contrasts(
    emms: EmmTable, within_system: str, family_size: int | None = None
) -> ContrastTable:
    """All unordered environment pairs within one system.

    family_size defaults to the number of pairs in this table.
    """
    fit = emms.fit
    _require_codings(fit)
    env_levels = fit.codings["environment"][0]
    if len(env_levels) < 2:
        raise DesignError("need at least 2 environments for contrasts")
    rows = []
    for env_i, env_j in combinations(env_levels, 2):
        d = _cell_row(fit, within_system, env_i) - _cell_row(fit, within_system, env_j)
        rows.append(
            _contrast_from_vector(fit, d, f"{within_system}: {env_i} - {env_j}")
        )
    return _adjusted(rows, family_size)


def system_difference_of_differences(fit: FitResult, env_pair) -> ContrastRow:
    """How differently two systems capture one environment contrast.

    estimate = (emm_i - emm_j under the first system level)
             - (emm_i - emm_j under the second). Negative values mean the
    second system shows the larger contrast for this pair's orientation.
    """
    _require_codings(fit)
    sys_levels = fit.codings["system"][0]
    if len(sys_levels) != 2:
        raise DesignError(
            f"difference of differences needs exactly 2 systems, got {len(sys_levels)}"
        )
    sys_a, sys_b = sys_levels
    env_i, env_j = env_pair
    d = (
        _cell_row(fit, sys_a, env_i)
        - _cell_row(fit, sys_a, env_j)
        - _cell_row(fit, sys_b, env_i)
        + _cell_row(fit, sys_b, env_j)
    )
    description = f"({env_i} - {env_j}): {sys_a} - {sys_b}"
    return _contrast_from_vector(fit, d, description)


def difference_of_differences_table(
    fit: FitResult, env_pairs=None, family_size: int | None = None
) -> ContrastTable:
    """Difference-of-differences rows for each environment pair."""
    _require_codings(fit)
    if env_pairs is None:
        env_levels = fit.codings["environment"][0]
        env_pairs = list(combinations(env_levels, 2))
    rows = [system_difference_of_differences(fit, pair) for pair in env_pairs]
    return _adjusted(rows, family_size)


def bonferroni(p_values, m: int):
    """Family-wise error correction: each p becomes min(1, p*m)."""
    if m < 1:
        raise ValueError(f"family size must be >= 1, got {m}")
    out = []
    for p in p_values:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"p-value {p} outside [0, 1]")
        out.append(min(1.0, p * m))
    return out


def student_t_p(t: float, df: float) -> float:
    """Two-sided p-value of a Student t statistic.

    Uses the regularized incomplete beta identity
    P(|T| >= t) = I_{df/(df+t^2)}(df/2, 1/2).
    """
    if df < 1:
        raise ValueError(f"df must be >= 1, got {df}")
    if not math.isfinite(t):
        return 0.0
    x = df / (df + t * t)
    return float(betainc(df / 2.0, 0.5, x))


def emm_to_csv(table: EmmTable) -> str:
    """CSV dump with columns system,environment,emm,se."""
    lines = ["system,environment,emm,se"]
    for row in table:
        lines.append(f"{row.system},{row.environment},{row.emm:.9g},{row.se:.9g}")
    return "\n".join(lines) + "\n"


def contrasts_to_csv(*tables: ContrastTable) -> str:
    """CSV dump with columns contrast,estimate,se,t,df,p,p_adj (9 sig digits)."""
    lines = ["contrast,estimate,se,t,df,p,p_adj"]
    for table in tables:
        for r in table:
            lines.append(
                f"{r.description},{r.estimate:.9g},{r.se:.9g},{r.t:.9g},"
                f"{r.df},{r.p:.9g},{r.p_adjusted:.9g}"
            )
    return "\n".join(lines) + "\n"
