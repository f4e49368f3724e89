"""Iterative factorization driver and convergence bookkeeping.

Given the diagonal pattern Lambda0+ (k entries w, then ones) and a remainder
M0 in the shifted frame, the scheme solves one matrix boundary problem per
order,

    Lambda0+ N_r+ + N_r- = M_{r-1},   M_r = -sum_{j=1..r} N_j- N_{r+1-j}+,

and assembles the truncated factor series

    h- = I + sum_r N_r- (Lambda0+)^(-1),   h+ = I + sum_r N_r+.

All step identities hold exactly at the grid nodes, so the reported residual
of h- Lambda0 h+ against Lambda0 + M0 measures pure truncation on the same
grid (and truncation plus interpolation on a refined one). The common
unimodular shift w^s multiplies both sides of the factorization identically
and drops out of every sup norm taken on the line.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from . import cauchy
from .evaluators import ClosedForm
from .grid import (
    MobiusGrid,
    SampledMatrixFunction,
    hoelder_norm,
    matrix_norm,
    sample,
    sup_norm,
)
from .rbvp import PartialIndexProfile, solve_step, split_indices


class NumericalError(RuntimeError):
    """A non-finite intermediate quantity; the run cannot continue."""


# ---------------------------------------------------------------------------
# constant-choice strategies


class CanonicalZero:
    """All free constants zero: the plain corrected-operator solution."""

    name = "canonical-zero"

    def free_block(self, r: int, remainder: SampledMatrixFunction,
                   profile: PartialIndexProfile, plus_sum: np.ndarray) -> np.ndarray:
        n, k = profile.n, profile.k
        return np.zeros((n - k, n), dtype=complex)


class ExplicitConstants:
    """User-supplied free blocks, one per step; the last block repeats."""

    name = "explicit"

    def __init__(self, blocks: Sequence):
        blocks = [np.asarray(b, dtype=complex) for b in blocks]
        if not blocks:
            raise ValueError("explicit strategy needs at least one constant block")
        self.blocks = blocks

    def free_block(self, r, remainder, profile, plus_sum):
        return self.blocks[min(r - 1, len(self.blocks) - 1)]


class MinimizeRemainderInfinity:
    """Zero the free rows of the total constant, shrinking the next remainder at infinity."""

    name = "minimize-remainder-infinity"

    def free_block(self, r, remainder, profile, plus_sum):
        return np.asarray(plus_sum)[profile.k:, :].copy()


_BUILTIN_STRATEGIES = {
    "canonical-zero": CanonicalZero,
    "minimize-remainder-infinity": MinimizeRemainderInfinity,
}


def _as_strategy(strategy, explicit_constants=None):
    if hasattr(strategy, "free_block"):
        return strategy
    if strategy == "explicit":
        if explicit_constants is None:
            raise ValueError("strategy 'explicit' requires explicit_constants")
        return ExplicitConstants(explicit_constants)
    try:
        return _BUILTIN_STRATEGIES[strategy]()
    except KeyError:
        raise ValueError(f"unknown strategy {strategy!r}") from None


# ---------------------------------------------------------------------------
# remainder recurrence


@dataclass(eq=False)
class StepState:
    """Everything accumulated after `order` solved steps.

    remainders[0] is the driving M0; remainders[r] for r >= 1 is the
    right-hand side produced after step r.
    """

    order: int
    n_plus_terms: list
    n_minus_terms: list
    remainders: list
    constants: list


def next_remainder(state: StepState) -> SampledMatrixFunction:
    """M_r = -sum_{j=1..r} N_j- N_{r+1-j}+ node-wise, r = state.order."""
    r = state.order
    if r < 1:
        raise ValueError("need at least one solved step")
    if len(state.n_plus_terms) < r or len(state.n_minus_terms) < r:
        raise ValueError(f"state holds fewer than {r} factor terms")
    acc = None
    for j in range(1, r + 1):
        term = state.n_minus_terms[j - 1] @ state.n_plus_terms[r - j]
        acc = term if acc is None else acc + term
    return -acc


# ---------------------------------------------------------------------------
# convergence diagnostics


def alpha_coefficients(r_max: int):
    """Exact rational alpha_r: alpha_1 = 1/2, then the self-convolution halved."""
    r_max = int(r_max)
    if r_max < 1:
        raise ValueError("r_max must be >= 1")
    alphas = [Fraction(1, 2)]
    for r in range(2, r_max + 1):
        s = sum(alphas[j - 1] * alphas[r - j - 1] for j in range(1, r))
        alphas.append(s / 2)
    return alphas


@dataclass(eq=False)
class ConvergenceDiagnostics:
    A: float
    epsilon_bound: float
    C_mu_used: float
    hoelder_norm_N: float
    mu: float
    small_enough: bool
    alpha: tuple
    per_step_norms: tuple = ()


def convergence_from_norm(norm: float, c_mu: float) -> float:
    """A = norm * (1 + c_mu)^2, the geometric-series constant of the scheme."""
    return float(norm) * (1.0 + float(c_mu)) ** 2


def convergence_constant(m0: SampledMatrixFunction, mu: float, c_mu: float) -> ConvergenceDiagnostics:
    """Diagnostics from the Hoelder norm of the full perturbation.

    The small parameter is folded into m0, so the reported A already bounds
    the series ratio; partial sums converge geometrically when A < 1 and the
    admissible-perturbation bound is 1/A.
    """
    mu = float(mu)
    c_mu = float(c_mu)
    if not 0.0 < mu < 1.0:
        raise ValueError(f"mu must lie in (0, 1), got {mu}")
    if c_mu <= 0.0:
        raise ValueError(f"c_mu must be positive, got {c_mu}")
    est = hoelder_norm(m0, mu)
    a = convergence_from_norm(est.total, c_mu)
    eps = float("inf") if a == 0.0 else 1.0 / a
    return ConvergenceDiagnostics(
        A=a,
        epsilon_bound=eps,
        C_mu_used=c_mu,
        hoelder_norm_N=est.total,
        mu=mu,
        small_enough=bool(a < 1.0),
        alpha=tuple(float(v) for v in alpha_coefficients(12)),
    )


def c_mu_lower_bound(grid: MobiusGrid, mu: float) -> float:
    """Empirical lower bound for the singular-operator norm on H_mu.

    Max of hoelder_norm(S0[f]) / hoelder_norm(f) over the fixed density bank;
    a lower bound only, so A built from it may be an underestimate.
    """
    best = 0.0
    for _name, f in cauchy.reference_densities():
        vals = np.asarray(f(grid.x_nodes), dtype=complex)[:, None, None]
        m = SampledMatrixFunction(grid, vals)
        num = hoelder_norm(cauchy.singular_S0(m), mu).total
        den = hoelder_norm(m, mu).total
        if den > 0:
            best = max(best, num / den)
    return best


# ---------------------------------------------------------------------------
# the driver


@dataclass(eq=False)
class StepRecord:
    r: int
    solution: object
    constant: np.ndarray
    c_total: np.ndarray
    c0: np.ndarray
    plus_sum: np.ndarray
    limit: np.ndarray
    sup_remainder: float
    sup_n_plus: float
    sup_n_minus: float


@dataclass(frozen=True)
class FactorConditionReport:
    unit_column_defect: float
    unit_columns_ok: bool
    infinity_product_defect: float
    infinity_product_ok: bool
    min_abs_det_h_minus: float
    min_abs_det_h_plus: float


def build_lambda0(profile: PartialIndexProfile, grid: MobiusGrid) -> SampledMatrixFunction:
    """Shifted diagonal pattern diag(w x k, 1 x (n-k)) with its closed form."""
    kappas = tuple(int(v) for v in profile.shifted_kappas())
    return sample(ClosedForm.mobius_power_diag(kappas), grid)


@dataclass(eq=False)
class FactorizationResult:
    grid: MobiusGrid
    profile: PartialIndexProfile
    strategy_name: str
    order: int
    order_reached: int
    h_minus: SampledMatrixFunction
    h_plus: SampledMatrixFunction
    lambda_factor: SampledMatrixFunction
    residual_sup: float
    steps: list
    diagnostics: Optional[ConvergenceDiagnostics]
    lambda0: SampledMatrixFunction
    m0: SampledMatrixFunction

    def h_plus_infinity(self) -> np.ndarray:
        n = self.profile.n
        total = np.eye(n, dtype=complex)
        for rec in self.steps:
            total = total - rec.c_total
        return total

    def h_minus_infinity(self) -> np.ndarray:
        n = self.profile.n
        total = np.eye(n, dtype=complex)
        for rec in self.steps:
            total = total + rec.limit + rec.c_total
        return total

    def h_minus_at_minus_i(self) -> np.ndarray:
        """Exact value: the w^(-1) column factors vanish at z = -i."""
        n, k = self.profile.n, self.profile.k
        scale = np.ones(n)
        scale[:k] = 0.0
        total = np.eye(n, dtype=complex)
        for rec in self.steps:
            total = total + (rec.c0 + rec.constant) * scale[None, :]
        return total

    def evaluate_h_plus(self, z: complex) -> np.ndarray:
        n = self.profile.n
        total = np.eye(n, dtype=complex)
        for rec in self.steps:
            total = total + rec.solution.hp_plus.evaluate(z)
        return total

    def evaluate_h_minus(self, z: complex) -> np.ndarray:
        n = self.profile.n
        z = complex(z)
        u = (z + 1j) / (z - 1j)
        colfac = u ** self.profile.shifted_kappas()
        total = np.eye(n, dtype=complex)
        for rec in self.steps:
            total = total + rec.solution.hp_minus.evaluate(z) * colfac[None, :]
        return total

    def residual_sup_at(self, refine: int = 1) -> float:
        """Sup of h- Lambda0 h+ - (Lambda0 + M0), optionally on a finer grid.

        Factor series and remainder are band-limited grid objects, so their
        refined samples are their exact trigonometric continuations; the
        diagonal is rebuilt from its closed form.
        """
        refine = int(refine)
        if refine < 1:
            raise ValueError("refine must be >= 1")
        hm, hp, l0, m0 = self.h_minus, self.h_plus, self.lambda0, self.m0
        if refine > 1:
            hm = cauchy.resample(hm, refine)
            hp = cauchy.resample(hp, refine)
            l0 = cauchy.resample(l0, refine)
            m0 = cauchy.resample(m0, refine)
        diff = (hm @ l0 @ hp) - (l0 + m0)
        return sup_norm(diff)


def run_factorization(
    lambda0: SampledMatrixFunction,
    m0: SampledMatrixFunction,
    profile: PartialIndexProfile,
    order: int,
    strategy: Union[str, object] = "canonical-zero",
    explicit_constants=None,
    atol: float = 1e-12,
    mu: float = 0.5,
    c_mu: float = 1.0,
    refine_check: int = 1,
    convergence: Optional[bool] = None,
) -> FactorizationResult:
    """Run the order-by-order scheme in the shifted frame.

    m0 must already carry the w^(-s) shift when the profile has s != 0; the
    assembled factors then pair with the full diagonal (exponents as given in
    the profile), and the shift cancels from all reported sup norms.
    Early stop: a remainder with sup norm below atol ends the loop.
    """
    if not isinstance(profile, PartialIndexProfile):
        profile = split_indices(profile)
    order = int(order)
    if order < 1:
        raise ValueError("order must be >= 1")
    strat = _as_strategy(strategy, explicit_constants)
    grid = m0.grid
    n, k = profile.n, profile.k
    if m0.dims != (n, n):
        raise ValueError(f"m0 must be {n} x {n} for this profile")
    if lambda0.dims != (n, n) or lambda0.grid.n_points != grid.n_points:
        raise ValueError("lambda0 must match m0's grid and dimensions")

    state = StepState(0, [], [], [m0], [])
    records = []
    current = m0
    limit = None
    if current.closed_form is not None and hasattr(current.closed_form, "limit_at_infinity"):
        try:
            limit = current.closed_form.limit_at_infinity()
        except ValueError:
            limit = None
    if limit is None:
        limit = cauchy.limit_estimate(current.samples)
    limit = np.asarray(limit, dtype=complex)

    for r in range(1, order + 1):
        sup_m = sup_norm(current)
        if not np.isfinite(sup_m):
            raise NumericalError(f"remainder at step {r} contains non-finite values")
        if sup_m < atol:
            break
        plus_sum = cauchy.plus_coefficient_sum(current.samples)
        block = np.asarray(strat.free_block(r, current, profile, plus_sum), dtype=complex)
        if block.shape != (n - k, n):
            raise ValueError(
                f"strategy returned a free block of shape {block.shape}, expected {(n - k, n)}"
            )
        if not np.all(np.isfinite(block)):
            raise NumericalError(f"strategy returned non-finite constants at step {r}")
        sol = solve_step(lambda0, current, block)
        if not (np.all(np.isfinite(sol.n_plus.samples)) and np.all(np.isfinite(sol.n_minus.samples))):
            raise NumericalError(f"step {r} produced non-finite factor terms")
        c_total = sol.constant_used - sol.plus_sum
        records.append(
            StepRecord(
                r=r,
                solution=sol,
                constant=sol.constant_used,
                c_total=c_total,
                c0=sol.c0,
                plus_sum=sol.plus_sum,
                limit=limit,
                sup_remainder=sup_m,
                sup_n_plus=sup_norm(sol.n_plus),
                sup_n_minus=sup_norm(sol.n_minus),
            )
        )
        state.order = r
        state.n_plus_terms.append(sol.n_plus)
        state.n_minus_terms.append(sol.n_minus)
        state.constants.append(sol.constant_used)
        if r < order:
            current = next_remainder(state)
            state.remainders.append(current)
            # limits obey the same convolution as the remainders
            limit = np.zeros((n, n), dtype=complex)
            for j in range(1, r + 1):
                lj = records[j - 1].limit + records[j - 1].c_total
                limit = limit + lj @ records[r - j].c_total

    order_reached = len(records)

    eye = np.tile(np.eye(n, dtype=complex), (grid.n_points, 1, 1))
    kappas = profile.shifted_kappas()
    colfac = np.conj(grid.w_nodes)[:, None] ** kappas[None, :]
    hm_samples = eye.copy()
    hp_samples = eye.copy()
    for rec in records:
        hm_samples += rec.solution.n_minus.samples * colfac[:, None, :]
        hp_samples += rec.solution.n_plus.samples
    h_minus = SampledMatrixFunction(grid, hm_samples)
    h_plus = SampledMatrixFunction(grid, hp_samples)
    lambda_factor = sample(ClosedForm.mobius_power_diag(profile.indices), grid)

    diag = None
    want_diag = convergence if convergence is not None else grid.n_points <= 8192
    if want_diag:
        diag = convergence_constant(m0, mu, c_mu)
        diag.per_step_norms = tuple((rec.sup_n_plus, rec.sup_n_minus) for rec in records)

    result = FactorizationResult(
        grid=grid,
        profile=profile,
        strategy_name=getattr(strat, "name", type(strat).__name__),
        order=order,
        order_reached=order_reached,
        h_minus=h_minus,
        h_plus=h_plus,
        lambda_factor=lambda_factor,
        residual_sup=0.0,
        steps=records,
        diagnostics=diag,
        lambda0=lambda0,
        m0=m0,
    )
    result.residual_sup = result.residual_sup_at(refine_check)
    return result


def check_factor_conditions(result: FactorizationResult, k: Optional[int] = None) -> FactorConditionReport:
    """Defects of the two normalization conditions plus node-wise invertibility.

    Columns q < k of h-(-i) are unit vectors by the column structure of the
    assembled series (checked through the off-line evaluator); the product
    h-(inf) h+(inf) equals I only up to the truncation order, so its defect
    is reported as a magnitude with a sanity flag rather than a tolerance.
    """
    if k is None:
        k = result.profile.k
    n = result.profile.n
    hm_at = result.evaluate_h_minus(-1j)
    unit_defect = 0.0
    if k:
        diff = hm_at[:, :k] - np.eye(n, dtype=complex)[:, :k]
        unit_defect = float(np.abs(diff).max())
    prod = result.h_minus_infinity() @ result.h_plus_infinity()
    inf_defect = float(matrix_norm(prod - np.eye(n)))
    det_hm = np.abs(np.linalg.det(result.h_minus.samples))
    det_hp = np.abs(np.linalg.det(result.h_plus.samples))
    return FactorConditionReport(
        unit_column_defect=unit_defect,
        unit_columns_ok=bool(unit_defect < 1e-8),
        infinity_product_defect=inf_defect,
        infinity_product_ok=bool(inf_defect < 1.0),
        min_abs_det_h_minus=float(det_hm.min()),
        min_abs_det_h_plus=float(det_hp.min()),
    )
