"""A 2x2 oscillatory family with every quantity available in closed form.

The base matrix F factors through constant matrices as F = F- diag(w, 1) F+
with w = (x-i)/(x+i), so its partial indices are (1, 0) and the perturbed
target reduces to G1 = diag(w, 1) + M0 where M0 carries e^(+-i phi x)
oscillations and vanishes at x = 0 and at infinity for every phi. The
additive split M0 = M0+ + M0- is explicit, which pins the whole first
step of the scheme in closed form:

    N1+ = (Lambda0+)^(-1) (M0+ - C0),   N1- = M0- + C0,

admissible for any C0 sharing its first row with M0+(i) = psi * B0,
psi = e^(-phi) - 1. Four such constants (B0..B3 below, scaled by psi) give
first remainders M1 = -N1- N1+ with markedly different behavior at
infinity, all predicted by M1(inf) = C0^2.

This module is the library's ground truth: closed forms are exact, so the
quadrature path can be cross-checked against them route by route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import cauchy, rbvp
from .evaluators import ClosedForm, Term
from .grid import MobiusGrid, SampledMatrixFunction, sample

_DEN = (1j, 1.0)  # x + i, ascending

F_PLUS = np.array([[2.0, 1.0], [1.0, 1.0]])
F_MINUS = np.array([[1.0, -1.0], [-1.0, 2.0]])

B_MATRICES = (
    np.array([[4.0, -6.0], [3.0, -4.0]]),
    np.array([[4.0, -6.0], [0.0, 0.0]]),
    np.array([[4.0, -6.0], [0.0, 4.0]]),
    np.array([[4.0, -6.0], [8.0 / 3.0, -4.0]]),
)


@dataclass(eq=False)
class ExampleInstance:
    phi: float
    psi: float
    F: ClosedForm
    F_minus: ClosedForm
    F_plus: ClosedForm
    Lambda0: ClosedForm
    G_phi: ClosedForm
    G1: ClosedForm
    M0: ClosedForm
    M0_plus: ClosedForm
    M0_minus: ClosedForm


def build_example(phi: float) -> ExampleInstance:
    """All closed forms of the family at one parameter value.

    phi = 0 collapses every oscillatory numerator to zero, leaving M0
    identically zero and G_phi equal to the base matrix F.
    """
    phi = float(phi)
    psi = math.expm1(-phi)  # e^(-phi) - 1
    d = math.exp(-phi)

    # minus part: g * [[1, -1], [1, -1]], g = 4i (e^(-i phi x) - e^(-phi)) / (x + i);
    # the numerator vanishes at x = -i, so g continues into the lower half-plane
    g_terms = (Term((4j,), _DEN, -phi), Term((-4j * d,), _DEN))
    neg_g = tuple(t.scaled(-1) for t in g_terms)
    m0_minus = ClosedForm([[g_terms, neg_g], [g_terms, neg_g]])

    # plus part: (2i/(x+i)) (a + b e^(i phi x) + c e^(-phi)) entry-wise
    def pcell(a, b, c):
        return (Term((2j * (a + c * d),), _DEN), Term((2j * b,), _DEN, phi))

    m0_plus = ClosedForm(
        [
            [pcell(-4, 2, 2), pcell(6, -4, -2)],
            [pcell(-3, 1, 2), pcell(4, -2, -2)],
        ]
    )

    m0 = m0_plus + m0_minus
    lambda0 = ClosedForm.mobius_power_diag((1, 0))
    g1 = lambda0 + m0
    f_plus = ClosedForm.constant(F_PLUS)
    f_minus = ClosedForm.constant(F_MINUS)
    return ExampleInstance(
        phi=phi,
        psi=psi,
        F=f_minus @ lambda0 @ f_plus,
        F_minus=f_minus,
        F_plus=f_plus,
        Lambda0=lambda0,
        G_phi=f_minus @ g1 @ f_plus,
        G1=g1,
        M0=m0,
        M0_plus=m0_plus,
        M0_minus=m0_minus,
    )


@dataclass(frozen=True)
class VariantSpec:
    id: int
    phi: float
    c0: np.ndarray
    predicted_M1_infinity: np.ndarray


def variant_constant(variant_id: int, phi: float) -> VariantSpec:
    """C0 = psi * B_id and the squared prediction for M1 at infinity."""
    variant_id = int(variant_id)
    if not 0 <= variant_id < len(B_MATRICES):
        raise ValueError(f"variant must be one of 0..{len(B_MATRICES) - 1}, got {variant_id}")
    psi = math.expm1(-float(phi))
    c0 = (psi * B_MATRICES[variant_id]).astype(complex)
    return VariantSpec(
        id=variant_id,
        phi=float(phi),
        c0=c0,
        predicted_M1_infinity=c0 @ c0,
    )


# Grid the route cross-check runs on.  The spectral tail of the example
# densities folds into every node of a coarse grid, so the check needs a
# fine one regardless of the grid the caller wants samples on; 2**19 nodes
# push the median route disagreement below 1e-6 for phi <= 1.
_CHECK_GRID_N = 1 << 19
_check_grid: Optional[MobiusGrid] = None
_checked_phis: set = set()


def _cross_check_routes(instance: ExampleInstance, e_full: np.ndarray,
                        c0: np.ndarray) -> None:
    """Compare the generic step solver against the closed-form split.

    A convention fault (wrong Plemelj sign, misplaced constant, wrong row
    scaling) offsets the two routes by O(phi) at essentially every node.
    Discretization noise is different: it is a folded spectral tail, small
    in median but with slowly decaying outliers. The gate therefore bounds
    the median node-wise gap by 1e-6 on a fixed fine grid; the result is
    cached per phi since the gap does not depend on the variant constant
    (both routes carry it exactly).
    """
    global _check_grid
    if instance.phi in _checked_phis:
        return
    if _check_grid is None:
        _check_grid = MobiusGrid.build(_CHECK_GRID_N)
    g = _check_grid
    sol_q = rbvp.solve_step(sample(instance.Lambda0, g), sample(instance.M0, g),
                            e_full[1:, :])
    n1p_cf = ClosedForm.mobius_power_diag((-1, 0)) @ (instance.M0_plus - ClosedForm.constant(c0))
    n1m_cf = instance.M0_minus + ClosedForm.constant(c0)
    gap = np.maximum(
        np.abs(sol_q.n_plus.samples - sample(n1p_cf, g).samples).max(axis=(1, 2)),
        np.abs(sol_q.n_minus.samples - sample(n1m_cf, g).samples).max(axis=(1, 2)),
    )
    median = float(np.median(gap))
    if median > 1e-6:
        raise ValueError(
            "closed-form and quadrature factor routes disagree "
            f"(median gap {median:.3g} above 1e-6 on {g.n_points} nodes): "
            "quadrature/convention fault"
        )
    _checked_phis.add(instance.phi)


def first_step_factors(
    instance: ExampleInstance,
    variant: VariantSpec,
    grid: Optional[MobiusGrid] = None,
    cross_check: bool = True,
) -> rbvp.StepSolution:
    """First factor terms from the closed-form split, with a quadrature cross-check.

    The returned samples and closed forms come from the exact route; the
    equivalent canonical free constant E = C0 - psi*B0 (first row zero by the
    shared-row structure) feeds the generic step solver, and the two routes
    must agree. Agreement is judged on an internal fine grid by the median
    node-wise gap, which isolates convention faults from the folded spectral
    tail of the discrete split; see _cross_check_routes. Infinity data on the
    returned solution is exact.
    """
    if grid is None:
        grid = MobiusGrid.build(2048)
    if not math.isclose(instance.phi, variant.phi, rel_tol=0.0, abs_tol=1e-14):
        raise ValueError(
            f"instance (phi={instance.phi}) and variant (phi={variant.phi}) disagree"
        )
    c0 = variant.c0
    psi_b0 = (instance.psi * B_MATRICES[0]).astype(complex)
    e_full = c0 - psi_b0  # canonical-frame constant; row 0 is exactly zero

    if cross_check:
        _cross_check_routes(instance, e_full, c0)

    n1p_cf = ClosedForm.mobius_power_diag((-1, 0)) @ (instance.M0_plus - ClosedForm.constant(c0))
    n1m_cf = instance.M0_minus + ClosedForm.constant(c0)
    n_plus = sample(n1p_cf, grid)
    n_minus = sample(n1m_cf, grid)

    m0_smf = sample(instance.M0, grid)

    kappas = np.array([1, 0])
    plus_sum = -psi_b0  # exact plus-part value at infinity of the split density
    hp_plus = cauchy.HalfPlaneFunction(
        "upper", n_plus, m0_smf, -e_full, sign=1, row_powers=kappas
    )
    hp_minus = cauchy.HalfPlaneFunction("lower", n_minus, m0_smf, e_full, sign=-1)
    return rbvp.StepSolution(
        n_plus=n_plus,
        n_minus=n_minus,
        constant_used=e_full,
        kappas=kappas,
        hp_plus=hp_plus,
        hp_minus=hp_minus,
        c0=cauchy.zeroth_mode(m0_smf.samples),
        plus_sum=plus_sum,
        limit=np.zeros((2, 2), dtype=complex),
    )


FIGURE_COLUMNS = (
    "variant",
    "phi",
    "x",
    "p",
    "q",
    "re_norm",
    "im_norm",
    "abs_norm",
    "x_abs_norm",
)


def first_remainder(variant_id: int, phi: float, grid: MobiusGrid,
                    cross_check: bool = True) -> SampledMatrixFunction:
    """M1 = -N1- N1+ on the grid, carried with its closed form."""
    inst = build_example(phi)
    vs = variant_constant(variant_id, phi)
    sol = first_step_factors(inst, vs, grid, cross_check=cross_check)
    return -(sol.n_minus @ sol.n_plus)


def figure_data(variant: Union[int, VariantSpec], phis, grid: MobiusGrid,
                cross_check: bool = True):
    """Normalized first-remainder table.

    Returns (FIGURE_COLUMNS, rows) where each row is
    (variant, phi, x, p, q, Re m_pq/phi^2, Im m_pq/phi^2, |m_pq|/phi^2,
    x*|m_pq|/phi^2) with 1-based p, q; rows ordered by phi, then (p, q),
    then node.
    """
    vid = variant.id if isinstance(variant, VariantSpec) else int(variant)
    phis = [float(p) for p in phis]
    if not phis:
        raise ValueError("phis must be nonempty")
    if any(p <= 0 for p in phis):
        raise ValueError("each phi must be positive")
    x = grid.x_nodes
    blocks = []
    for phi in phis:
        m1 = first_remainder(vid, phi, grid, cross_check=cross_check)
        scaled = m1.samples / phi**2
        for p in range(2):
            for q in range(2):
                col = scaled[:, p, q]
                a = np.abs(col)
                blocks.append(
                    np.column_stack(
                        [
                            np.full(x.shape, float(vid)),
                            np.full(x.shape, phi),
                            x,
                            np.full(x.shape, float(p + 1)),
                            np.full(x.shape, float(q + 1)),
                            col.real,
                            col.imag,
                            a,
                            x * a,
                        ]
                    )
                )
    return FIGURE_COLUMNS, np.vstack(blocks)
