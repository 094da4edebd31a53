"""Expected winnings attributable to cheating (EWAC) and its sharp bounds.

The unknown is the joint probability mass function theta(i, j) of one fair
roll and one biased roll, constrained to the transportation polytope whose
row sums are the fair die and whose column sums are the biased die.  Given
smoothed state posteriors, the conditional expectation of the winnings a
gambler would have seen had the casino stayed fair is affine in theta, so
both extremes over the polytope are linear programs.
"""

from dataclasses import dataclass

import numpy as np

from casino_ewac.hmm import BIASED, FAIR, as_symbol_indices
from casino_ewac.transport import TransportProblem, solve

_UNIFORM_TOL = 1e-12
_PMF_ATOL = 1e-8

__all__ = [
    "EwacObjective",
    "EwacBounds",
    "InfeasibleMaskError",
    "ewac_objective",
    "validate_joint_pmf",
    "ewac_of_theta",
    "ewac_bounds",
    "pm_mask",
    "cs_mask",
    "greedy_column",
    "inhomogeneous_theta",
    "inhomogeneous_bounds",
    "copula_pmf",
    "naive_ewac",
    "stationary",
    "asymptotic_ewac_rate",
]


class InfeasibleMaskError(ValueError):
    """The forced-zero cells leave no joint PMF with the required marginals."""


@dataclass(frozen=True)
class EwacObjective:
    """Cached affine form of the EWAC as a function of theta.

    ewac(theta) = w_obs - fair_term - sum_ij coeff[i, j] * theta[i, j]

    where coeff[i, j] multiplies reward i by the total smoothed biased-state
    mass on periods that observed face j + 1, divided by the biased
    emission probability of that face.

    Attributes:
        w_obs: total observed winnings.
        fair_term: sum over periods of P(fair | obs) times the observed payoff.
        coeff: (K, K) objective coefficients.
        row_marginals: fair emission row (required row sums of theta).
        col_marginals: biased emission row (required column sums of theta).
    """

    w_obs: float
    fair_term: float
    coeff: np.ndarray
    row_marginals: np.ndarray
    col_marginals: np.ndarray

    @property
    def constant(self):
        return self.w_obs - self.fair_term


@dataclass(frozen=True)
class EwacBounds:
    """Lower and upper EWAC values with the optimising PMFs.

    ``theta_lb`` and ``theta_ub`` are None for the time-inhomogeneous
    relaxation, whose optimiser varies by period; see
    ``inhomogeneous_theta`` for the per-face matrices.  ``iterations``
    counts simplex pivots for the (lb, ub) solves.
    """

    lb: float
    ub: float
    theta_lb: np.ndarray | None
    theta_ub: np.ndarray | None
    constraint_tag: str = "none"
    iterations: tuple = (0, 0)


def ewac_objective(model, obs, delta):
    """Aggregate a smoothed posterior into the affine EWAC coefficients.

    Args:
        model: the hidden Markov model.
        obs: observation path, faces in 1..K.
        delta: (T, 2) smoothed posterior for the same model and path.

    Raises:
        ValueError: if a face with zero biased emission probability was
            observed; the counterfactual conditioning is undefined there.
    """
    o = as_symbol_indices(model, obs)
    delta = np.asarray(delta, dtype=float)
    if delta.shape != (o.size, 2):
        raise ValueError(
            f"delta must have shape ({o.size}, 2), got {delta.shape}")
    k = model.num_symbols
    w = model.rewards
    e_biased = model.emission[BIASED]

    observed = np.bincount(o, minlength=k) > 0
    conflict = observed & (e_biased == 0.0)
    if conflict.any():
        face = int(np.nonzero(conflict)[0][0]) + 1
        raise ValueError(
            f"face {face} was observed but has zero biased emission "
            "probability; cannot condition the biased roll on it")

    w_obs = float(w[o].sum())
    fair_term = float((delta[:, FAIR] * w[o]).sum())
    biased_mass = np.bincount(o, weights=delta[:, BIASED], minlength=k)
    factor = np.divide(biased_mass, e_biased,
                       out=np.zeros(k), where=e_biased > 0)
    return EwacObjective(w_obs=w_obs, fair_term=fair_term,
                         coeff=np.outer(w, factor),
                         row_marginals=model.emission[FAIR].copy(),
                         col_marginals=e_biased.copy())


def validate_joint_pmf(theta, row_marginals, col_marginals, atol=_PMF_ATOL):
    """Check membership of the transportation polytope, raising on failure."""
    theta = np.asarray(theta, dtype=float)
    k = len(row_marginals)
    if theta.shape != (k, k):
        raise ValueError(f"theta must have shape ({k}, {k}), got {theta.shape}")
    if theta.min() < -atol:
        raise ValueError(f"theta has a negative cell ({theta.min():.3e})")
    row_err = np.abs(theta.sum(axis=1) - row_marginals).max()
    col_err = np.abs(theta.sum(axis=0) - col_marginals).max()
    if max(row_err, col_err) > atol:
        raise ValueError(
            f"theta marginals are off by {max(row_err, col_err):.3e}")
    return theta


def ewac_of_theta(objective, theta, atol=_PMF_ATOL):
    """Evaluate the EWAC at one joint PMF."""
    theta = validate_joint_pmf(theta, objective.row_marginals,
                               objective.col_marginals, atol)
    return objective.constant - float(np.sum(objective.coeff * theta))


def ewac_bounds(objective, zero_mask=frozenset(), tag="none"):
    """Sharp EWAC bounds over the (optionally masked) polytope.

    The upper bound minimises the coefficient form, the lower bound
    maximises it; both optimisers are vertices and satisfy the mask
    exactly.

    Raises:
        InfeasibleMaskError: if the mask empties the polytope.
    """
    lo = solve(TransportProblem(costs=objective.coeff,
                                row_targets=objective.row_marginals,
                                col_targets=objective.col_marginals,
                                zero_mask=zero_mask, sense="min"))
    hi = solve(TransportProblem(costs=objective.coeff,
                                row_targets=objective.row_marginals,
                                col_targets=objective.col_marginals,
                                zero_mask=zero_mask, sense="max"))
    if lo.status != "optimal" or hi.status != "optimal":
        raise InfeasibleMaskError(
            f"constraint set {tag!r} ({len(zero_mask)} forced zeros) admits "
            "no joint PMF with the required marginals")
    return EwacBounds(lb=objective.constant - hi.value,
                      ub=objective.constant - lo.value,
                      theta_lb=hi.theta, theta_ub=lo.theta,
                      constraint_tag=tag,
                      iterations=(hi.iterations, lo.iterations))


def pm_mask(k):
    """Cells forced to zero when the biased roll never pays less than the
    fair roll of the same period: everything strictly below the diagonal."""
    return frozenset((i, j) for i in range(k) for j in range(i))


def cs_mask(emission):
    """Cells forced to zero when the cheat never moves probability toward a
    face the biased die makes no likelier.

    Valid only when the fair die is uniform, since the argument compares
    biased emission probabilities alone; a tie masks both ordered pairs.
    """
    emission = np.asarray(emission, dtype=float)
    k = emission.shape[1]
    fair = emission[FAIR]
    if np.abs(fair - 1.0 / k).max() > _UNIFORM_TOL:
        raise ValueError(
            "this constraint set requires a uniform fair die; row 0 of the "
            "emission matrix is not uniform")
    e_biased = emission[BIASED]
    return frozenset((i, j) for i in range(k) for j in range(k)
                     if i != j and e_biased[j] <= e_biased[i])


def _greedy_fill(caps, total, descending):
    col = np.zeros(len(caps))
    rem = total
    order = range(len(caps) - 1, -1, -1) if descending else range(len(caps))
    for i in order:
        col[i] = min(caps[i], rem)
        rem -= col[i]
        if rem <= 0.0:
            break
    return col


def greedy_column(model, face, sense):
    """Optimal single-period column for one observed face.

    With row capacities from the fair die and a column total equal to the
    biased probability of ``face``, the expected counterfactual payoff
    sum_i w_i theta[i, face] is maximised by filling rows from the highest
    payoff down and minimised by filling from the lowest payoff up (the
    payoffs are strictly increasing in i).  ``sense`` is "max" or "min".
    """
    if sense not in ("max", "min"):
        raise ValueError(f"sense must be 'max' or 'min', got {sense!r}")
    j = int(face) - 1
    k = model.num_symbols
    if not 0 <= j < k:
        raise ValueError(f"face must lie in 1..{k}, got {face}")
    return _greedy_fill(model.emission[FAIR], model.emission[BIASED, j],
                        sense == "max")


def inhomogeneous_theta(model, face, sense):
    """A full joint PMF whose ``face`` column is the greedy optimum.

    The free cells only have to complete the marginals; a north-west-corner
    fill over the remaining columns is used.  Other completions would be
    just as valid.
    """
    k = model.num_symbols
    j = int(face) - 1
    theta = np.zeros((k, k))
    theta[:, j] = greedy_column(model, face, sense)
    rem = model.emission[FAIR] - theta[:, j]
    for col in range(k):
        if col == j:
            continue
        need = model.emission[BIASED, col]
        for i in range(k):
            take = min(rem[i], need)
            theta[i, col] = take
            rem[i] -= take
            need -= take
            if need <= 0.0:
                break
    return theta


def inhomogeneous_bounds(objective):
    """EWAC bounds when each period may use its own joint PMF.

    Dropping the requirement that every period share one theta decouples
    the optimisation: periods observing the same face share a greedy
    column, so the extreme values come from evaluating the coefficient
    form at the stacked per-face greedy columns.  Always at least as wide
    as the time-homogeneous bounds.
    """
    k = len(objective.row_marginals)
    caps = objective.row_marginals
    best = np.column_stack([
        _greedy_fill(caps, objective.col_marginals[j], True) for j in range(k)])
    worst = np.column_stack([
        _greedy_fill(caps, objective.col_marginals[j], False) for j in range(k)])
    lb = objective.constant - float(np.sum(objective.coeff * best))
    ub = objective.constant - float(np.sum(objective.coeff * worst))
    return EwacBounds(lb=lb, ub=ub, theta_lb=None, theta_ub=None,
                      constraint_tag="inhomogeneous")


def copula_pmf(model, kind):
    """Benchmark joint PMFs built from the two marginal dice.

    ``kind`` selects the dependence structure: "independence" multiplies
    the marginals, "comonotonic" couples them through a common uniform
    (highest positive dependence), "countermonotonic" through opposed
    uniforms (lowest).  The last two discretise the classical Frechet
    bounds by differencing the joint CDF extremes.
    """
    e_fair = model.emission[FAIR]
    e_biased = model.emission[BIASED]
    if kind == "independence":
        return np.outer(e_fair, e_biased)
    cdf_fair = np.concatenate([[0.0], np.cumsum(e_fair)])
    cdf_biased = np.concatenate([[0.0], np.cumsum(e_biased)])
    cdf_fair[-1] = 1.0
    cdf_biased[-1] = 1.0
    if kind == "comonotonic":
        grid = np.minimum.outer(cdf_fair, cdf_biased)
    elif kind == "countermonotonic":
        grid = np.maximum(np.add.outer(cdf_fair, cdf_biased) - 1.0, 0.0)
    else:
        raise ValueError(
            "kind must be 'independence', 'comonotonic' or "
            f"'countermonotonic', got {kind!r}")
    theta = grid[1:, 1:] - grid[:-1, 1:] - grid[1:, :-1] + grid[:-1, :-1]
    if theta.min() < -1e-12:
        raise ArithmeticError(
            f"copula differencing went negative ({theta.min():.3e})")
    return np.maximum(theta, 0.0)


def naive_ewac(model, obs):
    """Observed winnings minus the unconditional fair expectation.

    Ignores the posterior entirely: every period is charged the mean fair
    payoff, so a lucky honest streak shows up as spurious cheating.
    """
    o = as_symbol_indices(model, obs)
    w = model.rewards
    return float(w[o].sum() - o.size * (w.sum() / model.num_symbols))


def stationary(model):
    """Stationary distribution of the hidden chain.

    Raises:
        ValueError: if the chain is the identity, where every distribution
            is stationary.
    """
    q = model.transition
    off = q[FAIR, BIASED] + q[BIASED, FAIR]
    if off == 0.0:
        raise ValueError(
            "transition matrix is the identity; the stationary distribution "
            "is not unique")
    return np.array([q[BIASED, FAIR], q[FAIR, BIASED]]) / off


def asymptotic_ewac_rate(model):
    """Long-run EWAC per period under the stationary hidden chain.

    Each stationary-biased period contributes the gap between the biased
    and fair expected payoffs.
    """
    pi = stationary(model)
    w = model.rewards
    biased_mean = float(model.emission[BIASED] @ w)
    return pi[BIASED] * (biased_mean - w.sum() / model.num_symbols)
