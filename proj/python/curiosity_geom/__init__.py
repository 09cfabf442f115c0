"""Information-geometric curiosity: divergences, occupancies and optima."""

from ._core import (
    ConvergenceError,
    FiniteMdp,
    alpha_divergence,
    alpha_information,
    augmented_stationary,
    beta_sweep_residual,
    closed_form_optimum,
    dpi_gap,
    geodesic,
    gibbs_distribution,
    kl_divergence,
    knn_density,
    natural_ascent,
    numerical_optimum,
    occupancy,
    renyi_divergence,
    rollout_return,
    shannon_entropy,
    sufficient,
    sweep_table,
    teleport_mdp,
    teleport_optimum,
    verify,
)

__all__ = [name for name in dir() if not name.startswith("_")]
