"""
Randomized validation of declared structural constants.

Points are drawn uniformly from the box [-R, R]^d (parameters) and [-R, R]^m (data),
R = ``radius``. Deterministic probe pairs along ``oracle.probe_directions()`` are
added so that under-declared constants along extreme directions are caught.
"""

from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field

from langmix.errors import DomainError, UnsupportedOperationError
from langmix.model.oracles import GradientOracle, IIDOracle
from langmix.streams.rng import make_generator

_REL_TOL = 1e-9
MAX_WITNESSES = 25


class Violation(BaseModel):
    """One violated inequality with its witness."""

    kind: str = Field(..., description="monotonicity | lipschitz | local-lipschitz | psd | b2-alt")
    coordinate: Optional[int] = Field(
        None, description="Coordinate index for per-coordinate bounds"
    )
    lhs: float
    rhs: float
    theta: List[float]
    theta_prime: List[float]
    x: List[float]
    x_prime: List[float]


class StructuralReport(BaseModel):
    """Outcome of a randomized assumption check."""

    trials: int
    radius: float
    counts: Dict[str, int] = Field(default_factory=dict, description="Violations per kind")
    violations: List[Violation] = Field(
        default_factory=list, description=f"First {MAX_WITNESSES} witnesses"
    )

    @property
    def n_violations(self) -> int:
        return sum(self.counts.values())

    @property
    def passed(self) -> bool:
        return self.n_violations == 0


class _Collector:
    def __init__(self) -> None:
        self.counts: Dict[str, int] = {}
        self.violations: List[Violation] = []

    def add(
        self,
        kind: str,
        mask: np.ndarray,
        lhs: np.ndarray,
        rhs: np.ndarray,
        theta: np.ndarray,
        theta_p: np.ndarray,
        x: np.ndarray,
        x_p: np.ndarray,
        coordinate: Optional[int] = None,
    ) -> None:
        idx = np.flatnonzero(mask)
        if idx.size == 0:
            return
        self.counts[kind] = self.counts.get(kind, 0) + int(idx.size)
        for i in idx[: max(0, MAX_WITNESSES - len(self.violations))]:
            self.violations.append(
                Violation(
                    kind=kind,
                    coordinate=coordinate,
                    lhs=float(lhs[i]),
                    rhs=float(rhs[i]),
                    theta=theta[i].tolist(),
                    theta_prime=theta_p[i].tolist(),
                    x=x[i].tolist(),
                    x_prime=x_p[i].tolist(),
                )
            )


def _exceeds(lhs: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    return lhs > rhs + _REL_TOL * (1.0 + np.abs(rhs))


def _sample_pairs(
    oracle: GradientOracle, trials: int, seed: int, radius: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    rng = make_generator(seed)
    theta = rng.uniform(-radius, radius, size=(trials, oracle.d))
    theta_p = rng.uniform(-radius, radius, size=(trials, oracle.d))
    x = rng.uniform(-radius, radius, size=(trials, oracle.m))
    x_p = rng.uniform(-radius, radius, size=(trials, oracle.m))

    directions = oracle.probe_directions()
    base = rng.uniform(-radius, radius, size=(directions.shape[0], oracle.d))
    probe_x = rng.uniform(-radius, radius, size=(directions.shape[0], oracle.m))
    theta = np.vstack([theta, base])
    theta_p = np.vstack([theta_p, base + directions])
    x = np.vstack([x, probe_x])
    x_p = np.vstack([x_p, probe_x])
    return theta, theta_p, x, x_p


def check_structural_constants(
    oracle: GradientOracle, trials: int, seed: int, radius: float = 10.0
) -> StructuralReport:
    """
    Check strong monotonicity and the Lipschitz bounds on random pairs.

    For oracles with global Lipschitz constants the per-coordinate bound
    |H^i(theta,x) - H^i(theta',x')| <= L1^i ||theta-theta'|| + L2^i ||x-x'|| is checked on
    joint pairs, theta-only pairs (x' = x) and data-only pairs (theta' = theta). For
    i.i.d.-case oracles the local bound with growth (1 + ||x||)^rho and positive
    semi-definiteness of A(x) are checked instead.

    Args:
        oracle: Oracle under test
        trials: Number of random pairs (at least 1)
        seed: RNG seed
        radius: Half-width R of the sampling box

    Returns:
        StructuralReport; violations are data, not errors.
    """
    if trials < 1:
        raise DomainError(f"trials must be at least 1, got {trials}")

    theta, theta_p, x, x_p = _sample_pairs(oracle, trials, seed, radius)
    out = _Collector()

    delta = theta - theta_p
    dist2 = np.einsum("ij,ij->i", delta, delta)
    H_same_x = oracle.H(theta, x) - oracle.H(theta_p, x)
    monotone_lhs = np.einsum("ij,ij->i", delta, H_same_x)
    monotone_rhs = oracle.a * dist2
    out.add("monotonicity", _exceeds(monotone_rhs, monotone_lhs), monotone_lhs, monotone_rhs,
            theta, theta_p, x, x)

    if isinstance(oracle, IIDOracle):
        lhs = np.linalg.norm(H_same_x, axis=1)
        rhs = oracle.L1 * oracle.growth(x) * np.sqrt(dist2)
        out.add("local-lipschitz", _exceeds(lhs, rhs), lhs, rhs, theta, theta_p, x, x)
        if oracle.A_map is not None:
            min_eig = np.array([np.linalg.eigvalsh(oracle.A_map(xi)).min() for xi in x])
            out.add("psd", min_eig < -1e-10, -min_eig, np.zeros_like(min_eig),
                    theta, theta, x, x)
    else:
        pair_sets = [
            (theta, theta_p, x, x_p),
            (theta, theta_p, x, x),
            (theta, theta, x, x_p),
        ]
        for t1, t2, x1, x2 in pair_sets:
            diff = np.abs(oracle.H(t1, x1) - oracle.H(t2, x2))
            dt = np.linalg.norm(t1 - t2, axis=1)
            dx = np.linalg.norm(x1 - x2, axis=1)
            for i in range(oracle.d):
                rhs = oracle.L1_per_coord[i] * dt + oracle.L2_per_coord[i] * dx
                out.add("lipschitz", _exceeds(diff[:, i], rhs), diff[:, i], rhs,
                        t1, t2, x1, x2, coordinate=i)

    return StructuralReport(trials=trials, radius=radius, counts=out.counts,
                            violations=out.violations)


def b2_alt_check(
    oracle: GradientOracle, trials: int, seed: int, radius: float = 10.0
) -> StructuralReport:
    """
    Check <t-t', h(t)-h(t')> >= a_tilde ||t-t'||^2 + (a+L1)^{-1} ||h(t)-h(t')||^2.

    Requires a closed-form mean field.
    """
    if not oracle.has_closed_form_h:
        raise UnsupportedOperationError("b2_alt_check needs a closed-form mean field")
    if trials < 1:
        raise DomainError(f"trials must be at least 1, got {trials}")

    theta, theta_p, x, _ = _sample_pairs(oracle, trials, seed, radius)
    a, L1 = oracle.a, oracle.L1
    a_tilde = a * L1 / (a + L1)
    delta = theta - theta_p
    dh = oracle.h(theta) - oracle.h(theta_p)
    lhs = np.einsum("ij,ij->i", delta, dh)
    rhs = a_tilde * np.einsum("ij,ij->i", delta, delta) + np.einsum("ij,ij->i", dh, dh) / (a + L1)

    out = _Collector()
    out.add("b2-alt", _exceeds(rhs, lhs), lhs, rhs, theta, theta_p, x, x)
    return StructuralReport(trials=trials, radius=radius, counts=out.counts,
                            violations=out.violations)
