"""
Gradient oracles H(theta, x) and mean fields h(theta).

Model layer is responsible for this module.

All oracles accept batched inputs: ``theta`` has shape (..., d) and ``x`` has shape
(..., m) with broadcastable leading axes, so one call advances every replica of a
sampler at once.
"""

from abc import ABC, abstractmethod
from enum import Enum
from typing import Callable, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from langmix.errors import ContractViolationError, DomainError

ArrayFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


class OracleFamily(str, Enum):
    """Oracle families selectable from configuration files."""

    QUADRATIC = "quadratic"
    IID_RHO = "iid-rho"
    CUSTOM = "custom"


class OracleConstants(BaseModel):
    """Structural constants of a gradient oracle."""

    model_config = ConfigDict(frozen=True)

    family: OracleFamily = Field(..., description="Oracle family")
    d: int = Field(..., description="Parameter dimension")
    m: int = Field(..., description="Data dimension")
    a: float = Field(..., description="Strong monotonicity constant")
    L1_per_coord: List[float] = Field(
        ..., description="Per-coordinate Lipschitz constants in theta"
    )
    L2_per_coord: List[float] = Field(..., description="Per-coordinate Lipschitz constants in x")
    L1: float = Field(..., description="Aggregated L1 = sum of per-coordinate constants")
    L2: float = Field(..., description="Aggregated L2 = sum of per-coordinate constants")
    H_star: float = Field(..., description="Sum of |H^i(theta*, 0)|")
    theta_star: List[float] = Field(..., description="Minimiser of U")
    rho: float = Field(default=0.0, description="Growth exponent (iid-rho family only)")


class GradientOracle(ABC):
    """Base class for gradient oracles.

    Subclasses implement :meth:`_H` (and :meth:`_h` when the mean field has a closed
    form). Instances are immutable after construction and safe to share across threads.
    """

    family: OracleFamily = OracleFamily.CUSTOM

    def __init__(
        self,
        d: int,
        m: int,
        theta_star: Sequence[float],
        a: float,
        L1_per_coord: Sequence[float],
        L2_per_coord: Sequence[float],
    ):
        """
        Initialize the oracle and derive H_star from H(theta*, 0).

        Args:
            d: Parameter dimension
            m: Data dimension
            theta_star: Minimiser of the potential
            a: Declared strong monotonicity constant
            L1_per_coord: Declared per-coordinate Lipschitz constants in theta
            L2_per_coord: Declared per-coordinate Lipschitz constants in x
        """
        if d < 1 or m < 1:
            raise DomainError(f"Dimensions must be positive, got d={d}, m={m}")
        self.d = int(d)
        self.m = int(m)
        self.theta_star = np.asarray(theta_star, dtype=float).reshape(self.d)
        self.theta_star.setflags(write=False)

        if a <= 0:
            raise DomainError(f"Strong monotonicity constant must be positive, got a={a}")
        self.a = float(a)

        self.L1_per_coord = np.asarray(L1_per_coord, dtype=float).reshape(self.d)
        self.L2_per_coord = np.asarray(L2_per_coord, dtype=float).reshape(self.d)
        if np.any(self.L1_per_coord <= 0):
            raise DomainError("L1 per-coordinate constants must be positive")
        if np.any(self.L2_per_coord < 0):
            raise DomainError("L2 per-coordinate constants must be nonnegative")

        # Always recomputed, never user-supplied.
        self.H_star = float(np.abs(self.H(self.theta_star, np.zeros(self.m))).sum())

    @property
    def L1(self) -> float:
        return float(self.L1_per_coord.sum())

    @property
    def L2(self) -> float:
        return float(self.L2_per_coord.sum())

    @property
    def has_closed_form_h(self) -> bool:
        return type(self)._h is not GradientOracle._h

    @property
    def lipschitz_in_data(self) -> bool:
        """True when Assumption-2 style global Lipschitz bounds in x apply."""
        return True

    @abstractmethod
    def _H(self, theta: np.ndarray, x: np.ndarray) -> np.ndarray:
        """Evaluate H on already validated, batched arrays."""

    def _h(self, theta: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def H(self, theta: np.ndarray, x: np.ndarray) -> np.ndarray:
        """Evaluate H(theta, x) after checking the trailing dimensions."""
        theta = np.asarray(theta, dtype=float)
        x = np.asarray(x, dtype=float)
        if theta.ndim == 0 and self.d == 1:
            theta = theta.reshape(1)
        if x.ndim == 0 and self.m == 1:
            x = x.reshape(1)
        if theta.shape[-1:] != (self.d,):
            raise ContractViolationError(
                f"theta has trailing dimension {theta.shape[-1:]} but oracle expects d={self.d}"
            )
        if x.shape[-1:] != (self.m,):
            raise ContractViolationError(
                f"x has trailing dimension {x.shape[-1:]} but oracle expects m={self.m}"
            )
        return self._H(theta, x)

    def h(self, theta: np.ndarray) -> np.ndarray:
        """Closed-form mean field h(theta) = E[H(theta, X)]."""
        theta = np.asarray(theta, dtype=float)
        if theta.ndim == 0 and self.d == 1:
            theta = theta.reshape(1)
        if theta.shape[-1:] != (self.d,):
            raise ContractViolationError(
                f"theta has trailing dimension {theta.shape[-1:]} but oracle expects d={self.d}"
            )
        return self._h(theta)

    def probe_directions(self) -> np.ndarray:
        """Deterministic unit directions used by the structural checks."""
        return np.eye(self.d)

    def constants(self) -> OracleConstants:
        return OracleConstants(
            family=self.family,
            d=self.d,
            m=self.m,
            a=self.a,
            L1_per_coord=self.L1_per_coord.tolist(),
            L2_per_coord=self.L2_per_coord.tolist(),
            L1=self.L1,
            L2=self.L2,
            H_star=self.H_star,
            theta_star=self.theta_star.tolist(),
            rho=getattr(self, "rho", 0.0),
        )


class QuadraticOracle(GradientOracle):
    """H(theta, x) = S(theta - theta*) + Bx with S symmetric positive definite."""

    family = OracleFamily.QUADRATIC

    def __init__(
        self,
        S: Sequence[Sequence[float]] | np.ndarray | float,
        theta_star: Optional[Sequence[float]] = None,
        B: Optional[Sequence[Sequence[float]] | np.ndarray | float] = None,
        m: Optional[int] = None,
        a: Optional[float] = None,
        L1_per_coord: Optional[Sequence[float]] = None,
    ):
        """
        Initialize a quadratic oracle.

        Args:
            S: Symmetric positive-definite d x d matrix (a scalar means d=1)
            theta_star: Minimiser, zeros by default
            B: d x m data loading matrix, zeros by default
            m: Data dimension when B is omitted (default 1)
            a: Declared monotonicity constant, smallest eigenvalue of S by default
            L1_per_coord: Declared L1 constants, row norms of S by default
        """
        S_arr = np.atleast_2d(np.asarray(S, dtype=float))
        if S_arr.shape[0] != S_arr.shape[1]:
            raise DomainError(f"S must be square, got shape {S_arr.shape}")
        if not np.allclose(S_arr, S_arr.T, atol=1e-12):
            raise DomainError("S must be symmetric")
        eigenvalues, eigenvectors = np.linalg.eigh(S_arr)
        if eigenvalues[0] <= 0:
            raise DomainError(f"S must be positive definite, smallest eigenvalue {eigenvalues[0]}")
        d = S_arr.shape[0]

        if B is None:
            B_arr = np.zeros((d, m or 1))
        else:
            B_arr = np.asarray(B, dtype=float)
            B_arr = B_arr.reshape(d, -1) if B_arr.ndim < 2 else B_arr
            if B_arr.shape[0] != d:
                raise DomainError(f"B must have {d} rows, got shape {B_arr.shape}")
            if m is not None and B_arr.shape[1] != m:
                raise DomainError(f"B has {B_arr.shape[1]} columns but m={m}")

        self.S = S_arr
        self.B = B_arr
        self.S.setflags(write=False)
        self.B.setflags(write=False)
        self.eigenvalues = eigenvalues
        self.eigenvectors = eigenvectors

        super().__init__(
            d=d,
            m=B_arr.shape[1],
            theta_star=np.zeros(d) if theta_star is None else theta_star,
            a=float(eigenvalues[0]) if a is None else a,
            L1_per_coord=(
                np.linalg.norm(S_arr, axis=1) if L1_per_coord is None else L1_per_coord
            ),
            L2_per_coord=np.linalg.norm(B_arr, axis=1),
        )

    def _H(self, theta: np.ndarray, x: np.ndarray) -> np.ndarray:
        return (theta - self.theta_star) @ self.S.T + x @ self.B.T

    def _h(self, theta: np.ndarray) -> np.ndarray:
        # Streams are centered, so E[BX] = 0.
        return (theta - self.theta_star) @ self.S.T

    def probe_directions(self) -> np.ndarray:
        rows = self.S / np.linalg.norm(self.S, axis=1, keepdims=True)
        return np.vstack([self.eigenvectors.T, np.eye(self.d), rows])

    @property
    def is_diagonal(self) -> bool:
        return bool(np.all(self.S == np.diag(np.diag(self.S))))


class IIDOracle(GradientOracle):
    """Oracle for the i.i.d. setting with local Lipschitz constants.

    ``||H(theta, x) - H(theta', x)|| <= L1 (1 + ||x||)^rho ||theta - theta'||``; the
    monotonicity constant ``a`` is the smallest eigenvalue of E[A(X_0)].
    """

    family = OracleFamily.CUSTOM

    def __init__(
        self,
        H: ArrayFn,
        d: int,
        m: int,
        theta_star: Sequence[float],
        rho: float,
        L1: float,
        L2: float,
        a: float,
        A_map: Optional[Callable[[np.ndarray], np.ndarray]] = None,
        h: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    ):
        if rho < 0:
            raise DomainError(f"Growth exponent rho must be nonnegative, got {rho}")
        self._H_fn = H
        self._h_fn = h
        self.rho = float(rho)
        self.A_map = A_map
        # Scalar local constants are spread evenly so the aggregated sums equal L1 and L2.
        super().__init__(
            d=d,
            m=m,
            theta_star=theta_star,
            a=a,
            L1_per_coord=np.full(d, L1 / d),
            L2_per_coord=np.full(d, L2 / d),
        )

    @property
    def has_closed_form_h(self) -> bool:
        return self._h_fn is not None

    @property
    def lipschitz_in_data(self) -> bool:
        return False

    def _H(self, theta: np.ndarray, x: np.ndarray) -> np.ndarray:
        return np.asarray(self._H_fn(theta, x), dtype=float)

    def _h(self, theta: np.ndarray) -> np.ndarray:
        if self._h_fn is None:
            raise NotImplementedError
        return np.asarray(self._h_fn(theta), dtype=float)

    def growth(self, x: np.ndarray) -> np.ndarray:
        """(1 + ||x||)^rho along the trailing axis."""
        return (1.0 + np.linalg.norm(x, axis=-1)) ** self.rho


class IIDRhoOracle(IIDOracle):
    """Built-in ``iid-rho`` family: H(theta, x) = s (1 + ||x||)^rho (theta - theta*) + Bx."""

    family = OracleFamily.IID_RHO

    def __init__(
        self,
        scale: float,
        rho: float,
        mean_growth: float,
        theta_star: Optional[Sequence[float]] = None,
        B: Optional[Sequence[Sequence[float]] | np.ndarray | float] = None,
        d: Optional[int] = None,
        m: int = 1,
    ):
        """
        Initialize the iid-rho oracle.

        Args:
            scale: Scale s > 0 of the matrix field A(x) = s (1 + ||x||)^rho I
            rho: Growth exponent
            mean_growth: E[(1 + ||X_0||)^rho] under the stream law (1 when rho = 0)
            theta_star: Minimiser, zeros by default
            B: d x m data loading matrix, zeros by default
            d: Parameter dimension when theta_star is omitted
            m: Data dimension when B is omitted
        """
        if scale <= 0:
            raise DomainError(f"scale must be positive, got {scale}")
        if theta_star is None:
            theta_star = np.zeros(d or 1)
        ts = np.asarray(theta_star, dtype=float).ravel()
        dim = ts.size
        B_arr = np.zeros((dim, m)) if B is None else np.asarray(B, dtype=float).reshape(dim, -1)
        self.scale = float(scale)
        self.B = B_arr
        self.B.setflags(write=False)
        self.mean_growth = float(mean_growth)
        b_norm = float(np.linalg.norm(B_arr, ord=2)) if B_arr.size else 0.0
        L2 = max(1.0, rho) * scale * (1.0 + float(np.linalg.norm(ts))) + b_norm

        super().__init__(
            H=self._evaluate,
            d=dim,
            m=B_arr.shape[1],
            theta_star=ts,
            rho=rho,
            L1=scale,
            L2=L2,
            a=scale * mean_growth,
            A_map=self._A,
            h=self._mean_field,
        )

    def _A(self, x: np.ndarray) -> np.ndarray:
        g = self.scale * (1.0 + np.linalg.norm(np.atleast_1d(x))) ** self.rho
        return g * np.eye(self.d)

    def _evaluate(self, theta: np.ndarray, x: np.ndarray) -> np.ndarray:
        g = self.scale * self.growth(x)[..., None]
        return g * (theta - self.theta_star) + x @ self.B.T

    def _mean_field(self, theta: np.ndarray) -> np.ndarray:
        return self.scale * self.mean_growth * (theta - self.theta_star)


class CallableOracle(GradientOracle):
    """Custom oracle registered through the library API."""

    def __init__(
        self,
        H: ArrayFn,
        d: int,
        m: int,
        theta_star: Sequence[float],
        a: float,
        L1_per_coord: Sequence[float],
        L2_per_coord: Sequence[float],
        h: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    ):
        self._H_fn = H
        self._h_fn = h
        super().__init__(d, m, theta_star, a, L1_per_coord, L2_per_coord)

    @property
    def has_closed_form_h(self) -> bool:
        return self._h_fn is not None

    def _H(self, theta: np.ndarray, x: np.ndarray) -> np.ndarray:
        return np.asarray(self._H_fn(theta, x), dtype=float)

    def _h(self, theta: np.ndarray) -> np.ndarray:
        if self._h_fn is None:
            raise NotImplementedError
        return np.asarray(self._h_fn(theta), dtype=float)
