"""Closed-loop rollout of the policy through the frozen surrogate, kept on the tape."""

from dataclasses import dataclass

import numpy as np

from ..autodiff import Tensor
from ..errors import SolverError
from ..numerics.trajectory import Trajectory
from ..numerics.types import Array
from ..surrogate.integrate import rk4_step
from ..surrogate.model import OperatorModel
from .policy import PolicyModel, ScenarioParams, policy_forward


@dataclass
class DifferentiableRollout:
    """States u_0..u_N (each (B, n_x)) and amplitudes a_0..a_{N−1} (each (B, n))."""

    states: list[Tensor]
    amplitudes: list[Tensor]
    dt_op: float

    @property
    def n_steps(self) -> int:
        return len(self.amplitudes)

    @property
    def batch_size(self) -> int:
        return self.states[0].shape[0]

    def state_array(self) -> Array:
        """Shape (B, N + 1, n_x)."""
        return np.stack([s.data for s in self.states], axis=1)

    def amplitude_array(self) -> Array:
        """Shape (B, N, n); (B, 0, 0) when N = 0."""
        if not self.amplitudes:
            return np.zeros((self.batch_size, 0, 0))
        return np.stack([a.data for a in self.amplitudes], axis=1)

    def to_trajectory(self, index: int = 0) -> Trajectory:
        amps = self.amplitude_array()[index]
        return Trajectory(fields=self.state_array()[index], amplitudes=amps, dt=self.dt_op)


def dpc_rollout(
    policy: PolicyModel,
    operator: OperatorModel,
    u0: Array,
    scen: ScenarioParams,
    n_steps: int,
    dt_op: float,
) -> DifferentiableRollout:
    """u_{k+1} = RK4(G_θ)(u_k, π_W(u_k, ξ)) for k < n_steps.

    ``u0`` is (B, n_x) or (n_x,); a single state is treated as a batch of one.

    Raises:
        ValueError: The operator is not frozen.
        SolverError: Divergence, annotated with the failing step.
    """
    if not operator.frozen:
        raise ValueError("dpc_rollout needs a frozen operator; call operator.freeze() first")
    u0 = np.asarray(u0, dtype=np.float64)
    if u0.ndim == 1:
        u0 = u0[None, :]
        scen = ScenarioParams(
            target=None if scen.target is None else np.atleast_2d(scen.target),
            extra=None if scen.extra is None else np.atleast_2d(scen.extra),
        )

    u = Tensor(u0)
    states = [u]
    amplitudes: list[Tensor] = []
    for k in range(n_steps):
        a = policy_forward(policy, u, scen)
        try:
            u = rk4_step(operator, u, a, dt_op)
        except SolverError as exc:
            raise exc.at_step(k) from exc
        amplitudes.append(a)
        states.append(u)
    return DifferentiableRollout(states=states, amplitudes=amplitudes, dt_op=dt_op)
