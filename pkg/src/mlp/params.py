"""MLP parameter container: FC1 -> BN1 -> FC2 -> BN2 -> FC3."""

from dataclasses import dataclass, fields

import numpy as np

# Declaration order; the checkpoint codec writes tensors in this order.
PARAM_NAMES = (
    "w1", "b1", "gamma1", "beta1", "mean1", "var1",
    "w2", "b2", "gamma2", "beta2", "mean2", "var2",
    "w3", "b3",
)
TRAINABLE = ("w1", "b1", "gamma1", "beta1", "w2", "b2", "gamma2", "beta2", "w3", "b3")
RUNNING_STATS = ("mean1", "var1", "mean2", "var2")


@dataclass(eq=False)
class MlpParams:
    """Weights, BN affine terms and BN running statistics of the 3-layer MLP.

    Also used as the gradient container, in which case the running-stat
    fields hold zeros.
    """
    w1: np.ndarray
    b1: np.ndarray
    gamma1: np.ndarray
    beta1: np.ndarray
    mean1: np.ndarray
    var1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    gamma2: np.ndarray
    beta2: np.ndarray
    mean2: np.ndarray
    var2: np.ndarray
    w3: np.ndarray
    b3: np.ndarray

    @property
    def input_dim(self) -> int:
        return int(self.w1.shape[0])

    @property
    def hidden_dim(self) -> int:
        return int(self.w1.shape[1])

    @property
    def n_classes(self) -> int:
        return int(self.w3.shape[1])

    def tensors(self) -> list[tuple[str, np.ndarray]]:
        return [(name, getattr(self, name)) for name in PARAM_NAMES]

    def copy(self) -> "MlpParams":
        return MlpParams(**{f.name: getattr(self, f.name).copy() for f in fields(self)})

    def zeros_like(self) -> "MlpParams":
        return MlpParams(**{f.name: np.zeros_like(getattr(self, f.name)) for f in fields(self)})

    def equals(self, other: "MlpParams") -> bool:
        """Bitwise equality of every tensor."""
        return all(np.array_equal(a, b) for (_, a), (_, b) in zip(self.tensors(), other.tensors()))

    def is_valid(self) -> bool:
        finite = all(np.all(np.isfinite(t)) for _, t in self.tensors())
        return finite and bool(np.all(self.var1 > 0)) and bool(np.all(self.var2 > 0)) and self.n_classes >= 2

    @classmethod
    def zeros(cls, input_dim: int, hidden_dim: int, n_classes: int) -> "MlpParams":
        """All weights and biases zero; BN scale 1, shift 0, running mean 0, var 1."""
        return cls(
            w1=np.zeros((input_dim, hidden_dim)), b1=np.zeros(hidden_dim),
            gamma1=np.ones(hidden_dim), beta1=np.zeros(hidden_dim),
            mean1=np.zeros(hidden_dim), var1=np.ones(hidden_dim),
            w2=np.zeros((hidden_dim, hidden_dim)), b2=np.zeros(hidden_dim),
            gamma2=np.ones(hidden_dim), beta2=np.zeros(hidden_dim),
            mean2=np.zeros(hidden_dim), var2=np.ones(hidden_dim),
            w3=np.zeros((hidden_dim, n_classes)), b3=np.zeros(n_classes),
        )

    @classmethod
    def init(cls, input_dim: int, hidden_dim: int, n_classes: int,
             rng: np.random.Generator) -> "MlpParams":
        """He-uniform weights scaled by fan-in, zero biases, identity BN."""
        params = cls.zeros(input_dim, hidden_dim, n_classes)
        for name, fan_in, shape in (
            ("w1", input_dim, (input_dim, hidden_dim)),
            ("w2", hidden_dim, (hidden_dim, hidden_dim)),
            ("w3", hidden_dim, (hidden_dim, n_classes)),
        ):
            limit = np.sqrt(6.0 / fan_in)
            setattr(params, name, rng.uniform(-limit, limit, size=shape))
        return params
