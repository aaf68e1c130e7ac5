"""
Shallow adaptive network with fixed random encoders.

The hidden layer is a population of rectified-linear tuning curves.  Each
neuron has a unit-norm preferred direction (encoder) and an intercept drawn
uniformly from (-1, 1); gain and bias are chosen so the neuron starts firing
at its intercept and reaches rate 1 on the unit sphere along its encoder.
Only the linear output weights learn, by the delta rule.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

DEFAULT_INPUT_SCALES = (1.0, 1.0, 1.0, 1.0, 0.5, 0.5, 2.0, 2.0)


@dataclass(frozen=True)
class NetworkInput:
    v_x: float
    v_x_d: float
    v_y: float
    v_y_d: float
    phi: float
    phi_d: float
    phidot: float
    phidot_d: float

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.v_x, self.v_x_d, self.v_y, self.v_y_d, self.phi, self.phi_d, self.phidot, self.phidot_d],
            dtype=float,
        )


class AdaptiveNetwork:
    def __init__(
        self,
        encoders: np.ndarray,
        gains_alpha: np.ndarray,
        biases_b: np.ndarray,
        output_dim: int,
        gamma: float = 1e-4,
        input_scales: Sequence[float] | None = None,
        seed: int | None = None,
    ):
        self.encoders = np.asarray(encoders, dtype=float)
        self.n_hidden, self.input_dim = self.encoders.shape
        self.gains_alpha = np.asarray(gains_alpha, dtype=float)
        self.biases_b = np.asarray(biases_b, dtype=float)
        if self.gains_alpha.shape != (self.n_hidden,) or self.biases_b.shape != (self.n_hidden,):
            raise ValueError("gains and biases need one entry per hidden unit")
        if output_dim < 1:
            raise ValueError(f"output_dim must be >= 1, got {output_dim}")
        self.output_dim = int(output_dim)
        self.gamma = float(gamma)
        if input_scales is None:
            input_scales = DEFAULT_INPUT_SCALES[: self.input_dim]
        self.input_scales = np.asarray(input_scales, dtype=float)
        if self.input_scales.shape != (self.input_dim,) or np.any(self.input_scales <= 0):
            raise ValueError("input_scales must be positive, one per input")
        self.seed = seed
        self.W_out = np.zeros((self.n_hidden, self.output_dim))
        self.mask = np.zeros(self.output_dim, dtype=bool)

    @classmethod
    def create(
        cls,
        seed: int,
        n_hidden: int = 1000,
        input_dim: int = 8,
        output_dim: int = 1,
        gamma: float = 1e-4,
        input_scales: Sequence[float] | None = None,
    ) -> "AdaptiveNetwork":
        if n_hidden < 1 or input_dim < 1:
            raise ValueError(f"invalid network size: n_hidden={n_hidden}, input_dim={input_dim}")
        rng = np.random.default_rng(seed)
        enc = rng.standard_normal((n_hidden, input_dim))
        enc /= np.linalg.norm(enc, axis=1, keepdims=True)
        # open interval keeps 1 - xi away from zero
        xi = rng.uniform(-1.0, 1.0, n_hidden)
        xi = np.clip(xi, -1.0 + 1e-9, 1.0 - 1e-9)
        alpha = 1.0 / (1.0 - xi)
        bias = -xi / (1.0 - xi)
        return cls(enc, alpha, bias, output_dim, gamma, input_scales, seed)

    @property
    def intercepts(self) -> np.ndarray:
        return -self.biases_b / self.gains_alpha

    def _as_array(self, x) -> np.ndarray:
        arr = x.as_array() if isinstance(x, NetworkInput) else np.asarray(x, dtype=float)
        if arr.shape != (self.input_dim,):
            raise ValueError(f"expected {self.input_dim} inputs, got shape {arr.shape}")
        return arr

    def hidden(self, x) -> np.ndarray:
        x_norm = self._as_array(x) / self.input_scales
        return np.maximum(0.0, self.gains_alpha * (self.encoders @ x_norm) + self.biases_b)

    def forward_hidden(self, h: np.ndarray) -> np.ndarray:
        # column by column so identical columns give bitwise identical outputs
        out = np.array([float(np.dot(h, self.W_out[:, j])) for j in range(self.output_dim)])
        out[self.mask] = 0.0
        return out

    def forward(self, x) -> np.ndarray:
        return self.forward_hidden(self.hidden(x))

    def update(self, E, h: np.ndarray) -> None:
        """Delta rule on the output weights: dW[i, j] = -gamma * E[j] * h[i]."""
        E = np.broadcast_to(np.asarray(E, dtype=float), (self.output_dim,))
        h = np.asarray(h, dtype=float)
        if h.shape != (self.n_hidden,):
            raise ValueError(f"hidden vector has shape {h.shape}, expected ({self.n_hidden},)")
        for j in range(self.output_dim):
            if not self.mask[j] and E[j] != 0.0:
                self.W_out[:, j] += -self.gamma * E[j] * h

    def mask_channel(self, j: int, on: bool = True) -> None:
        if not 0 <= j < self.output_dim:
            raise IndexError(f"channel {j} out of range for {self.output_dim} outputs")
        self.mask[j] = bool(on)

    def column_norms(self) -> np.ndarray:
        return np.linalg.norm(self.W_out, axis=0)

    # -- snapshots ------------------------------------------------------------

    def header(self) -> dict:
        return {
            "n_hidden": self.n_hidden,
            "output_dim": self.output_dim,
            "input_dim": self.input_dim,
            "seed": self.seed,
            "gamma": self.gamma,
            "mask": [bool(m) for m in self.mask],
            "layout": "row-major W_out[n_hidden][output_dim]",
        }

    def write_snapshot(self, path: str | Path) -> None:
        path = Path(path)
        with path.open("w") as fh:
            fh.write("# " + json.dumps(self.header(), sort_keys=True) + "\n")
            for w in self.W_out.ravel(order="C"):
                fh.write(repr(float(w)) + "\n")


def read_snapshot(path: str | Path) -> tuple[dict, np.ndarray]:
    """Header and weight matrix from a file written by ``write_snapshot``."""
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("# "):
        raise ValueError(f"{path}: missing snapshot header")
    header = json.loads(lines[0][2:])
    flat = np.array([float(v) for v in lines[1:]])
    return header, flat.reshape(header["n_hidden"], header["output_dim"])
