"""Joint belief-propagation syndrome decoder for CSS code pairs.

Two binary Tanner graphs share the qubit set: rows of H_Z check the
x-component against target bits s, rows of H_X check the z-component
against target bits t.  The graphs are coupled through the correlated
depolarizing prior: because Y flips both components, the aggregated
check evidence about z reshapes the channel term for x and vice versa.

Message rules (flooding schedule, LLR convention L = ln(P(0)/P(1))):

* check -> variable:  tanh(m_c2v / 2) = (1 - 2 s_c) * prod over the
  other edges of tanh(m_v2c / 2), with inputs clipped to +/-llr_clip
  before the product and outputs clipped after;
* variable -> check:  m_v2c = lam + Lambda - m_c2v, where Lambda is
  the sum of all check messages into the variable on its own graph and
  lam is the coupled channel term
      lam_x = ln[(p_I + p_Z e^(-Lambda_z)) / (p_X + p_Y e^(-Lambda_z))]
  (symmetrically for z), evaluated with log-sum-exp;
* hard decision:  bit = 1 iff lam + Lambda < 0, ties to 0.

The decoder checks the recomputed syndrome after every hard decision,
starting from the prior-only decision before any message update, and
stops on match or after max_iterations rounds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import Syndrome, depolarizing_prior
from .codes import QuantumQcCode
from .gf2 import SparseBinaryMatrix

__all__ = ["DecoderConfig", "DecodeOutcome", "JointBpDecoder", "decode"]

# Keep atanh arguments away from +/-1; only binds for llr_clip > ~35.
_TANH_GUARD = 1.0 - 1e-15


@dataclass(frozen=True)
class DecoderConfig:
    max_iterations: int = 100
    llr_clip: float = 25.0
    damping: float = 0.0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.llr_clip > 0:
            raise ValueError("llr_clip must be positive")
        if not 0.0 <= self.damping < 1.0:
            raise ValueError("damping must be in [0, 1)")


@dataclass(frozen=True)
class DecodeOutcome:
    """Estimated error pair plus convergence data.

    converged is True only when the estimate reproduces the input
    syndrome exactly; iterations counts completed message-passing
    rounds (0 when the prior-only decision already matches).
    """

    x_hat: np.ndarray
    z_hat: np.ndarray
    converged: bool
    iterations: int


class _Graph:
    """Edge layout of one (J, L)-regular Tanner graph side."""

    def __init__(self, M: SparseBinaryMatrix):
        weights = M.row_weights()
        if M.rows == 0 or not np.all(weights == weights[0]):
            raise ValueError("decoder requires a row-regular check matrix")
        self.m = M.rows
        self.n = M.cols
        self.deg_check = int(weights[0])
        # Edge e = c * deg_check + k touches variable check_vars[c, k].
        self.check_vars = np.vstack(M.row_support).astype(np.int64)
        col_w = M.col_weights()
        if not np.all(col_w == col_w[0]):
            raise ValueError("decoder requires a column-regular check matrix")
        self.deg_var = int(col_w[0])
        order = np.argsort(self.check_vars.ravel(), kind="stable")
        self.var_edges = order.reshape(self.n, self.deg_var)

    def check_sums(self, bits: np.ndarray) -> np.ndarray:
        """Parity of each check over the current hard decision."""
        return np.bitwise_xor.reduce(bits[self.check_vars], axis=1)


class JointBpDecoder:
    """Reusable decoder instance for one (H_X, H_Z) pair.

    Workspace arrays are allocated once and reset per decode; a single
    instance is single-threaded, distinct instances share nothing
    mutable.
    """

    def __init__(self, h_x: SparseBinaryMatrix, h_z: SparseBinaryMatrix,
                 cfg: DecoderConfig | None = None):
        if h_x.cols != h_z.cols:
            raise ValueError("H_X and H_Z must have the same number of columns")
        self.cfg = cfg or DecoderConfig()
        self.n = h_x.cols
        # Graph "x" constrains the x-component (rows of H_Z), "z" the
        # z-component (rows of H_X).
        self.gx = _Graph(h_z)
        self.gz = _Graph(h_x)
        self._m_c2v_x = np.zeros((self.gx.m, self.gx.deg_check))
        self._m_c2v_z = np.zeros((self.gz.m, self.gz.deg_check))
        self._post_x = np.zeros(self.n)
        self._post_z = np.zeros(self.n)
        self._log_prior = None

    @classmethod
    def for_code(cls, code: QuantumQcCode,
                 cfg: DecoderConfig | None = None) -> "JointBpDecoder":
        return cls(code.h_x, code.h_z, cfg)

    def reset(self, p_d: float) -> None:
        """Clear messages and set the channel prior; leaves the decoder
        in its iteration-0 state (posterior = pure prior)."""
        self._reset_messages(p_d)
        self._update_posteriors()

    def _reset_messages(self, p_d: float) -> None:
        if not 0.0 <= p_d < 1.0:
            raise ValueError(f"decoder requires 0 <= p_d < 1, got {p_d}")
        prior = depolarizing_prior(p_d)
        with np.errstate(divide="ignore"):  # log(0) -> -inf is wanted
            self._log_prior = tuple(
                np.log(p) for p in (prior.p_ii, prior.p_x, prior.p_z, prior.p_y)
            )
        self._m_c2v_x.fill(0.0)
        self._m_c2v_z.fill(0.0)

    def _lambda_sums(self) -> tuple[np.ndarray, np.ndarray]:
        lam_sum_x = self._m_c2v_x.ravel()[self.gx.var_edges].sum(axis=1)
        lam_sum_z = self._m_c2v_z.ravel()[self.gz.var_edges].sum(axis=1)
        return lam_sum_x, lam_sum_z

    def _channel_terms(self, lam_sum_x, lam_sum_z) -> tuple[np.ndarray, np.ndarray]:
        ln_i, ln_x, ln_z, ln_y = self._log_prior
        chan_x = np.logaddexp(ln_i, ln_z - lam_sum_z) - np.logaddexp(
            ln_x, ln_y - lam_sum_z
        )
        chan_z = np.logaddexp(ln_i, ln_x - lam_sum_x) - np.logaddexp(
            ln_z, ln_y - lam_sum_x
        )
        return chan_x, chan_z

    def _update_posteriors(self) -> None:
        lam_sum_x, lam_sum_z = self._lambda_sums()
        chan_x, chan_z = self._channel_terms(lam_sum_x, lam_sum_z)
        clip = self.cfg.llr_clip
        np.clip(chan_x + lam_sum_x, -clip, clip, out=self._post_x)
        np.clip(chan_z + lam_sum_z, -clip, clip, out=self._post_z)

    def posterior_llrs(self) -> tuple[np.ndarray, np.ndarray]:
        """Hard-decision LLRs of the current iteration (clipped, finite)."""
        if self._log_prior is None:
            raise RuntimeError("decoder has no state; call reset() or decode() first")
        return self._post_x.copy(), self._post_z.copy()

    def _hard_decision(self) -> tuple[np.ndarray, np.ndarray]:
        return (
            (self._post_x < 0).astype(np.uint8),
            (self._post_z < 0).astype(np.uint8),
        )

    def _check_update(self, graph: _Graph, m_c2v, v2c, syn_sign) -> np.ndarray:
        clip = self.cfg.llr_clip
        t = np.tanh(np.clip(v2c, -clip, clip) / 2.0)
        d = graph.deg_check
        pre = np.ones_like(t)
        suf = np.ones_like(t)
        for k in range(1, d):
            pre[:, k] = pre[:, k - 1] * t[:, k - 1]
            suf[:, d - 1 - k] = suf[:, d - k] * t[:, d - k]
        excl = np.clip(pre * suf, -_TANH_GUARD, _TANH_GUARD)
        new = syn_sign[:, None] * 2.0 * np.arctanh(excl)
        np.clip(new, -clip, clip, out=new)
        if self.cfg.damping:
            new = (1.0 - self.cfg.damping) * new + self.cfg.damping * m_c2v
        return new

    def decode(self, syn: Syndrome, p_d: float) -> DecodeOutcome:
        """Estimate (x_hat, z_hat) from the syndrome pair.

        Args:
            syn: Observed (s, t); s must match H_Z's row count and t
                H_X's.
            p_d: Depolarizing rate the prior is built from, in (0, 1).
                p_d = 0 is degenerate: with a nonzero syndrome there is
                no prior mass on any explanation and the decoder
                returns unconverged immediately.

        Returns:
            DecodeOutcome; converged implies the recomputed syndrome
            equals the input.
        """
        s = np.asarray(syn.s, dtype=np.uint8)
        t = np.asarray(syn.t, dtype=np.uint8)
        if s.shape != (self.gx.m,):
            raise ValueError(f"s has length {s.shape}, expected {self.gx.m}")
        if t.shape != (self.gz.m,):
            raise ValueError(f"t has length {t.shape}, expected {self.gz.m}")

        self._reset_messages(p_d)
        clip = self.cfg.llr_clip
        sign_s = 1.0 - 2.0 * s.astype(np.float64)
        sign_t = 1.0 - 2.0 * t.astype(np.float64)

        for it in range(self.cfg.max_iterations + 1):
            lam_sum_x, lam_sum_z = self._lambda_sums()
            chan_x, chan_z = self._channel_terms(lam_sum_x, lam_sum_z)
            total_x = chan_x + lam_sum_x
            total_z = chan_z + lam_sum_z
            np.clip(total_x, -clip, clip, out=self._post_x)
            np.clip(total_z, -clip, clip, out=self._post_z)
            x_hat, z_hat = self._hard_decision()
            if np.array_equal(self.gx.check_sums(x_hat), s) and np.array_equal(
                self.gz.check_sums(z_hat), t
            ):
                return DecodeOutcome(
                    x_hat=x_hat, z_hat=z_hat, converged=True, iterations=it
                )
            if it == self.cfg.max_iterations or (p_d == 0.0 and it == 0):
                return DecodeOutcome(
                    x_hat=x_hat, z_hat=z_hat, converged=False, iterations=it
                )
            v2c_x = total_x[self.gx.check_vars] - self._m_c2v_x
            v2c_z = total_z[self.gz.check_vars] - self._m_c2v_z
            self._m_c2v_x = self._check_update(self.gx, self._m_c2v_x, v2c_x, sign_s)
            self._m_c2v_z = self._check_update(self.gz, self._m_c2v_z, v2c_z, sign_t)
        raise AssertionError("unreachable")


def decode(
    code: QuantumQcCode,
    syn: Syndrome,
    p_d: float,
    cfg: DecoderConfig | None = None,
) -> DecodeOutcome:
    """One-shot decode; builds a fresh :class:`JointBpDecoder` for the code."""
    return JointBpDecoder.for_code(code, cfg).decode(syn, p_d)
