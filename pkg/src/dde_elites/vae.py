"""Minimal variational autoencoder on plain numpy.

One hidden tanh layer on each side, logistic output so decoded genomes stay
in (0,1). Training minimizes squared reconstruction error plus the closed
form KL divergence of the latent posterior from a unit Gaussian, with
gradients derived by hand and applied through Adam. The decoder doubles as
a learned genotype encoding: searching its latent space explores the
distribution of solutions the model was trained on.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DecoderFormatError

ADAM_STEP = 1e-3
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8

# Training weights squared reconstruction error against the KL regularizer.
# Archive elites occupy a sliver of genome space (total gene variance well
# under 0.1), so at unit weight the KL cost of any latent information
# exceeds the reconstruction payoff and the posterior collapses to the
# prior; this factor restores an informative, still-regularized latent.
DEFAULT_RECON_WEIGHT = 1000.0

DECODER_FORMAT_VERSION = 1

_PARAM_NAMES = (
    "enc_w1", "enc_b1", "enc_w_mu", "enc_b_mu", "enc_w_lv", "enc_b_lv",
    "dec_w1", "dec_b1", "dec_w2", "dec_b2",
)


def _sigmoid(a: np.ndarray) -> np.ndarray:
    out = np.empty_like(a)
    pos = a >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-a[pos]))
    ea = np.exp(a[~pos])
    out[~pos] = ea / (1.0 + ea)
    return out


@dataclass(frozen=True)
class TrainReport:
    """Per-sample means: the loss fields are the training objective
    (recon_weight * recon + kl); recon_term and kl_term are unweighted."""

    epochs: int
    initial_loss: float
    final_loss: float
    recon_term: float
    kl_term: float


@dataclass(frozen=True)
class DecoderNet:
    """Stand-alone decoder: latent vector -> genome in (0,1)^output_dim."""

    latent_dim: int
    hidden_dim: int
    output_dim: int
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray

    def decode(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if z.shape != (self.latent_dim,):
            raise ValueError(f"latent vector has shape {z.shape}, expected ({self.latent_dim},)")
        return _sigmoid(self.w2 @ np.tanh(self.w1 @ z + self.b1) + self.b2)

    def decode_batch(self, zs: np.ndarray) -> np.ndarray:
        zs = np.asarray(zs, dtype=float)
        if zs.ndim != 2 or zs.shape[1] != self.latent_dim:
            raise ValueError(f"latent batch has shape {zs.shape}, expected (m, {self.latent_dim})")
        return _sigmoid(np.tanh(zs @ self.w1.T + self.b1) @ self.w2.T + self.b2)

    def save(self, path: str | Path) -> None:
        np.savez(
            path,
            format_version=np.array(DECODER_FORMAT_VERSION),
            latent_dim=np.array(self.latent_dim),
            hidden_dim=np.array(self.hidden_dim),
            output_dim=np.array(self.output_dim),
            w1=self.w1, b1=self.b1, w2=self.w2, b2=self.b2,
        )


def load_decoder(path: str | Path) -> DecoderNet:
    """Load a decoder file, validating every field and shape."""
    try:
        with np.load(path) as data:
            fields = {name: data[name] for name in data.files}
    except Exception as exc:
        raise DecoderFormatError(f"unreadable decoder file {path}: {exc}") from exc
    for name in ("format_version", "latent_dim", "hidden_dim", "output_dim",
                 "w1", "b1", "w2", "b2"):
        if name not in fields:
            raise DecoderFormatError(f"decoder file missing field {name!r}")
    version = int(fields["format_version"])
    if version != DECODER_FORMAT_VERSION:
        raise DecoderFormatError(f"unsupported decoder format_version {version}")
    d = int(fields["latent_dim"])
    h = int(fields["hidden_dim"])
    n = int(fields["output_dim"])
    shapes = {"w1": (h, d), "b1": (h,), "w2": (n, h), "b2": (n,)}
    for name, want in shapes.items():
        got = fields[name].shape
        if got != want:
            raise DecoderFormatError(f"decoder field {name!r} has shape {got}, expected {want}")
        if not np.all(np.isfinite(fields[name])):
            raise DecoderFormatError(f"decoder field {name!r} contains non-finite values")
    return DecoderNet(d, h, n, fields["w1"], fields["b1"], fields["w2"], fields["b2"])


class VaeModel:
    """Encoder/decoder MLP pair with hand-rolled training.

    Weight layout: encoder input->hidden (tanh), hidden->mu and
    hidden->logvar heads; decoder latent->hidden (tanh), hidden->output
    (logistic). All parameters live in `self.params`, keyed by the names in
    `_PARAM_NAMES`; Adam moments persist across train() calls so repeated
    training continues warm.
    """

    def __init__(self, input_dim: int, latent_dim: int, hidden_dim: int = 128,
                 seed: int = 0, recon_weight: float = DEFAULT_RECON_WEIGHT):
        self.input_dim = int(input_dim)
        self.latent_dim = int(latent_dim)
        self.hidden_dim = int(hidden_dim)
        if recon_weight <= 0:
            raise ValueError(f"recon_weight must be strictly positive, got {recon_weight}")
        self.recon_weight = float(recon_weight)
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), 2]))
        n, d, h = self.input_dim, self.latent_dim, self.hidden_dim

        def init(rows, cols):
            bound = 1.0 / np.sqrt(cols)
            return rng.uniform(-bound, bound, size=(rows, cols))

        self.params: dict[str, np.ndarray] = {
            "enc_w1": init(h, n), "enc_b1": np.zeros(h),
            "enc_w_mu": init(d, h), "enc_b_mu": np.zeros(d),
            "enc_w_lv": init(d, h), "enc_b_lv": np.zeros(d),
            "dec_w1": init(h, d), "dec_b1": np.zeros(h),
            "dec_w2": init(n, h), "dec_b2": np.zeros(n),
        }
        self._adam_m = {k: np.zeros_like(v) for k, v in self.params.items()}
        self._adam_v = {k: np.zeros_like(v) for k, v in self.params.items()}
        self._adam_t = 0

    # ---------------------------------------------------------------- forward

    def _check_input(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.input_dim,):
            raise ValueError(f"input has shape {x.shape}, expected ({self.input_dim},)")
        return x

    def encode(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Posterior parameters (mu, logvar) for one genome."""
        x = self._check_input(x)
        p = self.params
        h1 = np.tanh(p["enc_w1"] @ x + p["enc_b1"])
        return p["enc_w_mu"] @ h1 + p["enc_b_mu"], p["enc_w_lv"] @ h1 + p["enc_b_lv"]

    def decode(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if z.shape != (self.latent_dim,):
            raise ValueError(f"latent vector has shape {z.shape}, expected ({self.latent_dim},)")
        p = self.params
        return _sigmoid(p["dec_w2"] @ np.tanh(p["dec_w1"] @ z + p["dec_b1"]) + p["dec_b2"])

    def reconstruct(self, x: np.ndarray) -> np.ndarray:
        """Deterministic reconstruction through the mean latent (no sampling)."""
        mu, _ = self.encode(x)
        return self.decode(mu)

    def reconstruct_batch(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        p = self.params
        h1 = np.tanh(xs @ p["enc_w1"].T + p["enc_b1"])
        mu = h1 @ p["enc_w_mu"].T + p["enc_b_mu"]
        return _sigmoid(np.tanh(mu @ p["dec_w1"].T + p["dec_b1"]) @ p["dec_w2"].T + p["dec_b2"])

    def decoder(self, whitening_data: np.ndarray | None = None) -> DecoderNet:
        """Detached copy of the decoder half.

        With `whitening_data` (genomes), an affine map is folded into the
        first layer so that standard-normal latents land on the data's
        posterior-mean distribution: decode'(z) = decode(mean + L z) with
        L the Cholesky factor of the posterior means' covariance. The
        exported net then honors the "latents ~ N(0, I)" convention its
        consumers assume, regardless of how the training run shaped the
        latent space.
        """
        p = self.params
        w1, b1 = p["dec_w1"].copy(), p["dec_b1"].copy()
        if whitening_data is not None:
            xs = np.asarray(whitening_data, dtype=float)
            if xs.ndim != 2 or xs.shape[1] != self.input_dim or len(xs) < 2:
                raise ValueError(
                    f"whitening data must be (m>=2, {self.input_dim}), got {xs.shape}"
                )
            h1 = np.tanh(xs @ p["enc_w1"].T + p["enc_b1"])
            mus = h1 @ p["enc_w_mu"].T + p["enc_b_mu"]
            center = mus.mean(axis=0)
            cov = np.cov(mus.T).reshape(self.latent_dim, self.latent_dim)
            jitter = 1e-9 * max(1.0, float(np.trace(cov)) / self.latent_dim)
            chol = np.linalg.cholesky(cov + jitter * np.eye(self.latent_dim))
            b1 = w1 @ center + b1
            w1 = w1 @ chol
        return DecoderNet(self.latent_dim, self.hidden_dim, self.input_dim,
                          w1, b1, p["dec_w2"].copy(), p["dec_b2"].copy())

    # ------------------------------------------------------------------- loss

    def _forward(self, xs: np.ndarray, eps: np.ndarray) -> dict[str, np.ndarray]:
        """Batched forward pass with pinned reparameterization noise."""
        p = self.params
        h1 = np.tanh(xs @ p["enc_w1"].T + p["enc_b1"])
        mu = h1 @ p["enc_w_mu"].T + p["enc_b_mu"]
        lv = h1 @ p["enc_w_lv"].T + p["enc_b_lv"]
        std = np.exp(0.5 * lv)
        z = mu + std * eps
        h2 = np.tanh(z @ p["dec_w1"].T + p["dec_b1"])
        xh = _sigmoid(h2 @ p["dec_w2"].T + p["dec_b2"])
        recon = ((xs - xh) ** 2).sum(axis=1)
        kl = 0.5 * (mu**2 + np.exp(lv) - 1.0 - lv).sum(axis=1)
        return {"xs": xs, "eps": eps, "h1": h1, "mu": mu, "lv": lv, "std": std,
                "z": z, "h2": h2, "xh": xh, "recon": recon, "kl": kl}

    def loss(self, x: np.ndarray, rng: np.random.Generator) -> tuple[float, float, float]:
        """(total, recon, kl) for one genome with a sampled latent."""
        x = self._check_input(x)
        eps = rng.standard_normal(self.latent_dim)
        c = self._forward(x[None, :], eps[None, :])
        recon, kl = float(c["recon"][0]), float(c["kl"][0])
        return recon + kl, recon, kl

    def _gradients(self, cache: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
        """Gradients of the batch-mean training objective
        (recon_weight * recon + kl); mirrors _forward exactly."""
        p = self.params
        xs, eps = cache["xs"], cache["eps"]
        h1, mu, lv, std = cache["h1"], cache["mu"], cache["lv"], cache["std"]
        z, h2, xh = cache["z"], cache["h2"], cache["xh"]
        m = xs.shape[0]

        d_a3 = self.recon_weight * 2.0 * (xh - xs) * xh * (1.0 - xh)
        g = {"dec_w2": d_a3.T @ h2 / m, "dec_b2": d_a3.mean(axis=0)}
        d_h2 = d_a3 @ p["dec_w2"]
        d_a2 = d_h2 * (1.0 - h2**2)
        g["dec_w1"] = d_a2.T @ z / m
        g["dec_b1"] = d_a2.mean(axis=0)
        d_z = d_a2 @ p["dec_w1"]

        d_mu = d_z + mu
        d_lv = 0.5 * d_z * eps * std + 0.5 * (np.exp(lv) - 1.0)
        g["enc_w_mu"] = d_mu.T @ h1 / m
        g["enc_b_mu"] = d_mu.mean(axis=0)
        g["enc_w_lv"] = d_lv.T @ h1 / m
        g["enc_b_lv"] = d_lv.mean(axis=0)
        d_h1 = d_mu @ p["enc_w_mu"] + d_lv @ p["enc_w_lv"]
        d_a1 = d_h1 * (1.0 - h1**2)
        g["enc_w1"] = d_a1.T @ xs / m
        g["enc_b1"] = d_a1.mean(axis=0)
        return g

    def _adam_step(self, grads: dict[str, np.ndarray]) -> None:
        self._adam_t += 1
        t = self._adam_t
        for name, grad in grads.items():
            m = self._adam_m[name]
            v = self._adam_v[name]
            m *= ADAM_BETA1
            m += (1.0 - ADAM_BETA1) * grad
            v *= ADAM_BETA2
            v += (1.0 - ADAM_BETA2) * grad**2
            m_hat = m / (1.0 - ADAM_BETA1**t)
            v_hat = v / (1.0 - ADAM_BETA2**t)
            self.params[name] -= ADAM_STEP * m_hat / (np.sqrt(v_hat) + ADAM_EPS)

    # ---------------------------------------------------------------- training

    def _dataset_loss(self, xs: np.ndarray, rng: np.random.Generator,
                      batch: int) -> tuple[float, float]:
        recon_sum = kl_sum = 0.0
        for start in range(0, len(xs), batch):
            block = xs[start : start + batch]
            eps = rng.standard_normal((len(block), self.latent_dim))
            c = self._forward(block, eps)
            recon_sum += c["recon"].sum()
            kl_sum += c["kl"].sum()
        return recon_sum / len(xs), kl_sum / len(xs)

    def train(self, dataset: np.ndarray, epochs: int,
              rng: np.random.Generator) -> TrainReport:
        """Mini-batch Adam over the dataset; weights updated in place.

        Deterministic given (current weights, dataset order, rng state).
        The report's recon/kl terms are final-epoch per-sample means.
        """
        xs = np.asarray(dataset, dtype=float)
        if xs.ndim != 2 or xs.shape[1] != self.input_dim or len(xs) == 0:
            raise ValueError(
                f"dataset must be a non-empty (m, {self.input_dim}) array, got {xs.shape}"
            )
        batch = min(32, len(xs))
        w = self.recon_weight
        recon0, kl0 = self._dataset_loss(xs, rng, batch)
        if epochs == 0:
            return TrainReport(0, w * recon0 + kl0, w * recon0 + kl0, recon0, kl0)

        recon_mean = kl_mean = 0.0
        for _ in range(epochs):
            order = rng.permutation(len(xs))
            recon_sum = kl_sum = 0.0
            for start in range(0, len(xs), batch):
                block = xs[order[start : start + batch]]
                eps = rng.standard_normal((len(block), self.latent_dim))
                cache = self._forward(block, eps)
                recon_sum += cache["recon"].sum()
                kl_sum += cache["kl"].sum()
                self._adam_step(self._gradients(cache))
            recon_mean = recon_sum / len(xs)
            kl_mean = kl_sum / len(xs)
        return TrainReport(epochs, w * recon0 + kl0, w * recon_mean + kl_mean,
                           recon_mean, kl_mean)

    # ------------------------------------------------------------ verification

    def _flat_params(self) -> np.ndarray:
        return np.concatenate([self.params[k].ravel() for k in _PARAM_NAMES])

    def _set_flat_params(self, flat: np.ndarray) -> None:
        pos = 0
        for k in _PARAM_NAMES:
            p = self.params[k]
            p[...] = flat[pos : pos + p.size].reshape(p.shape)
            pos += p.size

    def gradient_check(self, x: np.ndarray, step: float = 1e-5,
                       noise: np.ndarray | None = None,
                       kl_weight: float = 1.0) -> float:
        """Max relative error of analytic vs central-difference gradients of
        the training objective (recon_weight * recon + kl_weight * kl).

        The reparameterization draw is pinned to one noise vector so both
        passes differentiate the same function. kl_weight=0 isolates the
        reconstruction term.
        """
        if not 1e-7 <= step <= 1e-3:
            raise ValueError(f"finite-difference step {step} outside [1e-7, 1e-3]")
        x = self._check_input(x)
        if noise is None:
            noise = np.random.default_rng(12345).standard_normal(self.latent_dim)
        eps = np.asarray(noise, dtype=float)[None, :]
        xs = x[None, :]

        cache = self._forward(xs, eps)
        analytic_by_name = self._gradients(cache)
        if kl_weight != 1.0:
            kl_only = self._kl_gradients(cache)
            analytic_by_name = {
                k: analytic_by_name[k] - (1.0 - kl_weight) * kl_only[k]
                for k in analytic_by_name
            }
        analytic = np.concatenate([analytic_by_name[k].ravel() for k in _PARAM_NAMES])

        def objective() -> float:
            c = self._forward(xs, eps)
            return float(self.recon_weight * c["recon"][0] + kl_weight * c["kl"][0])

        theta = self._flat_params()
        numeric = np.empty_like(theta)
        try:
            for i in range(len(theta)):
                saved = theta[i]
                theta[i] = saved + step
                self._set_flat_params(theta)
                hi = objective()
                theta[i] = saved - step
                self._set_flat_params(theta)
                lo = objective()
                theta[i] = saved
                numeric[i] = (hi - lo) / (2.0 * step)
        finally:
            self._set_flat_params(theta)

        scale = np.maximum(1e-8, np.abs(analytic) + np.abs(numeric))
        return float(np.max(np.abs(analytic - numeric) / scale))

    def _kl_gradients(self, cache: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
        """Gradients of the KL term alone (used to isolate loss components)."""
        p = self.params
        xs, h1, mu, lv = cache["xs"], cache["h1"], cache["mu"], cache["lv"]
        m = xs.shape[0]
        d_mu = mu
        d_lv = 0.5 * (np.exp(lv) - 1.0)
        g = {k: np.zeros_like(v) for k, v in self.params.items()}
        g["enc_w_mu"] = d_mu.T @ h1 / m
        g["enc_b_mu"] = d_mu.mean(axis=0)
        g["enc_w_lv"] = d_lv.T @ h1 / m
        g["enc_b_lv"] = d_lv.mean(axis=0)
        d_h1 = d_mu @ p["enc_w_mu"] + d_lv @ p["enc_w_lv"]
        d_a1 = d_h1 * (1.0 - h1**2)
        g["enc_w1"] = d_a1.T @ xs / m
        g["enc_b1"] = d_a1.mean(axis=0)
        return g


def kl_divergence(mu: np.ndarray, logvar: np.ndarray) -> float:
    """Closed-form KL of N(mu, diag(exp(logvar))) from the unit Gaussian."""
    mu = np.asarray(mu, dtype=float)
    logvar = np.asarray(logvar, dtype=float)
    return float(0.5 * np.sum(mu**2 + np.exp(logvar) - 1.0 - logvar))
