"""Illumination correction and size standardization of component crops."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidSigmas
from .geometry import ComponentKind

# (width, height) per component; fixed so gallery descriptors stay comparable
COMPONENT_SIZES = {
    ComponentKind.FACE: (92, 112),
    ComponentKind.LEFT_EYE: (27, 18),
    ComponentKind.RIGHT_EYE: (27, 18),
    ComponentKind.NOSE: (24, 38),
    ComponentKind.MOUTH_CHIN: (34, 40),
    ComponentKind.FOREHEAD_EYEBROW: (50, 42),
}


@dataclass(frozen=True)
class NormalizeParams:
    sigma1: float = 2.0
    sigma2: float = 8.0
    eps: float = 1e-6

    def __post_init__(self):
        check_sigmas(self.sigma1, self.sigma2)
        if not (self.eps >= 0 and math.isfinite(self.eps)):
            raise InvalidSigmas(f"eps must be >= 0, got {self.eps}")


def check_sigmas(sigma1, sigma2):
    if not (sigma1 > 0 and sigma2 > 0):
        raise InvalidSigmas(f"sigmas must be positive, got {sigma1}, {sigma2}")
    if sigma1 >= sigma2:
        raise InvalidSigmas(f"sigma1 ({sigma1}) must be smaller than sigma2 ({sigma2})")


def gaussian_kernel(sigma: float) -> np.ndarray:
    radius = int(math.ceil(3 * sigma))
    k = np.arange(-radius, radius + 1, dtype=np.float64)
    w = np.exp(-0.5 * (k / sigma) ** 2)
    return w / w.sum()


def _convolve_axis(a, kernel, axis):
    r = len(kernel) // 2
    pad = [(0, 0), (0, 0)]
    pad[axis] = (r, r)
    padded = np.pad(a, pad, mode="edge")
    n = a.shape[axis]
    out = np.zeros_like(a)
    for i, w in enumerate(kernel):
        sl = [slice(None), slice(None)]
        sl[axis] = slice(i, i + n)
        out += w * padded[tuple(sl)]
    return out


def gaussian_blur(img, sigma: float) -> np.ndarray:
    """Separable Gaussian filter, radius ``ceil(3 sigma)``, edge-replicated borders."""
    if not sigma > 0:
        raise InvalidSigmas(f"sigma must be positive, got {sigma}")
    a = np.asarray(img, dtype=np.float64)
    if a.size == 0:
        return a.copy()
    kernel = gaussian_kernel(sigma)
    # filtering around a reference level keeps flat regions exactly flat
    ref = a.flat[0]
    return ref + _convolve_axis(_convolve_axis(a - ref, kernel, 1), kernel, 0)


def local_normalize(img, sigma1=2.0, sigma2=8.0, eps=1e-6) -> np.ndarray:
    """Return ``(I - mu) / (sd + eps)`` with Gaussian-estimated local mean and deviation.

    ``mu`` is the image blurred at ``sigma1``; ``sd`` is the square root of
    the squared residual blurred at the wider ``sigma2``.
    """
    check_sigmas(sigma1, sigma2)
    a = np.asarray(img, dtype=np.float64)
    mu = gaussian_blur(a, sigma1)
    resid = a - mu
    # rounding can leave tiny negatives in the blurred variance
    sd = np.sqrt(np.maximum(gaussian_blur(resid * resid, sigma2), 0.0))
    return resid / (sd + eps)


def resize_bilinear(img, target) -> np.ndarray:
    """Bilinear resize to ``target = (width, height)`` with corner-aligned sampling.

    Integer inputs come back rounded in their own dtype; float inputs stay float.
    """
    a = np.asarray(img)
    tw, th = int(target[0]), int(target[1])
    if a.ndim != 2 or a.size == 0 or tw <= 0 or th <= 0:
        raise ValueError(f"cannot resize {a.shape} to {target}")
    h, w = a.shape
    if (w, h) == (tw, th):
        return a.copy()

    def coords(n_src, n_dst):
        if n_dst == 1:
            return np.array([(n_src - 1) / 2.0])
        return np.arange(n_dst) * ((n_src - 1) / (n_dst - 1))

    xs, ys = coords(w, tw), coords(h, th)
    x0 = np.clip(np.floor(xs).astype(int), 0, w - 1)
    y0 = np.clip(np.floor(ys).astype(int), 0, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = (xs - x0)[None, :]
    fy = (ys - y0)[:, None]

    f = a.astype(np.float64)
    top = f[y0][:, x0] * (1 - fx) + f[y0][:, x1] * fx
    bot = f[y1][:, x0] * (1 - fx) + f[y1][:, x1] * fx
    out = top * (1 - fy) + bot * fy
    if np.issubdtype(a.dtype, np.integer):
        info = np.iinfo(a.dtype)
        return np.clip(np.floor(out + 0.5), info.min, info.max).astype(a.dtype)
    return out


def preprocess_component(roi, kind: ComponentKind, params: NormalizeParams = NormalizeParams()) -> np.ndarray:
    """Resize a crop to its component's fixed size, then normalize illumination."""
    a = np.asarray(roi, dtype=np.float64)
    if a.size == 0:
        raise ValueError("empty ROI")
    resized = resize_bilinear(a, COMPONENT_SIZES[ComponentKind(kind)])
    return local_normalize(resized, params.sigma1, params.sigma2, params.eps)
