"""Controlled image-quality degradations and quality measurement.

All transforms work on 8-bit RGB rasters, accumulate in floating point,
round half-away-from-zero, and clamp to [0, 255]. Convolution borders are
replicated. These rules are fixed so outputs are bit-reproducible.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage

from .errors import OntoGuardError
from .ontology import OntologySchema, QualityBin

LUMA_WEIGHTS = (0.2126, 0.7152, 0.0722)

BLUR_CHARACTERISTICS = ("Defocus_Blur", "Gaussian_Blur", "Haze_Blur", "Motion_Blur")


@dataclass
class RasterImage:
    """8-bit RGB image, row-major (height, width, 3)."""

    pixels: np.ndarray

    def __post_init__(self):
        if self.pixels.ndim != 3 or self.pixels.shape[2] != 3:
            raise OntoGuardError("raster images must be HxWx3")
        if self.pixels.dtype != np.uint8:
            raise OntoGuardError("raster images must be 8-bit")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @classmethod
    def filled(cls, width: int, height: int, color=(0, 0, 0)) -> "RasterImage":
        pixels = np.empty((height, width, 3), dtype=np.uint8)
        pixels[:, :] = color
        return cls(pixels)


@dataclass(frozen=True)
class QualityMeasurement:
    characteristic: str
    value: float
    bin: QualityBin


def _round_clamp(values: np.ndarray) -> np.ndarray:
    rounded = np.sign(values) * np.floor(np.abs(values) + 0.5)
    return np.clip(rounded, 0, 255).astype(np.uint8)


def _check_kernel_size(k: int, upper: int = 31) -> None:
    if k % 2 == 0 or not 1 <= k <= upper:
        raise OntoGuardError(f"kernel size must be odd and in [1, {upper}]: {k}")


def _convolve(img: RasterImage, kernel: np.ndarray) -> RasterImage:
    if abs(float(kernel.sum()) - 1.0) > 1e-6:
        raise OntoGuardError("convolution kernel must sum to 1")
    data = img.pixels.astype(np.float64)
    out = np.empty_like(data)
    for channel in range(3):
        out[:, :, channel] = ndimage.correlate(
            data[:, :, channel], kernel, mode="nearest")
    return RasterImage(_round_clamp(out))


def box_kernel(k: int) -> np.ndarray:
    _check_kernel_size(k)
    return np.full((k, k), 1.0 / (k * k))


def gaussian_kernel_1d(k: int, sigma: float) -> np.ndarray:
    _check_kernel_size(k)
    if sigma <= 0:
        raise OntoGuardError(f"sigma must be positive: {sigma}")
    center = k // 2
    offsets = np.arange(k) - center
    weights = np.exp(-(offsets ** 2) / (2.0 * sigma * sigma))
    return weights / weights.sum()


def line_kernel(k: int, angle: float) -> np.ndarray:
    _check_kernel_size(k)
    if not 0.0 <= angle < 180.0:
        raise OntoGuardError(f"angle must be in [0, 180): {angle}")
    kernel = np.zeros((k, k))
    center = k // 2
    rad = math.radians(angle)
    dx, dy = math.cos(rad), math.sin(rad)
    for step in range(k):
        offset = step - center
        col = center + round(offset * dx)
        row = center - round(offset * dy)
        kernel[row, col] = 1.0
    return kernel / kernel.sum()


def defocus_blur(img: RasterImage, k: int) -> RasterImage:
    """Uniform k x k box filter; k=1 is the identity."""
    _check_kernel_size(k)
    if k == 1:
        return RasterImage(img.pixels.copy())
    return _convolve(img, box_kernel(k))


def gaussian_blur(img: RasterImage, k: int, sigma: float) -> RasterImage:
    """Separable Gaussian; matches direct 2-D convolution within rounding."""
    _check_kernel_size(k)
    kernel = gaussian_kernel_1d(k, sigma)
    if k == 1:
        return RasterImage(img.pixels.copy())
    data = img.pixels.astype(np.float64)
    out = np.empty_like(data)
    for channel in range(3):
        passed = ndimage.correlate1d(data[:, :, channel], kernel,
                                     axis=1, mode="nearest")
        out[:, :, channel] = ndimage.correlate1d(passed, kernel,
                                                 axis=0, mode="nearest")
    return RasterImage(_round_clamp(out))


def motion_blur(img: RasterImage, k: int, angle: float) -> RasterImage:
    """Uniform smear along a rasterized line at the given angle."""
    _check_kernel_size(k)
    if k == 1:
        if not 0.0 <= angle < 180.0:
            raise OntoGuardError(f"angle must be in [0, 180): {angle}")
        return RasterImage(img.pixels.copy())
    return _convolve(img, line_kernel(k, angle))


def haze(img: RasterImage, strength: float) -> RasterImage:
    """Gaussian softening plus a blend toward white; strength 0 is identity.

    Strength is in the same pixel unit as the blur bins: the kernel size is
    the nearest odd size >= strength and the white-blend factor is
    strength / 60, so full strength (30) mixes half white.
    """
    if not 0.0 <= strength <= 30.0:
        raise OntoGuardError(f"haze strength must be in [0, 30]: {strength}")
    if strength == 0:
        return RasterImage(img.pixels.copy())
    k = max(1, math.ceil(strength))
    if k % 2 == 0:
        k += 1
    blend = strength / 60.0
    if k == 1:
        blurred = img.pixels.astype(np.float64)
    else:
        sigma = 0.3 * ((k - 1) * 0.5 - 1) + 0.8
        kernel = gaussian_kernel_1d(k, sigma)
        data = img.pixels.astype(np.float64)
        blurred = np.empty_like(data)
        for channel in range(3):
            passed = ndimage.correlate1d(data[:, :, channel], kernel,
                                         axis=1, mode="nearest")
            blurred[:, :, channel] = ndimage.correlate1d(
                passed, kernel, axis=0, mode="nearest")
    mixed = (1.0 - blend) * blurred + blend * 255.0
    return RasterImage(_round_clamp(mixed))


def adjust_contrast(img: RasterImage, gain: float, bias: float = 0.0) -> RasterImage:
    """Per-channel linear rescale: clamp(round(gain * v + bias))."""
    if gain <= 0:
        raise OntoGuardError(f"gain must be positive: {gain}")
    return RasterImage(_round_clamp(gain * img.pixels.astype(np.float64) + bias))


def darken(img: RasterImage, factor: float) -> RasterImage:
    """Scale brightness by factor in (0, 1], preserving channel ratios."""
    if not 0.0 < factor <= 1.0:
        raise OntoGuardError(f"darken factor must be in (0, 1]: {factor}")
    return RasterImage(_round_clamp(img.pixels.astype(np.float64) * factor))


def occlude(img: RasterImage, bbox: tuple[int, int, int, int],
            fraction: float) -> tuple[RasterImage, float]:
    """Cover ~fraction of the bbox with solid black; returns the exact
    achieved fraction so labels carry no estimation error."""
    x, y, w, h = bbox
    if w < 1 or h < 1 or x < 0 or y < 0 or x + w > img.width or y + h > img.height:
        raise OntoGuardError(f"bounding box {bbox} is degenerate or out of bounds")
    if not 0.0 <= fraction <= 0.8:
        raise OntoGuardError(f"occlusion fraction must be in [0, 0.8]: {fraction}")
    area = w * h
    target_pixels = round(fraction * area)
    pixels = img.pixels.copy()
    full_rows, remainder = divmod(target_pixels, w)
    pixels[y:y + full_rows, x:x + w] = 0
    if remainder:
        pixels[y + full_rows, x:x + remainder] = 0
    achieved = target_pixels / area
    return RasterImage(pixels), achieved


def relative_luminance(img: RasterImage) -> np.ndarray:
    data = img.pixels.astype(np.float64)
    r, g, b = LUMA_WEIGHTS
    return (r * data[:, :, 0] + g * data[:, :, 1] + b * data[:, :, 2]) / 255.0


def measure_contrast(img: RasterImage, schema: OntologySchema) -> QualityMeasurement:
    """Michelson contrast over relative luminance, 0 for all-black images."""
    luma = relative_luminance(img)
    lmax = float(luma.max())
    lmin = float(luma.min())
    score = 0.0 if lmax == 0 else (lmax - lmin) / (lmax + lmin)
    return QualityMeasurement("Contrast", score, schema.bin_for("Contrast", score))


def measure_resolution(img: RasterImage, schema: OntologySchema) -> QualityMeasurement:
    value = float(min(img.width, img.height))
    return QualityMeasurement("Resolution", value,
                              schema.bin_for("Resolution", value))


_PARAM_KEYS = {
    "Defocus_Blur": "kernel",
    "Gaussian_Blur": "kernel",
    "Haze_Blur": "strength",
    "Motion_Blur": "kernel",
}


def classify_applied(record: dict, schema: OntologySchema) -> dict[str, QualityMeasurement]:
    """Bin recorded transform parameters.

    ``record`` maps characteristic names to parameter dicts, e.g.
    ``{"Defocus_Blur": {"kernel": 7}, "Illumination": {"lux": 500}}``.
    Blur characteristics absent from the record bin as their zero value;
    occlusion defaults to 0. Illumination must be recorded (lux cannot be
    recovered from pixels) and an empty parameter dict is an error.
    """
    measurements: dict[str, QualityMeasurement] = {}
    for char in BLUR_CHARACTERISTICS:
        key = _PARAM_KEYS[char]
        params = record.get(char)
        if params is None:
            value = 0.0
        elif key not in params:
            raise OntoGuardError(f"{char} transform recorded without {key!r}")
        else:
            value = float(params[key])
        measurements[char] = QualityMeasurement(
            char, value, schema.bin_for(char, value))

    occl = record.get("Occlusion")
    if occl is None:
        value = 0.0
    elif "fraction" not in occl:
        raise OntoGuardError("Occlusion transform recorded without 'fraction'")
    else:
        value = float(occl["fraction"])
    measurements["Occlusion"] = QualityMeasurement(
        "Occlusion", value, schema.bin_for("Occlusion", value))

    illum = record.get("Illumination")
    if illum is None or "lux" not in illum:
        raise OntoGuardError(
            "Illumination lux must be recorded at augmentation time")
    lux = float(illum["lux"])
    measurements["Illumination"] = QualityMeasurement(
        "Illumination", lux, schema.bin_for("Illumination", lux))
    return measurements


# ---------------------------------------------------------------------------
# image file I/O: PNG (via Pillow) and binary PPM (P6)

def read_image(path) -> RasterImage:
    path = Path(path)
    if path.suffix.lower() == ".ppm":
        return _read_ppm(path)
    from PIL import Image
    with Image.open(path) as handle:
        return RasterImage(np.asarray(handle.convert("RGB"), dtype=np.uint8).copy())


def write_image(path, img: RasterImage) -> None:
    path = Path(path)
    if path.suffix.lower() == ".ppm":
        _write_ppm(path, img)
        return
    from PIL import Image
    Image.fromarray(img.pixels, mode="RGB").save(path)


def _read_ppm(path: Path) -> RasterImage:
    raw = path.read_bytes()
    fields = []
    pos = 0
    while len(fields) < 4:
        while pos < len(raw) and raw[pos:pos + 1].isspace():
            pos += 1
        if raw[pos:pos + 1] == b"#":
            while pos < len(raw) and raw[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos:pos + 1].isspace():
            pos += 1
        fields.append(raw[start:pos])
    if fields[0] != b"P6" or fields[3] != b"255":
        raise OntoGuardError(f"{path}: only 8-bit P6 PPM is supported")
    width, height = int(fields[1]), int(fields[2])
    pos += 1
    data = np.frombuffer(raw, dtype=np.uint8, count=width * height * 3, offset=pos)
    return RasterImage(data.reshape(height, width, 3).copy())


def _write_ppm(path: Path, img: RasterImage) -> None:
    header = f"P6\n{img.width} {img.height}\n255\n".encode("ascii")
    path.write_bytes(header + img.pixels.tobytes())


def load_manifest(path) -> dict:
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)
