"""Zero-shot fluorescence microscopy denoising (FM2S)."""

from ._fm2s import (
    DenoiseResult,
    DivergenceError,
    Image,
    InvalidArgumentError,
    IoError,
    QualityReport,
    amplify_channels,
    compare,
    denoise,
    gaussian_filter,
    inject,
    list_profiles,
    load_image,
    median_filter,
    profile_text,
    psnr,
    save_image,
    ssim,
)

__all__ = [
    "DenoiseResult",
    "DivergenceError",
    "Image",
    "InvalidArgumentError",
    "IoError",
    "QualityReport",
    "amplify_channels",
    "compare",
    "denoise",
    "gaussian_filter",
    "inject",
    "list_profiles",
    "load_image",
    "median_filter",
    "profile_text",
    "psnr",
    "save_image",
    "ssim",
]
