"""Retina-inspired scalable image codec."""

from ._core import (
    CodecError,
    ConfigError,
    Decoder,
    FormatError,
    IoError,
    NumericalError,
    encode,
    mean_ssim,
    psnr,
    read_pgm,
    schedule_us,
    spike_times,
    to_8bit,
    truncate,
    write_pgm,
)

__all__ = [
    "CodecError",
    "ConfigError",
    "Decoder",
    "FormatError",
    "IoError",
    "NumericalError",
    "encode",
    "mean_ssim",
    "psnr",
    "read_pgm",
    "schedule_us",
    "spike_times",
    "to_8bit",
    "truncate",
    "write_pgm",
]
