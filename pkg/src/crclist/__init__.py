"""CRC-aided list decoding of short tail-biting convolutional and polar codes."""

from .convolutional import ConvCodeSpec, PuncturePattern
from .crc import CrcPoly, parse_hex_poly
from .listdec import ListConfig, ListDecoderCore, adaptive_decode
from .polar import PolarCodeSpec, construct_frozen_set, load_reliability_sequence
from .spectrum import WeightSpectrum
from .system import CodeSystem, reference_polar_system, reference_tbcc_system

__version__ = "0.1.0"

__all__ = [
    "CodeSystem",
    "ConvCodeSpec",
    "CrcPoly",
    "ListConfig",
    "ListDecoderCore",
    "PolarCodeSpec",
    "PuncturePattern",
    "WeightSpectrum",
    "adaptive_decode",
    "construct_frozen_set",
    "load_reliability_sequence",
    "reference_polar_system",
    "reference_tbcc_system",
    "parse_hex_poly",
]
