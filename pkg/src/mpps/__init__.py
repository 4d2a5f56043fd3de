"""MPPS colour-image cipher and its chosen-plaintext cryptanalysis.

Modules:

* :mod:`mpps.chaos`        coupled logistic-sine / logistic-tent maps and quantizers
* :mod:`mpps.dna`          DNA coding tables and composite 2-bit maps
* :mod:`mpps.cipher`       the cipher itself, driven by secret or equivalent keys
* :mod:`mpps.attack`       chosen-plaintext equivalent-key recovery
* :mod:`mpps.degradation`  functional graphs of the digitized maps, weak keys
* :mod:`mpps.io`           PPM images and JSON key documents
"""
from .chaos import MapKind, SubKey
from .cipher import EquivalentKey, RgbImage, SecretKey, decrypt, derive_equivalent_key, encrypt
from .attack import CipherOracle, full_attack, run_attack
from .errors import ParameterError, ProtocolError, ShapeError

__version__ = "0.1.0"

__all__ = [
    "MapKind",
    "SubKey",
    "SecretKey",
    "EquivalentKey",
    "RgbImage",
    "derive_equivalent_key",
    "encrypt",
    "decrypt",
    "CipherOracle",
    "full_attack",
    "run_attack",
    "ParameterError",
    "ProtocolError",
    "ShapeError",
]
