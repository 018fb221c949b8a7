"""Quantum-foundations testbed: Bell-operator bounds, polarizer-chain Monte
Carlo, wavefunction phase/quantum-potential diagnostics, and truncated
phase-operator algebra. Thin wrapper over the C++ core."""

from ._core import (  # noqa: F401
    __version__,
    bell,
    bohm,
    fock,
    harness,
    linalg,
    polarizer,
    scattering,
)

__all__ = [
    "__version__",
    "bell",
    "bohm",
    "fock",
    "harness",
    "linalg",
    "polarizer",
    "scattering",
]
