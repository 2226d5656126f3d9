"""Numerics toolkit for conditional collision/min-entropy evolution,
entanglement and classical sampling bounds, entropic uncertainty relations,
and bounded/noisy-storage security calculators."""

from . import (cli, entropy, errors, matcore, qmaps, qstates, rates,
               statefile, verify, wsesim)

__all__ = ["cli", "entropy", "errors", "matcore", "qmaps", "qstates", "rates",
           "statefile", "verify", "wsesim"]

__version__ = "0.1.0"
