"""Symmetry analysis and graph rewriting for feed-forward networks."""
from .network import Network, NetworkBuilder, validate, level, ancestors, is_layered, subnetwork, trivial
from .nonlinearity import Tanh, CReLU, ReLU, LeakyReLU, Abs, Zab, POLE
from .symmetry import AffineSymmetry, verify_symmetry, discover_symmetry, construct_exotic

__version__ = "0.1.0"
