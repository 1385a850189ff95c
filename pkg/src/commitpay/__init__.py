"""Exact optimal commitment with payments and signaling in normal-form and Bayesian games."""
from ._kernels import BACKEND

__version__ = "0.1.0"
