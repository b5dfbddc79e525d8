"""Pseudo-spectral KdV with Gevrey-norm diagnostics and modified energies."""

__version__ = "0.1.0"
