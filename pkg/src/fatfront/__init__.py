"""Accelerating fronts of nonlocal monostable equations with fat-tailed kernels."""

__version__ = "0.1.0"
