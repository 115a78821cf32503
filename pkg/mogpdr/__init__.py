"""Distributionally robust tube MPC with mixture-of-GP disturbance models."""

__version__ = "0.1.0"
