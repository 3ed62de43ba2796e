"""
rrnash core library

Random-reshuffling Nash equilibrium seeking for finite-sum games:
benchmark games, communication networks, sampling and step-size schedules,
full and partial decision information dynamics, equilibrium oracles and the
experiment harness.
"""

__version__ = "0.1.0"
