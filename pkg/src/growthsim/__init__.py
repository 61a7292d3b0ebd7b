"""Simulation and analysis of reaction networks whose species continually duplicate.

The package covers four layers:

* :mod:`growthsim.crn` -- reaction networks, configurations, propensities,
  and validation of "birth systems" (networks in which every species has a
  self-duplication reaction).
* :mod:`growthsim.engine` -- exact (next-reaction) and tau-leap stochastic
  simulation with composable stop conditions and deterministic seeding.
* :mod:`growthsim.protocols` -- the two-species annihilation consensus
  protocol, dual-rail signal encodings, gate constructions, and circuits.
* :mod:`growthsim.analysis` / :mod:`growthsim.couplings` /
  :mod:`growthsim.harness` -- closed-form bounds with exact oracles, coupled
  Markov chains used in the correctness arguments, and ensemble experiment
  drivers behind the ``growthsim`` command line tool.
"""

__version__ = "0.1.0"

__all__ = ["__version__"]
