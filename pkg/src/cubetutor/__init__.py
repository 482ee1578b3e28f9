"""Rubik's cube tutoring engine.

Core layers, bottom up:

- cube: facelet states, moves, metrics, scrambles, validation
- patterns: masked sticker patterns (partial goals)
- symmetry: whole-cube recolorings used to canonicalize states
- solver: cross coordinate space, pattern databases, IDA*
- subgoals: clustering solved paths into a learned subgoal graph
- guidance: hints, walkthroughs, and the practice scenario catalog
- telemetry: session event logs and per-student feature extraction
- analytics: clustering, learning-gain, and Bayesian group comparison
- service: HTTP API exposing tutoring sessions
- cli: command-line entry points
"""

__version__ = "0.1.0"
