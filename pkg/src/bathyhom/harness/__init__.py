"""Experiment configuration, metrics, serialization and command-line interface."""
