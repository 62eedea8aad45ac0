"""Experiment presets, config files and the command line."""
