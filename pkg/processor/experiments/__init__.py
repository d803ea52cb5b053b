"""Experiment schemas, runners and verification suites behind the command line."""
