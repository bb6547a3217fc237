"""INIT file for the jetcheck.cli package."""
