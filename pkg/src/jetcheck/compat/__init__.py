"""INIT file for the jetcheck.compat package."""
