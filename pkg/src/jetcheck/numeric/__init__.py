"""INIT file for the jetcheck.numeric package."""
