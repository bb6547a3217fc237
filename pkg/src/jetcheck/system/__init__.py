"""INIT file for the jetcheck.system package."""
