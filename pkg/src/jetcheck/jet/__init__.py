"""INIT file for the jetcheck.jet package."""
