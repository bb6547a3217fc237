"""INIT file for the jetcheck.parser package."""
