"""INIT file for the jetcheck.algebra package."""
