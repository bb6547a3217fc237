"""INIT file for the jetcheck.expr package."""
