"""INIT file for the jetcheck package."""
