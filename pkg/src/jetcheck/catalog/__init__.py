"""INIT file for the jetcheck.catalog package."""
