"""INIT file for the jetcheck.docs package."""
