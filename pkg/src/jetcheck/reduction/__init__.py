"""INIT file for the jetcheck.reduction package."""
