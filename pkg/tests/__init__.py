"""INIT file for tests package."""
