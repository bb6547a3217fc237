"""INIT file for logger package."""
