"""INIT File."""
