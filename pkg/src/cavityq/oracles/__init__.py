"""Brute-force oracles used to verify the closed-form results."""
