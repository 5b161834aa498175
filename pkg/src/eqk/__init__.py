"""Exact and seeded-statistical checks of equilibrium-transform tail bounds."""
