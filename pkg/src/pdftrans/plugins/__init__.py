"""Example translator plugins shipped with the package."""
