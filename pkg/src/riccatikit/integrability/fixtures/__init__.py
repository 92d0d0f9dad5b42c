"""Named fixture equations and their registry."""
