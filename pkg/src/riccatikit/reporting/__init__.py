"""Error statistics and report writers."""
