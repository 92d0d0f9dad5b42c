"""Job execution: spec validation, runners and trace files."""
