"""Integrability detectors, constructive reductions and named fixture equations."""
