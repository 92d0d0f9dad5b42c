"""The Riccati equation datatype and the action of SL(2,R) curves on it."""
