"""Lie systems on SL(2,R): the group equation and the connecting system."""
