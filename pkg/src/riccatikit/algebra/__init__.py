"""SL(2,R), its Lie algebra, the Möbius action and curves of matrices."""
