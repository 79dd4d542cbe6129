"""Exact computations with maps between free commutative differential graded algebras."""
