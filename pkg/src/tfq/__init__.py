"""Time-frequency transforms over finite abelian groups."""
