"""FLASQ surface code cost model."""
