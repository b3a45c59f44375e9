"""
Temporal network influence maximization engine.
"""
