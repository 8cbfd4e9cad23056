"""
Core Module

graph -> affinity -> solvers -> ensemble -> train, 그리고 assignment / harness.
"""
