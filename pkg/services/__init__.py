"""Simulation services: chain dynamics, valve protocol, disorder ensembles."""
