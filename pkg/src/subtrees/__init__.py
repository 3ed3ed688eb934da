"""Random subtrees of graphs: enumeration, Markov chains, growth models and tree evaporation."""
__version__ = "0.1.0"
