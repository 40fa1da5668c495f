from .optimize import SuperpositionGridOptimizer
