"""CAD program corpus augmentation toolkit.

Pipeline pieces: ISO 10303-21 (STEP) parsing, B-rep geometry metrics,
structural validation of shells, reference-surface script generation,
prompt composition for code-generating LLMs, a generate/execute/validate
retry loop, and corpus-level reporting.
"""

__version__ = "0.1.0"
