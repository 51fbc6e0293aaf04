"""Fallback kernel, importable as ``cadquery`` by sandboxed programs.

The runner prepends this directory to the child's PYTHONPATH only when
the real CadQuery library is absent from the interpreter.
"""
