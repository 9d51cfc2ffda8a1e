# tests/__init__.py
"""
Tests para la librería de métricas de Hodge.
"""
