"""Exact verification engine for Cartan (super)geometry."""
