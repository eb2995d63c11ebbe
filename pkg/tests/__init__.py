"""Tests for result-evaluator package."""
