"""Tests for leibniz-workbench."""
