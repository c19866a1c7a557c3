"""Tests for gridmdp."""
