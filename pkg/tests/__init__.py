"""Tests for hetnet_realize."""
