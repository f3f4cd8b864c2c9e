"""Test suite for bdris."""
