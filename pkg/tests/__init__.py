"""Test suite for the homalgebroid verification library."""
