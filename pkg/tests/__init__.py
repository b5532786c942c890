"""Test suite for the horocover package."""
