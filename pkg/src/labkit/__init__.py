"""Exact toolkit for commuting missing-label operators via Berezin brackets."""
