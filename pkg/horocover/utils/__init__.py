"""Helpers shared by the library and the harness."""

from .seeding import StreamId, seed_streams, stream_state

__all__ = ["StreamId", "seed_streams", "stream_state"]
