"""Experiment harness: configuration, random streams, worker pool and output files."""

from .config import THREADS_ENV, ExperimentConfig
from .output import (
    MANIFEST_NAME,
    RunTimer,
    check_resume,
    manifest_entries,
    read_manifest,
    read_table,
    write_manifest,
    write_table,
)
from .parallel import make_mapper, parallel_map, resolve_threads
from horocover.utils import seed_streams, stream_state

__all__ = [
    "THREADS_ENV",
    "ExperimentConfig",
    "MANIFEST_NAME",
    "RunTimer",
    "check_resume",
    "manifest_entries",
    "read_manifest",
    "read_table",
    "write_manifest",
    "write_table",
    "make_mapper",
    "parallel_map",
    "resolve_threads",
    "seed_streams",
    "stream_state",
]
