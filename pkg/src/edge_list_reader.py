"""
Edge-list reader module for loading temporal contact streams.
Handles SNAP and SocioPatterns style `u v t` files and validates every row.
"""

import logging
from pathlib import Path
from typing import List, Optional, Tuple

logger = logging.getLogger(__name__)

COMMENT_PREFIXES = ('#', '%')


class EdgeListParseError(ValueError):
    """Raised when an edge-list line cannot be parsed."""

    def __init__(self, path: str, line_number: int, reason: str):
        self.path = path
        self.line_number = line_number
        super().__init__(f"{path}:{line_number}: {reason}")


class EdgeListReader:
    """Reads and validates timestamped contacts from an edge-list file."""

    def __init__(self, directed: bool = False, encoding: str = 'utf-8'):
        self.directed = directed
        self.encoding = encoding
        self.self_loops_skipped = 0
        self.rows_processed = 0

    def read_contacts(self, path: str) -> List[Tuple[int, int, int]]:
        """
        Read contacts from an edge-list file.

        Undirected contacts are canonicalised so that source < target.
        Duplicate lines are kept as distinct contacts.

        Args:
            path: Path to the edge-list file

        Returns:
            List of (source, target, time) tuples in file order
        """
        logger.info(f"Reading contacts from edge list: {path}")

        file_path = Path(path)
        if not file_path.exists():
            logger.error(f"Edge-list file not found: {path}")
            raise FileNotFoundError(f"Edge-list file not found: {path}")

        contacts = []
        self.self_loops_skipped = 0
        self.rows_processed = 0

        with open(file_path, 'r', encoding=self.encoding) as handle:
            for line_number, line in enumerate(handle, start=1):
                contact = self._process_line(str(path), line, line_number)
                if contact is not None:
                    contacts.append(contact)

        if self.self_loops_skipped:
            logger.warning(f"Skipped {self.self_loops_skipped} self-loop contacts in {path}")

        if not contacts:
            logger.error(f"No events found in {path}")
            raise ValueError(f"no events in edge-list file: {path}")

        logger.info(f"Loaded {len(contacts)} contacts from {path} "
                    f"({self.rows_processed} rows processed, {self.self_loops_skipped} self-loops skipped)")
        return contacts

    def _process_line(self, path: str, line: str, line_number: int) -> Optional[Tuple[int, int, int]]:
        """Parse one line; returns None for blanks, comments and self-loops."""
        stripped = line.strip()
        if not stripped or stripped.startswith(COMMENT_PREFIXES):
            return None

        self.rows_processed += 1
        fields = stripped.split()
        if len(fields) < 3:
            raise EdgeListParseError(path, line_number, f"expected 'u v t', got {len(fields)} field(s)")

        try:
            source, target, time = (int(field) for field in fields[:3])
        except ValueError:
            raise EdgeListParseError(path, line_number, f"non-integer field in {stripped!r}")

        if source < 0 or target < 0:
            raise EdgeListParseError(path, line_number, "node ids must be non-negative")
        if time < 0:
            raise EdgeListParseError(path, line_number, "timestamps must be non-negative")

        if source == target:
            self.self_loops_skipped += 1
            logger.debug(f"Line {line_number}: skipping self-loop on node {source}")
            return None

        if not self.directed and source > target:
            source, target = target, source

        return source, target, time
