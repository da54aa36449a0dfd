"""
Input fingerprints.

Every report carries the SHA256 of the file it was computed from, so two runs
can be compared without diffing the inputs.
"""

import hashlib
from pathlib import Path
from typing import Union

CHUNK_SIZE = 8192


def compute_sha256(file_path: Union[str, Path]) -> str:
    """
    Compute SHA256 hash of an input file.

    Args:
        file_path: Path to descriptor, edge list, weights or pmf file

    Returns:
        Hexadecimal SHA256 hash string (64 characters)

    Raises:
        FileNotFoundError: If file does not exist
        ValueError: If the path is a directory
        PermissionError: If file cannot be read
        IOError: If file read fails

    Example:
        >>> len(compute_sha256("tests/fixtures/k4.json"))
        64
    """
    file_path = Path(file_path)

    if not file_path.exists():
        raise FileNotFoundError(f"File not found: {file_path}")

    if not file_path.is_file():
        raise ValueError(f"Path is not a file: {file_path}")

    sha256_hash = hashlib.sha256()
    try:
        with open(file_path, "rb") as f:
            while chunk := f.read(CHUNK_SIZE):
                sha256_hash.update(chunk)
    except PermissionError as e:
        raise PermissionError(f"Cannot read file (permission denied): {file_path}") from e
    except IOError as e:
        raise IOError(f"Failed to read file: {file_path}") from e

    return sha256_hash.hexdigest()


def fingerprint_text(text: str) -> str:
    """SHA256 of UTF-8 text; used for generated inputs such as demo graphs."""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def verify_fingerprint(file_path: Union[str, Path], expected_hash: str) -> bool:
    """
    Check that a file still has the fingerprint recorded in an earlier report.

    Args:
        file_path: Input file
        expected_hash: SHA256 from the earlier report (64 hex characters)

    Returns:
        True if the hashes match

    Raises:
        ValueError: If expected_hash is not 64 hex characters
    """
    if not isinstance(expected_hash, str) or len(expected_hash) != 64:
        raise ValueError(f"Expected a 64-character SHA256, got: {expected_hash!r}")
    try:
        int(expected_hash, 16)
    except ValueError as e:
        raise ValueError(f"SHA256 must be hexadecimal: {expected_hash!r}") from e

    return compute_sha256(file_path) == expected_hash.lower()
