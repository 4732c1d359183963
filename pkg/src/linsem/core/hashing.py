"""64-bit FNV-1a content hashing for provenance manifests."""
from pathlib import Path

__all__ = ["FNV_ALGORITHM", "fnv1a_64", "hash_file"]

FNV_ALGORITHM = "fnv1a-64"

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK = 0xFFFFFFFFFFFFFFFF


def fnv1a_64(data: bytes) -> int:
    """The 64-bit FNV-1a hash of ``data``."""
    value = _FNV_OFFSET
    for byte in data:
        value ^= byte
        value = (value * _FNV_PRIME) & _MASK
    return value


def hash_file(path: Path) -> str:
    """FNV-1a hash of a file's bytes as 16 lowercase hex digits."""
    return f"{fnv1a_64(Path(path).read_bytes()):016x}"
