"""Provenance manifests written into every output directory."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, Self

from dataclasses_json import dataclass_json

from linsem._version import __version__
from linsem.core.errors import ManifestError
from linsem.core.hashing import FNV_ALGORITHM, hash_file

__all__ = ["MANIFEST_NAME", "RunManifest", "verify_manifest"]

_manifest_logger = logging.getLogger("linsem.pipeline.manifest")

MANIFEST_NAME = "manifest.json"


@dataclass_json
@dataclass
class RunManifest:
    """What produced an output directory.

    :param command: The command or stage name.
    :param parameters: The parameters it ran with.
    :param input_hashes: Input file path → content hash.
    :param seed: The seed it ran with.
    :param artifact_version: The linsem version.
    :param hash_algorithm: The content hash used for ``input_hashes``.
    :param outputs: The files written next to the manifest.
    """

    command: str
    parameters: Dict[str, Any] = field(default_factory=dict)
    input_hashes: Dict[str, str] = field(default_factory=dict)
    seed: int | None = None
    artifact_version: str = __version__
    hash_algorithm: str = FNV_ALGORITHM
    outputs: list[str] = field(default_factory=list)

    @classmethod
    def for_inputs(
        cls,
        command: str,
        parameters: Dict[str, Any],
        inputs: Iterable[Path],
        seed: int | None = None,
        base: Path | None = None,
    ) -> Self:
        """Build a manifest, hashing every input file.

        Input paths are recorded relative to ``base`` when one is given.
        """
        hashes = {
            str(Path(path).relative_to(base) if base else path): hash_file(path)
            for path in inputs
        }
        return cls(command=command, parameters=parameters, input_hashes=hashes, seed=seed)

    def write(self, out_dir: Path) -> Path:
        """Write ``manifest.json`` into ``out_dir``, listing the files already there."""
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        self.outputs = sorted(
            p.name for p in out_dir.iterdir() if p.is_file() and p.name != MANIFEST_NAME
        )
        path = out_dir / MANIFEST_NAME
        text = self.to_json(indent=2, sort_keys=True)  # type: ignore
        path.write_text(text + "\n", encoding="utf-8")
        _manifest_logger.debug(f"Wrote manifest for '{self.command}' to {path}")
        return path

    @classmethod
    def load(cls, out_dir: Path) -> Self:
        path = Path(out_dir) / MANIFEST_NAME
        if not path.is_file():
            raise ManifestError(f"{out_dir} holds no {MANIFEST_NAME}")
        return cls.from_json(path.read_text(encoding="utf-8"))  # type: ignore


def verify_manifest(manifest: RunManifest, base: Path | None = None) -> Dict[str, bool]:
    """Recompute every input hash. Missing files count as mismatches."""
    root = Path(base) if base else Path()
    return {
        name: (root / name).is_file() and hash_file(root / name) == expected
        for name, expected in manifest.input_hashes.items()
    }
