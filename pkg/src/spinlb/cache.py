"""On-disk cache of structure tensors and constraint sets.

One JSON file per cluster size, keyed by (n, tool version, basis-ordering
hash).  Writes go through a temp file and an atomic rename.
"""

from __future__ import annotations

import json
import logging
import os
from pathlib import Path

from . import __version__
from .algebra.basis import basis_hash, enumerate_basis
from .algebra.structure import StructureTensor, build_structure_tensor
from .symmetry import ConstraintSet, build_constraints

log = logging.getLogger(__name__)

DEFAULT_CACHE_DIR = ".spinlb-cache"


class ArtifactCache:
    def __init__(self, cache_dir: str | Path = DEFAULT_CACHE_DIR):
        self.cache_dir = Path(cache_dir).expanduser()

    def path_for(self, n: int) -> Path:
        digest = basis_hash(enumerate_basis(n, "A"))[:16]
        return self.cache_dir / f"structure-n{n}-v{__version__}-{digest}.json"

    def load(self, n: int) -> tuple[StructureTensor, ConstraintSet] | None:
        path = self.path_for(n)
        if not path.exists():
            return None
        try:
            doc = json.loads(path.read_text())
            tensor = StructureTensor.from_json(doc["structure_tensor"])
            constraints = ConstraintSet.from_json(doc["constraints"])
        except (ValueError, KeyError) as exc:
            log.warning("ignoring unreadable cache file %s: %s", path, exc)
            return None
        if tensor.n != n or doc.get("tool_version") != __version__:
            return None
        return tensor, constraints

    def store(self, tensor: StructureTensor, constraints: ConstraintSet) -> Path:
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        path = self.path_for(tensor.n)
        doc = {
            "tool_version": __version__,
            "structure_tensor": tensor.to_json(),
            "constraints": constraints.to_json(),
        }
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(doc, separators=(",", ":"), sort_keys=True))
        os.replace(tmp, path)
        return path

    def get_or_build(self, n: int) -> tuple[StructureTensor, ConstraintSet, bool]:
        """Return (tensor, constraints, cache_hit)."""
        hit = self.load(n)
        if hit is not None:
            return hit[0], hit[1], True
        log.info("building structure tensor for n=%d", n)
        tensor = build_structure_tensor(n)
        constraints = build_constraints(n, tensor.basis)
        self.store(tensor, constraints)
        return tensor, constraints, False
