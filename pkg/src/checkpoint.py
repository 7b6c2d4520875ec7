"""
Checkpoint store for resumable scans.

Each finished grid point is written as one JSON file under
<root>/<spec digest>/, so a scan interrupted at any moment can be resumed
and only its missing points are recomputed. Points are stored before the
emission floor is applied, which keeps a resumed table identical to an
uninterrupted one.
"""

import logging
import shutil
from pathlib import Path

from .schemas import PointResult

logger = logging.getLogger(__name__)


class CheckpointStore:
    """
    File-backed store of `PointResult`s for one scan specification.

    Usage:
        store = CheckpointStore(Path("out/.checkpoints"), spec.digest())
        done = store.load_all()
        ...
        store.save(result)
    """

    def __init__(self, root: Path, digest: str):
        self.directory: Path = root / digest
        self.point_prefix: str = "point_"

    def _get_point_path(self, theta_index: int, omega_index: int) -> Path:
        return self.directory / f"{self.point_prefix}{theta_index:03d}_{omega_index:05d}.json"

    def save(self, result: PointResult) -> None:
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self._get_point_path(result.theta_index, result.omega_index)
        partial = path.with_suffix(".part")
        partial.write_text(result.model_dump_json(), encoding="utf-8")
        partial.replace(path)

    def load(self, theta_index: int, omega_index: int) -> PointResult | None:
        """Stored result of one point; None if absent or unreadable."""
        path = self._get_point_path(theta_index, omega_index)
        if not path.exists():
            return None
        try:
            return PointResult.model_validate_json(path.read_bytes())
        except Exception:
            # If deserialization fails, delete the corrupted checkpoint
            logger.warning(f"Discarding corrupted checkpoint {path.name}")
            path.unlink(missing_ok=True)
            return None

    def load_all(self) -> dict[tuple[int, int], PointResult]:
        if not self.directory.exists():
            return {}
        restored = {}
        for path in sorted(self.directory.glob(f"{self.point_prefix}*.json")):
            _, theta_index, omega_index = path.stem.split("_")
            result = self.load(int(theta_index), int(omega_index))
            if result is not None:
                restored[result.key] = result
        return restored

    def clear(self) -> None:
        """Remove the store once its scan has been assembled."""
        shutil.rmtree(self.directory, ignore_errors=True)
        parent = self.directory.parent
        if parent.exists() and not any(parent.iterdir()):
            parent.rmdir()
