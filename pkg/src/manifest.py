"""Run manifests written next to every output file."""

import json
import logging
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from src import __version__

logger = logging.getLogger(__name__)


def manifest_path(output: Path) -> Path:
    output = Path(output)
    return output.with_name(output.name + ".manifest.json")


@dataclass
class RunManifest:
    command: str
    settings: dict = field(default_factory=dict)
    seeds: list[int] = field(default_factory=list)
    inputs: list[str] = field(default_factory=list)
    outputs: list[str] = field(default_factory=list)
    version: str = __version__
    started_at: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds")
    )
    wall_time: float | None = None
    _clock: float = field(default_factory=time.perf_counter, repr=False)

    def to_dict(self) -> dict:
        data = asdict(self)
        data.pop("_clock")
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "RunManifest":
        return cls(**{k: v for k, v in data.items() if not k.startswith("_")})

    def finish(self, output: Path) -> Path:
        """Record the wall time and write the manifest beside ``output``."""
        self.wall_time = time.perf_counter() - self._clock
        if str(output) not in self.outputs:
            self.outputs.append(str(output))
        path = manifest_path(output)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2)
        logger.debug(f"Wrote manifest {path}")
        return path


def load_manifest(path: Path) -> RunManifest:
    with open(path) as f:
        return RunManifest.from_dict(json.load(f))
