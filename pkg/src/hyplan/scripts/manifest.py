"""
Run manifests: what a command was run on, written next to its outputs.
"""
import hashlib
import json
import os
import pathlib
from dataclasses import asdict, dataclass, field

import hyplan
from hyplan.hyplan_exception import ManifestMismatchError

MANIFEST_FILE = "manifest.json"


def file_hash(path: str | os.PathLike) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


@dataclass
class RunManifest:
    command: str
    scenario_path: str | None
    output_dir: str
    # fingerprint of the validated scenario, or hash of the input files
    input_hash: str
    arguments: dict = field(default_factory=dict)
    solver_options: dict = field(default_factory=dict)
    tool_version: str = hyplan.__version__

    def write(self, out_dir: str | os.PathLike | None = None) -> pathlib.Path:
        path = pathlib.Path(out_dir or self.output_dir) / MANIFEST_FILE
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")
        return path

    @classmethod
    def read(cls, run_dir: str | os.PathLike) -> "RunManifest":
        path = pathlib.Path(run_dir) / MANIFEST_FILE
        if not path.exists():
            raise ManifestMismatchError(f"{run_dir} has no {MANIFEST_FILE}; run a command there first", {"run_dir": str(run_dir)})
        try:
            return cls(**json.loads(path.read_text()))
        except (ValueError, TypeError) as error:
            raise ManifestMismatchError(f"{path}: unreadable manifest: {error}", {"file": str(path)}) from None

    def require(self, command: str, input_hash: str | None = None) -> None:
        """Raise unless this manifest records ``command`` run on inputs hashing to ``input_hash``."""
        if self.command != command:
            raise ManifestMismatchError(
                f"{self.output_dir} holds a {self.command} run, expected a {command} run",
                {"expected": command, "found": self.command},
            )
        if input_hash is not None and input_hash != self.input_hash:
            raise ManifestMismatchError(
                f"inputs changed since the {command} run in {self.output_dir}",
                {"expected": self.input_hash, "found": input_hash},
            )
