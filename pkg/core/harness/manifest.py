"""
Run manifest

A hash-chained ledger of everything an experiment produced: game, network,
equilibrium, schedule and one entry per run with the hashes that define it.
Each entry hashes its own fields plus the previous entry's hash, so any edit
breaks the chain. generated_at is the only wall-clock value and sits outside
the chain.
"""

from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional
import hashlib
import json
import logging

from ..errors import PairingError

logger = logging.getLogger(__name__)

# Hashes that must agree across arms for one seed
PAIRED_KEYS = ("game_hash", "network_hash", "x0_hash", "schedule_hash")


@dataclass
class ManifestEntry:
    """One ledger record"""
    action: str
    fields: dict[str, str] = field(default_factory=dict)
    previous_hash: Optional[str] = None
    entry_hash: Optional[str] = None

    def compute_hash(self) -> str:
        data = json.dumps(
            {
                "action": self.action,
                "fields": self.fields,
                "previous_hash": self.previous_hash,
            },
            sort_keys=True,
        )
        return hashlib.sha256(data.encode()).hexdigest()


class RunManifest:
    """Append-only manifest with a verifiable hash chain"""

    def __init__(self):
        self._entries: list[ManifestEntry] = []
        self._last_hash: Optional[str] = None

    @property
    def entries(self) -> list[ManifestEntry]:
        return list(self._entries)

    def record(self, action: str, **fields) -> ManifestEntry:
        """
        Append an entry

        Args:
            action: entry kind ("experiment", "game", "run", ...)
            **fields: values, stored as strings

        Returns:
            ManifestEntry: the chained entry
        """
        entry = ManifestEntry(
            action=action,
            fields={key: str(value) for key, value in fields.items()},
            previous_hash=self._last_hash,
        )
        entry.entry_hash = entry.compute_hash()
        self._last_hash = entry.entry_hash
        self._entries.append(entry)
        logger.debug(f"Manifest: {action}")
        return entry

    def verify_chain(self) -> bool:
        previous_hash = None
        for entry in self._entries:
            if entry.previous_hash != previous_hash:
                return False
            if entry.compute_hash() != entry.entry_hash:
                return False
            previous_hash = entry.entry_hash
        return True

    def search(self, action: Optional[str] = None, **match) -> list[ManifestEntry]:
        results = []
        for entry in self._entries:
            if action and entry.action != action:
                continue
            if any(entry.fields.get(key) != str(value) for key, value in match.items()):
                continue
            results.append(entry)
        return results

    def check_pairing(self) -> None:
        """
        Assert that every arm of a seed ran on the same game, network, x0 and schedule

        Full-information runs carry no network hash and are compared on the
        remaining keys.

        Raises:
            PairingError: a paired hash differs between arms of one seed
        """
        by_seed: dict[str, list[ManifestEntry]] = {}
        for entry in self.search("run"):
            by_seed.setdefault(entry.fields["seed"], []).append(entry)

        for seed, runs in by_seed.items():
            for key in PAIRED_KEYS:
                values = {run.fields[key] for run in runs if key in run.fields}
                if len(values) > 1:
                    arms = ", ".join(run.fields.get("arm", "?") for run in runs)
                    raise PairingError(f"seed {seed}: {key} differs across arms ({arms})")

    def write(self, path: Path, generated_at: Optional[datetime] = None) -> None:
        """Write as key = value text, one block per entry"""
        path = Path(path)
        stamp = (generated_at or datetime.now(timezone.utc)).isoformat()
        lines = [f"generated_at = {stamp}", f"entries = {len(self._entries)}", ""]
        for index, entry in enumerate(self._entries):
            lines.append(f"[{index}] {entry.action}")
            for key in sorted(entry.fields):
                lines.append(f"{key} = {entry.fields[key]}")
            lines.append(f"previous_hash = {entry.previous_hash or ''}")
            lines.append(f"entry_hash = {entry.entry_hash}")
            lines.append("")
        path.write_text("\n".join(lines), encoding="utf-8")
        logger.info(f"Wrote manifest {path} ({len(self._entries)} entries)")

    @classmethod
    def read(cls, path: Path) -> "RunManifest":
        """Parse a manifest written by write(); the chain is not re-derived"""
        manifest = cls()
        current: Optional[ManifestEntry] = None
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if line.startswith("["):
                current = ManifestEntry(action=line.split("] ", 1)[1])
                manifest._entries.append(current)
                continue
            if current is None or " = " not in line:
                continue
            key, value = line.split(" = ", 1)
            if key == "previous_hash":
                current.previous_hash = value or None
            elif key == "entry_hash":
                current.entry_hash = value
                manifest._last_hash = value
            else:
                current.fields[key] = value
        return manifest
