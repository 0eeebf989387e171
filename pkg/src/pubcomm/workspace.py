"""On-disk workspace: staged artifacts plus a manifest of their provenance.

Each stage entry in ``manifest.json`` records the hashes of the files it
read, the parameters it ran with and the hashes of the files it wrote. A
stage whose recorded inputs, parameters and outputs all still match is
skipped. The manifest carries no wall-clock times, so two runs over the same
inputs leave byte-identical directories.
"""
from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path
from typing import Any, Callable, Iterable, Mapping

from .community.partition import Partition
from .graph import Network

__all__ = [
    "StageError",
    "Workspace",
    "StageContext",
    "sha256_bytes",
    "network_to_json",
    "network_from_json",
]

MANIFEST = "manifest.json"


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: str):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _json_dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":")) + "\n"


def _plain(v: Any) -> Any:
    if isinstance(v, (tuple, list, set, frozenset)):
        return [_plain(x) for x in v]
    if hasattr(v, "item"):  # numpy scalar
        return v.item()
    return v


def network_to_json(net: Network) -> str:
    return _json_dumps({
        "directed": net.directed,
        "nodes": [[n, {k: _plain(v) for k, v in net.node_attrs[n].items()}] for n in net.nodes],
        "edges": [[u, v, _plain(w), {k: _plain(x) for k, x in net.edge_attrs.get((u, v), {}).items()}]
                  for (u, v), w in net.edges.items()],
    })


def _tuplify(attrs: Mapping) -> dict:
    return {k: tuple(v) if isinstance(v, list) else v for k, v in attrs.items()}


def network_from_json(text: str) -> Network:
    obj = json.loads(text)
    nodes = [n for n, _ in obj["nodes"]]
    return Network(
        nodes,
        {(u, v): w for u, v, w, _ in obj["edges"]},
        obj["directed"],
        {n: _tuplify(a) for n, a in obj["nodes"]},
        {(u, v): _tuplify(a) for u, v, _, a in obj["edges"] if a},
    )


class StageContext:
    """Read/write access for one stage, limited to its declared inputs."""

    def __init__(self, ws: "Workspace", stage: str, inputs: Iterable[str]):
        self.ws = ws
        self.stage = stage
        self.inputs = set(inputs)
        self.outputs: dict[str, bytes] = {}

    def _check(self, name: str) -> Path:
        if name not in self.inputs:
            raise StageError(self.stage, f"reads undeclared input {name}")
        return self.ws.path(name)

    def read_text(self, name: str) -> str:
        return self._check(name).read_text("utf-8")

    def read_bytes(self, name: str) -> bytes:
        return self._check(name).read_bytes()

    def read_json(self, name: str) -> Any:
        return json.loads(self.read_text(name))

    def read_network(self, name: str) -> Network:
        return network_from_json(self.read_text(name))

    def read_partition(self, name: str, node_type=str) -> Partition:
        return Partition.from_csv(self.read_text(name), node_type)

    def exists(self, name: str) -> bool:
        return name in self.inputs and self.ws.path(name).exists()

    def write(self, name: str, data: str | bytes) -> None:
        self.outputs[name] = data.encode("utf-8") if isinstance(data, str) else data

    def write_json(self, name: str, obj: Any) -> None:
        self.write(name, _json_dumps(obj))

    def write_network(self, name: str, net: Network) -> None:
        self.write(name, network_to_json(net))


class Workspace:
    def __init__(self, root: str | os.PathLike, create: bool = True):
        self.root = Path(root)
        if create:
            self.root.mkdir(parents=True, exist_ok=True)
        elif not self.root.is_dir():
            raise StageError("workspace", f"no workspace at {self.root}")
        mpath = self.root / MANIFEST
        if mpath.exists():
            self.manifest = json.loads(mpath.read_text("utf-8"))
        else:
            self.manifest = {"format": 1, "stages": {}}

    def path(self, name: str) -> Path:
        return self.root / name

    def has(self, name: str) -> bool:
        return self.path(name).exists()

    def stage_entry(self, stage: str) -> dict | None:
        return self.manifest["stages"].get(stage)

    def _save_manifest(self) -> None:
        self.path(MANIFEST).write_text(json.dumps(self.manifest, sort_keys=True, indent=2) + "\n", "utf-8")

    def _file_hash(self, path: Path) -> str:
        return sha256_bytes(path.read_bytes())

    def run_stage(
        self,
        stage: str,
        func: Callable[[StageContext], None],
        inputs: Iterable[str] = (),
        params: Mapping[str, Any] | None = None,
        external: Mapping[str, str] | None = None,
        optional_inputs: Iterable[str] = (),
        producers: Mapping[str, str] | None = None,
    ) -> bool:
        """Run ``stage`` unless its recorded provenance still matches.

        ``inputs`` are workspace artifacts, ``external`` maps a label to a file
        outside the workspace. Returns True when the stage actually ran.
        """
        params = dict(params or {})
        producers = producers or {}
        in_hashes: dict[str, str] = {}
        for name in inputs:
            p = self.path(name)
            if not p.exists():
                hint = f"; run `{producers[name]}` first" if name in producers else ""
                raise StageError(stage, f"missing artifact {name}{hint}")
            in_hashes[name] = self._file_hash(p)
        present_optional = [n for n in optional_inputs if self.path(n).exists()]
        for name in present_optional:
            in_hashes[name] = self._file_hash(self.path(name))
        for label, fpath in (external or {}).items():
            p = Path(fpath)
            if not p.is_file():
                raise StageError(stage, f"input file not found: {fpath}")
            in_hashes[f"{label}:{p.name}"] = self._file_hash(p)

        entry = self.stage_entry(stage)
        if (entry is not None and entry["inputs"] == in_hashes and entry["params"] == _plain_params(params)
                and all(self.path(n).exists() and self._file_hash(self.path(n)) == h
                        for n, h in entry["outputs"].items())):
            return False

        ctx = StageContext(self, stage, list(in_hashes) + list(inputs) + present_optional)
        try:
            func(ctx)
        except StageError:
            raise
        except Exception as exc:  # noqa: BLE001 - tagged and re-raised
            raise StageError(stage, f"{type(exc).__name__}: {exc}") from exc

        for name, data in ctx.outputs.items():
            self.path(name).write_bytes(data)
        seq = entry["seq"] if entry is not None else len(self.manifest["stages"]) + 1
        self.manifest["stages"][stage] = {
            "seq": seq,
            "inputs": in_hashes,
            "params": _plain_params(params),
            "outputs": {n: sha256_bytes(d) for n, d in sorted(ctx.outputs.items())},
        }
        self._save_manifest()
        return True


def _plain_params(params: Mapping[str, Any]) -> dict:
    return json.loads(json.dumps({k: _plain(v) for k, v in params.items()}, sort_keys=True))
