"""Persistent hierarchical workflow store.

A workspace is a directory: `meta.json` names it, `payloads/<sha256>`
holds one immutable content-addressed file per result, and `nodes.log`
appends one JSON record per node.  Commit order is payload first (write
to a temp name, fsync, rename), record second (append, fsync), so a
crash at any instant leaves the log describing only fully written
payloads.  Nothing is ever rewritten; re-running a method appends a new
node.

Node record fields: ``id``, ``parent`` (null for the root), ``kind``,
``method``, ``params`` (the full parameter record), ``created_at``
(UTC ISO-8601), ``payload`` (sha256 hex of the payload file).
"""

from __future__ import annotations

import fcntl
import hashlib
import json
import os
from dataclasses import dataclass
from datetime import datetime, timezone

DATASET = "dataset"
FEATURE_SET = "feature-set"
MERGED_FEATURE_SET = "merged-feature-set"
MODEL = "model"
SEARCH_RESULT = "search-result"
GENERATION_RESULT = "generation-result"
NOTE = "note"

KINDS = (
    DATASET,
    FEATURE_SET,
    MERGED_FEATURE_SET,
    MODEL,
    SEARCH_RESULT,
    GENERATION_RESULT,
    NOTE,
)

# child kind -> allowed parent kinds; None entry means "any parent"
LINEAGE = {
    DATASET: frozenset(),  # root only
    FEATURE_SET: frozenset({DATASET}),
    MERGED_FEATURE_SET: frozenset({FEATURE_SET, MERGED_FEATURE_SET}),
    MODEL: frozenset({FEATURE_SET, MERGED_FEATURE_SET}),
    SEARCH_RESULT: frozenset({MODEL}),
    GENERATION_RESULT: frozenset({SEARCH_RESULT}),
    NOTE: None,
}


class WorkspaceError(Exception):
    pass


class LineageError(WorkspaceError):
    pass


@dataclass(frozen=True)
class MolDataNode:
    id: str
    parent: str | None
    kind: str
    method: str
    params: dict
    created_at: str
    payload: str  # sha256 of the payload file

    def to_record(self) -> str:
        return json.dumps(
            {
                "id": self.id,
                "parent": self.parent,
                "kind": self.kind,
                "method": self.method,
                "params": self.params,
                "created_at": self.created_at,
                "payload": self.payload,
            },
            sort_keys=True,
        )

    @classmethod
    def from_record(cls, line: str) -> "MolDataNode":
        d = json.loads(line)
        return cls(
            d["id"], d["parent"], d["kind"], d["method"],
            d["params"], d["created_at"], d["payload"],
        )


def _fsync_dir(path):
    fd = os.open(path, os.O_RDONLY)
    try:
        os.fsync(fd)
    finally:
        os.close(fd)


class Workspace:
    def __init__(self, path: str, name: str):
        self.path = path
        self.name = name
        self.nodes: dict[str, MolDataNode] = {}
        self.order: list[str] = []

    # -- lifecycle ---------------------------------------------------------

    @classmethod
    def create(cls, path, name: str) -> "Workspace":
        path = str(path)
        if os.path.exists(os.path.join(path, "meta.json")):
            raise WorkspaceError(f"workspace already exists at {path}")
        os.makedirs(os.path.join(path, "payloads"), exist_ok=True)
        with open(os.path.join(path, "meta.json"), "w") as fh:
            json.dump({"name": name}, fh)
            fh.flush()
            os.fsync(fh.fileno())
        open(os.path.join(path, "nodes.log"), "a").close()
        _fsync_dir(path)
        return cls(path, name)

    @classmethod
    def open(cls, path) -> "Workspace":
        path = str(path)
        meta_path = os.path.join(path, "meta.json")
        if not os.path.exists(meta_path):
            raise WorkspaceError(f"no workspace at {path}")
        with open(meta_path) as fh:
            meta = json.load(fh)
        ws = cls(path, meta.get("name", os.path.basename(path)))
        ws._load()
        return ws

    def _load(self):
        log = os.path.join(self.path, "nodes.log")
        with open(log) as fh:
            content = fh.read()
        for line in content.split("\n"):
            if not line:
                continue
            try:
                node = MolDataNode.from_record(line)
            except (json.JSONDecodeError, KeyError):
                # torn tail write from a crash; everything before it is good
                break
            if not os.path.exists(self._payload_path(node.payload)):
                break
            self.nodes[node.id] = node
            self.order.append(node.id)

    # -- reads -------------------------------------------------------------

    def node(self, node_id: str) -> MolDataNode:
        if node_id not in self.nodes:
            raise WorkspaceError(f"no node {node_id!r}")
        return self.nodes[node_id]

    @property
    def root(self) -> MolDataNode:
        if not self.order:
            raise WorkspaceError("workspace has no root node")
        return self.nodes[self.order[0]]

    def _payload_path(self, digest: str) -> str:
        return os.path.join(self.path, "payloads", digest)

    def payload_bytes(self, node_or_id) -> bytes:
        node = node_or_id if isinstance(node_or_id, MolDataNode) else self.node(node_or_id)
        with open(self._payload_path(node.payload), "rb") as fh:
            return fh.read()

    def payload_text(self, node_or_id) -> str:
        return self.payload_bytes(node_or_id).decode("utf-8")

    def children(self, node_id: str) -> list[MolDataNode]:
        return [self.nodes[i] for i in self.order if self.nodes[i].parent == node_id]

    def ancestor_of_kind(self, node_id: str, kind: str) -> MolDataNode:
        current = self.node(node_id)
        while True:
            if current.kind == kind:
                return current
            if current.parent is None:
                raise WorkspaceError(
                    f"node {node_id!r} has no ancestor of kind {kind!r}"
                )
            current = self.node(current.parent)

    def tree(self) -> str:
        """All nodes, parents before children, one tab-separated line each."""
        lines = ["id\tparent\tkind\tmethod\tparams"]
        for node_id in self.order:
            n = self.nodes[node_id]
            summary = json.dumps(n.params, sort_keys=True)
            if len(summary) > 120:
                summary = summary[:117] + "..."
            lines.append(
                f"{n.id}\t{n.parent or '-'}\t{n.kind}\t{n.method}\t{summary}"
            )
        return "\n".join(lines) + "\n"

    # -- writes ------------------------------------------------------------

    def add_node(
        self, kind: str, parent: str | None, method: str, params: dict,
        payload: bytes,
    ) -> MolDataNode:
        """Commit one node: payload first, record second, under the lock."""
        if kind not in KINDS:
            raise WorkspaceError(f"unknown node kind {kind!r}")
        allowed = LINEAGE[kind]
        if parent is None:
            if kind != DATASET:
                raise LineageError(f"{kind} cannot be a root node")
            if self.order:
                raise LineageError("workspace already has a root")
        else:
            parent_node = self.node(parent)
            if allowed is not None and parent_node.kind not in allowed:
                raise LineageError(
                    f"{kind} cannot descend from {parent_node.kind}"
                )

        digest = hashlib.sha256(payload).hexdigest()
        node = MolDataNode(
            id=f"n{len(self.order) + 1:04d}-{digest[:10]}",
            parent=parent,
            kind=kind,
            method=method,
            params=params,
            created_at=datetime.now(timezone.utc).isoformat(),
            payload=digest,
        )
        lock_path = os.path.join(self.path, "lock")
        with open(lock_path, "w") as lock:
            fcntl.flock(lock, fcntl.LOCK_EX)
            try:
                final = self._payload_path(digest)
                if not os.path.exists(final):
                    tmp = final + f".tmp.{os.getpid()}"
                    with open(tmp, "wb") as fh:
                        fh.write(payload)
                        fh.flush()
                        os.fsync(fh.fileno())
                    os.rename(tmp, final)
                    _fsync_dir(os.path.dirname(final))
                with open(os.path.join(self.path, "nodes.log"), "a") as fh:
                    fh.write(node.to_record() + "\n")
                    fh.flush()
                    os.fsync(fh.fileno())
            finally:
                fcntl.flock(lock, fcntl.LOCK_UN)
        self.nodes[node.id] = node
        self.order.append(node.id)
        return node
