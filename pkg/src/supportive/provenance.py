"""Deterministic output files with embedded provenance.

Every artifact the pipeline writes starts with a metadata block carrying the
config fingerprint, seeds, and upstream fingerprints, so any report can be
traced to the exact run that produced it. A per-directory manifest maps file
names to content hashes; `verify` re-hashes and flags drift.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Iterable, Sequence

MANIFEST_NAME = "manifest.json"


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def fingerprint(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def write_jsonl(path, meta: dict, rows: Iterable[dict]):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json({"_meta": meta}) + "\n")
        for row in rows:
            fh.write(canonical_json(row) + "\n")


def read_jsonl(path) -> tuple[dict, list[dict]]:
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
        if not first:
            return {}, []
        head = json.loads(first)
        rows = [json.loads(line) for line in fh if line.strip()]
    if "_meta" in head:
        return head["_meta"], rows
    return {}, [head] + rows


def write_tsv(path, comments: Sequence[str], header: Sequence[str], rows):
    """TSV with '#'-prefixed provenance comment lines before the header."""
    with open(path, "w", encoding="utf-8") as fh:
        for c in comments:
            fh.write(f"# {c}\n")
        fh.write("\t".join(header) + "\n")
        for row in rows:
            fh.write("\t".join(str(x) for x in row) + "\n")


def update_manifest(outdir, names: Iterable[str]):
    outdir = Path(outdir)
    manifest_path = outdir / MANIFEST_NAME
    manifest = {}
    if manifest_path.exists():
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    for name in names:
        manifest[name] = file_sha256(outdir / name)
    manifest_path.write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def verify_manifest(outdir) -> list[str]:
    """Names of files that are missing or whose content hash drifted."""
    outdir = Path(outdir)
    manifest_path = outdir / MANIFEST_NAME
    if not manifest_path.exists():
        return [MANIFEST_NAME]
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    bad = []
    for name, digest in sorted(manifest.items()):
        target = outdir / name
        if not target.exists() or file_sha256(target) != digest:
            bad.append(name)
    return bad
