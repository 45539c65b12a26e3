#!/usr/bin/env python3
"""Fetch the benchmark networks that are not bundled with the repository.

Downloads dolphins, football, polbooks (Newman's collection, GML inside
zip archives) and jazz (Arenas' collection, Pajek format) and normalizes
each to a plain whitespace edge list under datasets/, the format every
`--graph` flag expects. Nodes are renumbered to 0-based integers in
first-appearance order; duplicate edges and self-loops are dropped.

Already-bundled fixtures (karate, lesmis, the LFR instance) are left alone.

Usage: python3 scripts/fetch_datasets.py [--dest datasets]
"""

import argparse
import io
import os
import re
import sys
import urllib.request
import zipfile

SOURCES = {
    "dolphins": ("http://websites.umich.edu/~mejn/netdata/dolphins.zip", "gml"),
    "football": ("http://websites.umich.edu/~mejn/netdata/football.zip", "gml"),
    "polbooks": ("http://websites.umich.edu/~mejn/netdata/polbooks.zip", "gml"),
    "jazz": ("https://deim.urv.cat/~alexandre.arenas/data/xarxes/jazz.zip", "pajek"),
}


def fetch(url):
    request = urllib.request.Request(url, headers={"User-Agent": "flmig-datasets/1.0"})
    with urllib.request.urlopen(request, timeout=60) as response:
        return response.read()


def member_with_suffix(archive, suffixes):
    for name in archive.namelist():
        if name.lower().endswith(suffixes):
            return archive.read(name).decode("utf-8", errors="replace")
    raise RuntimeError(f"no {suffixes} member in archive ({archive.namelist()})")


def edges_from_gml(text):
    """Minimal GML edge extraction: 'source N' / 'target N' pairs inside
    edge blocks. Newman's files follow this layout exactly."""
    edges = []
    source = None
    for line in text.splitlines():
        line = line.strip()
        m = re.match(r"source\s+(\d+)", line)
        if m:
            source = int(m.group(1))
            continue
        m = re.match(r"target\s+(\d+)", line)
        if m and source is not None:
            edges.append((source, int(m.group(1))))
            source = None
    return edges


def edges_from_pajek(text):
    edges = []
    in_edges = False
    for line in text.splitlines():
        line = line.strip()
        if line.lower().startswith(("*edges", "*arcs")):
            in_edges = True
            continue
        if line.startswith("*"):
            in_edges = False
            continue
        if in_edges and line:
            parts = line.split()
            edges.append((int(parts[0]), int(parts[1])))
    return edges


def normalize(edges):
    """0-based dense ids in first-appearance order; no dups, no loops."""
    ids = {}
    seen = set()
    out = []
    for u, v in edges:
        if u == v:
            continue
        a = ids.setdefault(u, len(ids))
        b = ids.setdefault(v, len(ids))
        key = (min(a, b), max(a, b))
        if key in seen:
            continue
        seen.add(key)
        out.append(key)
    return len(ids), out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dest", default=os.path.join(os.path.dirname(__file__), "..", "datasets"))
    args = parser.parse_args()
    os.makedirs(args.dest, exist_ok=True)

    failures = 0
    for name, (url, kind) in SOURCES.items():
        dest = os.path.join(args.dest, f"{name}.txt")
        if os.path.exists(dest):
            print(f"{name}: already present, skipping")
            continue
        print(f"{name}: downloading {url}")
        try:
            payload = fetch(url)
            archive = zipfile.ZipFile(io.BytesIO(payload))
            if kind == "gml":
                text = member_with_suffix(archive, (".gml",))
                edges = edges_from_gml(text)
            else:
                text = member_with_suffix(archive, (".net", ".paj"))
                edges = edges_from_pajek(text)
            node_count, normalized = normalize(edges)
            with open(dest, "w") as f:
                f.write(f"# {name}: {node_count} nodes {len(normalized)} edges\n")
                for u, v in normalized:
                    f.write(f"{u} {v}\n")
            print(f"{name}: wrote {dest} ({node_count} nodes, {len(normalized)} edges)")
        except Exception as e:  # noqa: BLE001 - report and continue
            failures += 1
            print(f"{name}: FAILED ({e})", file=sys.stderr)

    if failures:
        sys.exit(f"{failures} dataset(s) could not be fetched")


if __name__ == "__main__":
    main()
