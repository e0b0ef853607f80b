#!/usr/bin/env python3
"""Build a claimdist manifest from a local download of the case-study corpus.

The published archive holds the extracted knowledge-claim texts for the
query paper and three groups of 32 papers each. Its internal layout is
not standardized, so this adapter takes the mapping explicitly: point
--query at the query text file and each --group at a directory of .txt
files. Document ids are taken from the numeric part of each file name
when present ("7.txt" or "doc_07.txt" -> "7"), otherwise the stem.

Example:

    python scripts/make_zenodo_manifest.py \
        --query corpus/query.txt \
        --group h-index=corpus/h_index \
        --group scientometrics=corpus/scientometrics \
        --group random=corpus/random \
        --embedding glove/glove.6B.300d.txt --expected-dim 300 \
        --out data/reproduction/manifest.json

The acceptance suite expects the manifest at data/reproduction/manifest.json
(or $CLAIMDIST_DATA_DIR/manifest.json) with groups named exactly
h-index, scientometrics, and random.
"""

import argparse
import json
import re
import sys
from pathlib import Path


def doc_id(path: Path) -> str:
    match = re.search(r"(\d+)", path.stem)
    return str(int(match.group(1))) if match else path.stem


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--query", required=True, help="query text file")
    parser.add_argument("--query-id", default="query")
    parser.add_argument(
        "--group",
        action="append",
        required=True,
        metavar="NAME=DIR",
        help="group name and directory of .txt files (repeatable)",
    )
    parser.add_argument("--embedding", required=True, help="word-vector file (text format)")
    parser.add_argument("--expected-dim", type=int, default=None)
    parser.add_argument("--variant", default="symmetric-max",
                        choices=("symmetric-max", "one-sided-query"))
    parser.add_argument("--stopwords", default=None)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--out", required=True, help="manifest path to write")
    args = parser.parse_args()

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    base = out.parent

    def rel(p: str) -> str:
        path = Path(p).resolve()
        try:
            return str(path.relative_to(base.resolve()))
        except ValueError:
            return str(path)

    documents = []
    for spec in args.group:
        name, _, directory = spec.partition("=")
        if not directory:
            parser.error(f"--group expects NAME=DIR, got {spec!r}")
        files = sorted(Path(directory).glob("*.txt"))
        if not files:
            parser.error(f"no .txt files in {directory}")
        for f in files:
            documents.append({"id": doc_id(f), "group": name, "path": rel(str(f))})
        print(f"group {name}: {len(files)} documents", file=sys.stderr)

    manifest = {
        "query": {"id": args.query_id, "path": rel(args.query)},
        "documents": documents,
        "embedding": {"path": rel(args.embedding)},
        "options": {"variant": args.variant, "seed": args.seed},
    }
    if args.expected_dim:
        manifest["embedding"]["expected_dim"] = args.expected_dim
    if args.stopwords:
        manifest["options"]["stopwords"] = rel(args.stopwords)

    out.write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"wrote {out} ({len(documents)} documents)", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
