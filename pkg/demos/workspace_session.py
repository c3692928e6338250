"""A recorded analysis session in a durable workspace.

Ingest a CSV, branch two feature sets off the same dataset, merge
them, train a model, and print the resulting tree. Everything is
committed to an append-only log, so re-opening the directory later
reproduces the session exactly.

Run:  python3 demos/workspace_session.py [directory]
"""

import sys
import tempfile

from molinverse.chem import canonical_key
from molinverse.data import synthetic_qm9, write_dataset_csv
from molinverse.workspace import Workspace, ingest_csv, run_method


def main(directory):
    mols, props = synthetic_qm9(60, seed=11)
    seen, keep = set(), []
    for k, m in enumerate(mols):
        key = canonical_key(m)
        if key not in seen:
            seen.add(key)
            keep.append(k)
    mols = [mols[k] for k in keep[:30]]
    props = {n: [v[k] for k in keep[:30]] for n, v in props.items()}

    csv_path = directory + "/session.csv"
    write_dataset_csv(csv_path, mols, props)
    ws = ingest_csv(csv_path, directory + "/ws", name="session")
    print(f"ingested {len(mols)} molecules as {ws.root.id[:8]}")

    low = run_method(ws, ws.root.id, "extract_features", {"levels": [1]})
    high = run_method(ws, ws.root.id, "extract_features", {"levels": [2, 3]})
    merged = run_method(ws, low.id, "merge_features", {"with": high.id})
    model = run_method(ws, merged.id, "build_model",
                       {"property": "E_lumo", "kinds": ["ridge"], "folds": 5})
    run_method(ws, model.id, "note",
               {"text": "ridge baseline on merged levels"})

    print()
    print(ws.tree())

    # prove durability: a fresh handle sees the same session
    again = Workspace.open(directory + "/ws")
    assert again.tree() == ws.tree()
    print("reopened tree is identical")


if __name__ == "__main__":
    target = sys.argv[1] if len(sys.argv) > 1 else tempfile.mkdtemp()
    main(target)
