"""Command line entry points.

    radbench run <graph.json> --data DIR --out DIR [--parallelism N] [--seed S]
    radbench extract --volume v.dvol --roi roi.json --out features.csv
    radbench serve --root DIR [--host H] [--port P]
"""

from __future__ import annotations

import argparse
import json
import pickle
import sys
from pathlib import Path


def _cmd_run(args) -> int:
    import numpy as np

    from .analytics import write_table
    from .graph import RunContext, execute, parse

    spec = parse(Path(args.graph).read_text())
    ctx = RunContext(data_dir=Path(args.data) if args.data else None, seed=args.seed)
    record = execute(spec, ctx, parallelism=args.parallelism)
    out = Path(args.out)
    nodes_dir = out / "nodes"
    nodes_dir.mkdir(parents=True, exist_ok=True)
    summary = {"run_id": record.run_id,
               "nodes": {nid: r.to_doc() for nid, r in record.results.items()}}
    (out / "run.json").write_text(json.dumps(summary, indent=2, sort_keys=True))
    for nid, r in record.results.items():
        if r.payload is None:
            continue
        p = r.payload
        if p.kind == "table":
            write_table(p.data, nodes_dir / f"{nid}.csv")
        elif p.kind == "metrics":
            (nodes_dir / f"{nid}.json").write_text(json.dumps(p.data.to_doc(), indent=2))
        elif p.kind == "model":
            with open(nodes_dir / f"{nid}.pkl", "wb") as fh:
                pickle.dump(p.data, fh)
        else:
            (nodes_dir / f"{nid}.json").write_text(json.dumps(p.data, indent=2))
    failures = {nid: r.error for nid, r in record.results.items() if r.status == "error"}
    for nid, r in sorted(record.results.items()):
        print(f"{r.status:>16}  {nid}  ({r.duration:.2f}s{', cached' if r.cached else ''})")
    if failures:
        print(f"{len(failures)} node(s) failed", file=sys.stderr)
        return 1
    return 0


def _cmd_extract(args) -> int:
    import numpy as np

    from .analytics import FeatureTable, write_table
    from .dvol import load_roi, load_volume
    from .features import ExtractionSettings, extract_feature_vector

    vol = load_volume(args.volume)
    roi = load_roi(args.roi)
    settings = ExtractionSettings(
        bin_count=args.bins,
        log_sigmas_mm=tuple(args.log_sigma or ()),
    )
    vector = extract_feature_vector(vol, roi, settings)
    table = FeatureTable([vector.roi_id], vector.names,
                         vector.values.reshape(1, -1),
                         [roi.labels.get(args.label_name)] if args.label_name else [None])
    write_table(table, args.out)
    print(f"{len(vector)} features -> {args.out}")
    if vector.warnings:
        print(f"{len(vector.warnings)} degenerate feature(s) flagged")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(args.root, workers=args.workers)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="radbench",
                                     description="radiomics workbench CLI")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a graph document headlessly")
    p_run.add_argument("graph")
    p_run.add_argument("--data", default=None, help="directory for table-input paths")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--parallelism", type=int, default=1)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.set_defaults(func=_cmd_run)

    p_ex = sub.add_parser("extract", help="extract the feature vector of one ROI")
    p_ex.add_argument("--volume", required=True)
    p_ex.add_argument("--roi", required=True)
    p_ex.add_argument("--out", required=True)
    p_ex.add_argument("--bins", type=int, default=32)
    p_ex.add_argument("--log-sigma", type=float, action="append")
    p_ex.add_argument("--label-name", default=None)
    p_ex.set_defaults(func=_cmd_extract)

    p_srv = sub.add_parser("serve", help="start the HTTP service")
    p_srv.add_argument("--root", default=None, help="workspace directory")
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--port", type=int, default=8000)
    p_srv.add_argument("--workers", type=int, default=2)
    p_srv.set_defaults(func=_cmd_serve)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
