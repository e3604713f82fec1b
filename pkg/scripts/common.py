"""Shared helpers: dataclass configs exposed as command-line flags."""

import argparse
import dataclasses
import json
from pathlib import Path


def parse_config(cls, argv=None, description=None):
    """Build an argparse parser from the fields of dataclass ``cls``."""
    parser = argparse.ArgumentParser(description=description)
    for f in dataclasses.fields(cls):
        parser.add_argument("--" + f.name.replace("_", "-"), type=type(f.default),
                            default=f.default, dest=f.name)
    return cls(**vars(parser.parse_args(argv)))


def write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {path}")
