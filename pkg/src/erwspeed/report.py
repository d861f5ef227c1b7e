"""Self-describing JSON/CSV report documents."""
from __future__ import annotations

import csv
import io
import json
import math
from datetime import datetime, timezone
from fractions import Fraction

from . import __version__


def _num(x):
    if x is None:
        return None
    if isinstance(x, Fraction):
        x = float(x)
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return x


class Report:
    """Accumulates result rows ``{name, value, error, units, paper_anchor}``.

    ``paper_anchor`` holds the formula or estimator that produced the number.
    """

    def __init__(self, command: str, config: dict, seed=None):
        self.command = command
        self.config = dict(config)
        self.seed = seed
        self.results = []
        self.verdict = None
        self.rows = None  # optional tabular projection for CSV

    def add(self, name, value, error=0.0, units="", anchor="", exact=None):
        row = {"name": name, "value": _num(value), "error": _num(error),
               "units": units, "paper_anchor": anchor}
        if exact is not None:
            row["exact"] = str(exact)
        self.results.append(row)
        return row

    def document(self, timestamp: bool = True) -> dict:
        meta = {"version": __version__, "command": self.command,
                "config": self.config, "seed": self.seed}
        if timestamp:
            meta["timestamp"] = datetime.now(timezone.utc).isoformat()
        doc = {"meta": meta, "results": self.results}
        if self.verdict is not None:
            doc["verdict"] = self.verdict
        return doc

    def to_json(self, timestamp: bool = True) -> str:
        return json.dumps(self.document(timestamp), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        if self.rows:
            fields = list(self.rows[0])
            writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
            writer.writeheader()
            for row in self.rows:
                writer.writerow({k: _num(v) if isinstance(v, (float, Fraction)) else v
                                 for k, v in row.items()})
        else:
            fields = ["name", "value", "error", "units", "paper_anchor"]
            writer = csv.DictWriter(buf, fieldnames=fields, extrasaction="ignore",
                                    lineterminator="\n")
            writer.writeheader()
            writer.writerows(self.results)
        return buf.getvalue()
