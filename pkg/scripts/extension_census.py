"""Exact F_3(5, 6) by search, and the extension census of the perfect family on [4]."""
import json
import time

from permshatter import oracle

if __name__ == "__main__":
    start = time.perf_counter()
    report = oracle.max_shattered(5, 3, 6)
    replay = oracle.extension_census()
    print(json.dumps({"search": report.to_json(), "replay": replay, "seconds": round(time.perf_counter() - start, 3)}, indent=2))
