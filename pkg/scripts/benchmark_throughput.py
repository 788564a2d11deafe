#!/usr/bin/env python3
"""Harvest throughput benchmark: portal -> importer -> transformer ->
exporter -> registry -> search index, end to end over HTTP.

10,000 records must finish in under five minutes on desktop hardware.
"""

import argparse
import json
import sys
import tempfile
import time

import requests

sys.path.insert(0, "src")

from odcat.cli import fixture_pipe_definition, harvest_summary
from odcat.config import Config
from odcat.harvester import synthetic_records
from odcat.suite import Suite

TOKEN = "bench-token"
SERVICES = ["scheduler", "registry", "search", "importer", "transformer", "exporter", "portal"]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--records", type=int, default=10_000)
    parser.add_argument("--page-size", type=int, default=500)
    parser.add_argument("--workers", type=int, default=8)
    args = parser.parse_args()

    config = Config(
        data_dir=tempfile.mkdtemp(prefix="odcat-bench-"),
        api_token=TOKEN,
        addresses={name: "127.0.0.1:0" for name in SERVICES},
        check_urls=False,
        service_workers=args.workers,
        retry_delays=(0.5, 1.0, 2.0),
        scheduler_tick=0.2,
        sync_wait_seconds=600.0,
    )
    print(f"generating {args.records} records...")
    suite = Suite(config, services=SERVICES, portal_records=synthetic_records(args.records)).start()
    auth = {"Authorization": f"Bearer {TOKEN}"}
    try:
        requests.put(f"{suite.url('registry')}/catalogues/mock", data="", headers=auth).raise_for_status()
        pipe = fixture_pipe_definition(suite.url("portal").removeprefix("http://"))
        pipe["descriptorTemplate"]["body"]["segments"][0]["body"]["config"]["pageSize"] = args.page_size
        scheduler = suite.url("scheduler")
        requests.put(f"{scheduler}/pipes/{pipe['pipeId']}", json=pipe, headers=auth).raise_for_status()

        start = time.monotonic()
        run_id = requests.post(f"{scheduler}/pipes/{pipe['pipeId']}/launch", headers=auth).json()["runId"]
        while True:
            view = requests.get(f"{scheduler}/runs/{run_id}").json()
            if view["state"] != "running":
                break
            done = len(suite.search.index) if suite.search else 0
            print(f"\r  indexed {done}/{args.records} ({time.monotonic() - start:.0f}s)", end="", flush=True)
            time.sleep(1.0)
        elapsed = time.monotonic() - start

        print()
        summary = harvest_summary(view) or {}
        rate = args.records / elapsed if elapsed else 0
        print(f"state={view['state']} elapsed={elapsed:.1f}s rate={rate:.0f} datasets/s")
        print(f"summary: {json.dumps(summary)}")
        registry_count = len(suite.registry.dataset_ids("mock"))
        index_count = len(suite.search.index)
        print(f"registry={registry_count} index={index_count} consistent={registry_count == index_count}")
        return 0 if view["state"] == "succeeded" and elapsed < 300 else 1
    finally:
        suite.stop()


if __name__ == "__main__":
    sys.exit(main())
