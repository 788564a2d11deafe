#!/usr/bin/env python3
"""End-to-end walkthrough on ephemeral ports.

Starts every service plus the mock portal, harvests it, runs a search,
translates one dataset, and prints a catalogue quality report summary.
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

TOKEN = "demo-token"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--records", type=int, default=100)
    parser.add_argument("--data-dir", default=None)
    args = parser.parse_args()

    data_dir = args.data_dir or tempfile.mkdtemp(prefix="odcat-demo-")
    config = Config(
        data_dir=data_dir,
        api_token=TOKEN,
        addresses={name: "127.0.0.1:0" for name in (
            "scheduler", "registry", "search", "quality", "translation",
            "importer", "transformer", "exporter", "portal",
        )},
        check_urls=False,
        translation_targets=["en"],
        default_language="en",
        retry_delays=(0.2, 0.5, 1.0),
        scheduler_tick=0.2,
    )
    suite = Suite(config, portal_records=synthetic_records(args.records)).start()
    auth = {"Authorization": f"Bearer {TOKEN}"}
    try:
        print(f"data dir: {data_dir}")
        for name in suite.services:
            print(f"  {name:12s} {suite.url(name)}")

        requests.put(f"{suite.url('registry')}/catalogues/mock", data="", headers=auth).raise_for_status()
        pipe = fixture_pipe_definition(suite.url("portal").removeprefix("http://"))
        scheduler = suite.url("scheduler")
        requests.put(f"{scheduler}/pipes/{pipe['pipeId']}", json=pipe, headers=auth).raise_for_status()
        run_id = requests.post(f"{scheduler}/pipes/{pipe['pipeId']}/launch", headers=auth).json()["runId"]

        start = time.monotonic()
        while True:
            view = requests.get(f"{scheduler}/runs/{run_id}").json()
            if view["state"] != "running":
                break
            time.sleep(0.2)
        print(f"\nharvest {view['state']} in {time.monotonic() - start:.1f}s: {harvest_summary(view)}")

        suite.wait_quiescent()
        hits = requests.get(f"{suite.url('search')}/search", params={"q": "rainfall", "pageSize": 3}).json()
        print(f"\nsearch 'rainfall': {hits['total']} hits; facets: {hits['facets']['format']}")
        for hit in hits["hits"]:
            print(f"  {hit['id']}: {hit['title'].get('en')} [score {hit['qualityScore']}]")

        report = requests.get(
            f"{suite.url('quality')}/catalogues/mock/quality/report", params={"format": "json"}
        ).json()
        print(f"\ncatalogue quality: overall {report['overallScore']} over {report['datasetCount']} datasets")
        print(f"  dimensions: { {k: round(v, 1) for k, v in report['dimensions'].items()} }")
        print(f"  violations by path: {report['violationsByPath']}")

        sample = hits["hits"][0]["id"] if hits["hits"] else None
        if sample:
            similar = requests.get(f"{suite.url('quality')}/datasets/{sample}/similar").json()["similar"]
            print(f"\ndatasets similar to {sample}: {similar[:3]}")
        return 0
    finally:
        suite.stop()


if __name__ == "__main__":
    sys.exit(main())
