import json
import random

import pytest
import requests

from harness import TOKEN, make_suite, run_harvest

from odcat.cli import fixture_pipe_definition, harvest_summary
from odcat.harvester import synthetic_records

HARVEST_SERVICES = ["scheduler", "registry", "search", "importer", "transformer", "exporter", "portal"]


def portal_address(suite):
    return suite.url("portal").removeprefix("http://")


def registry_original_ids(suite, catalogue="mock"):
    out = {}
    page = 0
    while True:
        resp = requests.get(
            f"{suite.url('registry')}/catalogues/{catalogue}/datasets?page={page}&pageSize=100",
            timeout=30,
        )
        resp.raise_for_status()
        payload = resp.json()
        for row in payload["datasets"]:
            out[row["originalId"]] = row["id"]
        if (page + 1) * 100 >= payload["total"]:
            return out
        page += 1


@pytest.fixture
def stack(tmp_path):
    suite = make_suite(tmp_path, HARVEST_SERVICES, records=synthetic_records(200))
    yield suite
    suite.stop()


def catalogue_setup(suite, catalogue="mock"):
    resp = requests.put(
        f"{suite.url('registry')}/catalogues/{catalogue}",
        data="",
        headers={"Authorization": f"Bearer {TOKEN}"},
        timeout=30,
    )
    assert resp.status_code in (200, 201)


def test_sync_convergence_after_removals(stack):
    catalogue_setup(stack)
    pipe = fixture_pipe_definition(portal_address(stack))

    view = run_harvest(stack, pipe)
    assert view["state"] == "succeeded"
    summary = harvest_summary(view)
    assert summary["created"] == 200
    assert summary["deleted"] == 0
    assert set(registry_original_ids(stack)) == {r["id"] for r in stack.portal.records}

    # remove 30 datasets at the source, re-harvest
    survivors = stack.portal.records[:170]
    stack.portal.set_records(survivors)
    view = run_harvest(stack, pipe)
    summary = harvest_summary(view)
    assert view["state"] == "succeeded"
    assert summary["deleted"] == 30
    assert summary["updated"] == 170
    assert set(registry_original_ids(stack)) == {r["id"] for r in survivors}


def test_no_deletions_on_importer_fault(stack):
    catalogue_setup(stack)
    pipe = fixture_pipe_definition(portal_address(stack))
    view = run_harvest(stack, pipe)
    assert view["state"] == "succeeded"
    before = registry_original_ids(stack)
    assert len(before) == 200

    # source shrinks AND the portal faults mid-harvest: nothing may be deleted
    stack.portal.set_records(stack.portal.records[:100])
    stack.portal.fail_after(1)
    view = run_harvest(stack, pipe)
    assert view["state"] == "failed"
    assert registry_original_ids(stack) == before

    stack.portal.fail_after(None)


def test_second_identical_run_updates_everything(stack):
    catalogue_setup(stack)
    pipe = fixture_pipe_definition(portal_address(stack))
    run_harvest(stack, pipe)
    view = run_harvest(stack, pipe)
    summary = harvest_summary(view)
    assert summary["created"] == 0
    assert summary["updated"] == 200
    assert summary["deleted"] == 0


def test_empty_source_refuses_total_wipe(stack):
    catalogue_setup(stack)
    pipe = fixture_pipe_definition(portal_address(stack))
    run_harvest(stack, pipe)
    assert len(registry_original_ids(stack)) == 200

    stack.portal.set_records([])
    view = run_harvest(stack, pipe)
    summary = harvest_summary(view)
    assert view["state"] == "succeeded"
    assert summary["deleted"] == 0
    assert summary["refusedEmptySync"] is True
    assert len(registry_original_ids(stack)) == 200


def test_empty_source_wipes_when_allowed(tmp_path):
    suite = make_suite(tmp_path, HARVEST_SERVICES, records=synthetic_records(5))
    try:
        catalogue_setup(suite)
        pipe = fixture_pipe_definition(portal_address(suite))
        run_harvest(suite, pipe)
        assert len(registry_original_ids(suite)) == 5

        suite.portal.set_records([])
        pipe["descriptorTemplate"]["body"]["segments"][2]["body"]["config"]["allowEmptySync"] = True
        view = run_harvest(suite, pipe)
        summary = harvest_summary(view)
        assert summary["deleted"] == 5
        assert registry_original_ids(suite) == {}
    finally:
        suite.stop()


def test_randomized_sync_matches_set_difference_oracle(tmp_path):
    rng = random.Random(99)
    records = synthetic_records(60)
    suite = make_suite(tmp_path, HARVEST_SERVICES, records=records)
    try:
        catalogue_setup(suite)
        pipe = fixture_pipe_definition(portal_address(suite))
        run_harvest(suite, pipe)
        current = {r["id"] for r in records}

        for round_no in range(3):
            survivors = [r for r in records if rng.random() < 0.7]
            extra = synthetic_records(10, seed=100 + round_no)
            new_records = survivors + extra
            suite.portal.set_records(new_records)
            view = run_harvest(suite, pipe)
            summary = harvest_summary(view)
            new_ids = {r["id"] for r in new_records}
            # set-difference oracle
            assert summary["deleted"] == len(current - new_ids), f"round {round_no}"
            assert set(registry_original_ids(suite)) == new_ids
            current = new_ids
            records = new_records
    finally:
        suite.stop()


def test_search_index_follows_harvest(stack):
    catalogue_setup(stack)
    pipe = fixture_pipe_definition(portal_address(stack))
    run_harvest(stack, pipe)
    resp = requests.get(f"{stack.url('search')}/search?q=rainfall+berlin&pageSize=5", timeout=30)
    payload = resp.json()
    assert payload["total"] >= 1
    hit = payload["hits"][0]
    assert "berlin" in hit["title"]["en"].lower()
    assert hit["catalogueId"] == "mock"

    # registry/index consistency
    assert set(stack.search.index.ids()) == set(registry_original_ids(stack).values())

    # deletion reaches the index
    victim = payload["hits"][0]["id"]
    resp = requests.delete(
        f"{stack.url('registry')}/datasets/{victim}",
        headers={"Authorization": f"Bearer {TOKEN}"},
        timeout=30,
    )
    assert resp.status_code == 204
    after = requests.get(f"{stack.url('search')}/search?q=rainfall+berlin&pageSize=50", timeout=30).json()
    assert victim not in [h["id"] for h in after["hits"]]
