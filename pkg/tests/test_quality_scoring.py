import random
import time

import pytest

from odcat import ns
from odcat.httpkit import HttpService, Response, Router
from odcat.quality import annotate, check_urls
from odcat.quality.urlcheck import UrlCheckResult
from odcat.rdf import parse_turtle
from odcat.vocab import load_format_lists, load_vocabularies

MACHINE, OPEN = load_format_lists()
LICENSES = load_vocabularies()["licenses"]

DS = "http://q.test/datasets/x"


def build_graph(
    keywords=False,
    spatial=False,
    temporal=False,
    theme=False,
    publisher=False,
    license_iri=None,
    dists=(),
):
    """dists: list of dicts {format, reachable-ignored here}"""
    lines = [
        "@prefix dcat: <http://www.w3.org/ns/dcat#> .",
        "@prefix dct: <http://purl.org/dc/terms/> .",
        f"<{DS}> a dcat:Dataset ;",
        '    dct:title "t"@en ',
    ]
    if keywords:
        lines.append('    ; dcat:keyword "k"@en ')
    if spatial:
        lines.append("    ; dct:spatial <http://sws.geonames.org/2950159/> ")
    if temporal:
        lines.append("    ; dct:temporal [ ] ")
    if theme:
        lines.append("    ; dcat:theme <http://publications.europa.eu/resource/authority/data-theme/ENVI> ")
    if publisher:
        lines.append("    ; dct:publisher <http://q.test/agents/a> ")
    if license_iri:
        lines.append(f"    ; dct:license <{license_iri}> ")
    for i in range(len(dists)):
        lines.append(f"    ; dcat:distribution <{DS}#dist-{i}> ")
    lines.append(".")
    for i, dist in enumerate(dists):
        lines.append(f"<{DS}#dist-{i}> a dcat:Distribution .")
        if dist.get("format"):
            lines.append(f"<{DS}#dist-{i}> dct:format <{dist['format']}> .")
    return parse_turtle("\n".join(lines))


def reach(mapping):
    return {
        f"{DS}#dist-{i}": UrlCheckResult(200 if ok else 404, ok, 1)
        for i, ok in mapping.items()
    }


def score(graph, url_results=None):
    return annotate(graph, [], url_results or {}, MACHINE, OPEN, LICENSES, dataset_id="x")


CSV_IRI = "http://publications.europa.eu/resource/authority/file-type/CSV"
XLS_IRI = "http://publications.europa.eu/resource/authority/file-type/XLS"
CC0 = "http://publications.europa.eu/resource/authority/licence/CC0"


def test_fixture_a_all_findability_indicators():
    report = score(build_graph(keywords=True, spatial=True, temporal=True, theme=True))
    assert report.dimensions == {
        "findability": 100.0,
        "accessibility": 0.0,
        "interoperability": 0.0,
        "reusability": 0.0,
    }
    assert report.overall == 25  # mean 25.0


def test_fixture_b_empty_dataset_scores_zero():
    report = score(parse_turtle(f"<{DS}> a <http://www.w3.org/ns/dcat#Dataset> ."))
    assert all(v == 0.0 for v in report.dimensions.values())
    assert report.overall == 0


def test_fixture_c_half_reachable():
    graph = build_graph(
        keywords=True,
        theme=True,
        publisher=True,
        license_iri=CC0,
        dists=[{"format": CSV_IRI}, {"format": CSV_IRI}],
    )
    report = score(graph, reach({0: True, 1: False}))
    # hand-computed: F = 30+30 = 60; A = 100 * 1/2 = 50;
    # I = (30+35+35) per distribution = 100; R = 60+20+20 = 100
    assert report.dimensions == {
        "findability": 60.0,
        "accessibility": 50.0,
        "interoperability": 100.0,
        "reusability": 100.0,
    }
    assert report.overall == 78  # (60+50+100+100)/4 = 77.5, half rounds up


def test_fixture_d_proprietary_format():
    graph = build_graph(spatial=True, temporal=True, publisher=True, dists=[{"format": XLS_IRI}])
    report = score(graph, reach({0: False}))
    # F = 20+20 = 40; A = 0; I = format present only = 30; R = publisher = 20
    assert report.dimensions == {
        "findability": 40.0,
        "accessibility": 0.0,
        "interoperability": 30.0,
        "reusability": 20.0,
    }
    assert report.overall == 23  # 22.5 rounds up


def test_fixture_e_license_off_vocabulary():
    graph = build_graph(keywords=True, publisher=True, license_iri="http://custom/lic")
    report = score(graph)
    # F = 30; A = 0 (no distributions); I = 0; R = 60+0+20 = 80
    assert report.dimensions == {
        "findability": 30.0,
        "accessibility": 0.0,
        "interoperability": 0.0,
        "reusability": 80.0,
    }
    assert report.overall == 28  # 27.5 rounds up


# -- monotonicity -----------------------------------------------------------


def test_monotonicity_over_randomized_indicator_toggles():
    rng = random.Random(2024)
    indicator_names = ["keywords", "spatial", "temporal", "theme", "publisher"]
    for _ in range(1000):
        state = {name: rng.random() < 0.5 for name in indicator_names}
        license_on = rng.random() < 0.5
        off = [n for n in indicator_names if not state[n]] + ([] if license_on else ["license"])
        if not off:
            continue
        flipped = rng.choice(off)
        kwargs = dict(state)
        base = score(build_graph(**kwargs, license_iri=CC0 if license_on else None))
        if flipped == "license":
            improved = score(build_graph(**kwargs, license_iri=CC0))
        else:
            kwargs[flipped] = True
            improved = score(build_graph(**kwargs, license_iri=CC0 if license_on else None))
        for dim in base.dimensions:
            assert improved.dimensions[dim] >= base.dimensions[dim], flipped


def test_losing_reachability_never_raises_accessibility():
    rng = random.Random(5)
    for _ in range(200):
        n = rng.randint(1, 5)
        reachable = {i: rng.random() < 0.6 for i in range(n)}
        graph = build_graph(dists=[{"format": CSV_IRI}] * n)
        base = score(graph, reach(reachable))
        up = [i for i, ok in reachable.items() if ok]
        if not up:
            continue
        degraded = dict(reachable)
        degraded[rng.choice(up)] = False
        worse = score(graph, reach(degraded))
        assert worse.dimensions["accessibility"] <= base.dimensions["accessibility"]


# -- URL checker against live mock servers ------------------------------------


@pytest.fixture(scope="module")
def status_server():
    router = Router(name="files")
    router.route("GET", "/ok", lambda req: Response.text("data"))
    router.route("HEAD", "/ok", lambda req: Response.text(""))
    router.route(
        "HEAD",
        "/redirect",
        lambda req: Response(301, b"", headers={"Location": "/ok"}),
    )
    router.route(
        "HEAD",
        "/chain1",
        lambda req: Response(301, b"", headers={"Location": "/redirect"}),
    )
    router.route("HEAD", "/missing", lambda req: Response(404, b""))
    router.route("HEAD", "/nohead", lambda req: Response(405, b""))
    router.route("GET", "/nohead", lambda req: Response.text("x"))

    def slow(req):
        time.sleep(3)
        return Response.text("late")

    router.route("HEAD", "/slow", slow)
    loop_route = lambda req: Response(302, b"", headers={"Location": "/loop"})
    router.route("HEAD", "/loop", loop_route)
    svc = HttpService(router).start()
    yield svc.url
    svc.stop()


def dist_graph(urls):
    lines = [
        "@prefix dcat: <http://www.w3.org/ns/dcat#> .",
        f"<{DS}> a dcat:Dataset ;",
        "    dcat:distribution " + ", ".join(f"<{DS}#dist-{i}>" for i in range(len(urls))) + " .",
    ]
    for i, url in enumerate(urls):
        lines.append(f"<{DS}#dist-{i}> a dcat:Distribution ; dcat:accessURL <{url}> .")
    return parse_turtle("\n".join(lines))


def test_check_urls_statuses(status_server):
    graph = dist_graph(
        [
            f"{status_server}/ok",
            f"{status_server}/redirect",
            f"{status_server}/missing",
            f"{status_server}/slow",
        ]
    )
    results = check_urls(graph, timeout=0.5, per_host_spacing=0.0)
    by_dist = {k.rsplit("-", 1)[1]: v for k, v in results.items()}
    assert by_dist["0"].reachable and by_dist["0"].statusCode == 200
    assert by_dist["1"].reachable and by_dist["1"].statusCode == 200
    assert not by_dist["2"].reachable and by_dist["2"].statusCode == 404
    assert not by_dist["3"].reachable and by_dist["3"].statusCode == 0

    report = annotate(graph, [], results, MACHINE, OPEN, LICENSES)
    assert report.dimensions["accessibility"] == 50.0  # 2 of 4 reachable


def test_head_405_falls_back_to_ranged_get(status_server):
    graph = dist_graph([f"{status_server}/nohead"])
    results = check_urls(graph, timeout=2, per_host_spacing=0.0)
    (result,) = results.values()
    assert result.reachable and result.statusCode == 200


def test_redirect_loop_capped(status_server):
    graph = dist_graph([f"{status_server}/loop"])
    (result,) = check_urls(graph, timeout=2, per_host_spacing=0.0).values()
    assert not result.reachable
    assert result.statusCode == 302


def test_per_host_spacing_enforced(status_server):
    graph = dist_graph([f"{status_server}/ok", f"{status_server}/ok?second=1"])
    start = time.monotonic()
    check_urls(graph, timeout=2, per_host_spacing=0.3)
    assert time.monotonic() - start >= 0.3
