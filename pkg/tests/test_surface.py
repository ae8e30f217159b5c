"""Surface model: validation, dual graph, canonical builder, JSON."""

import json

import pytest

from loopcalc.surface import (
    ARC,
    FillingGraphSpec,
    GateRef,
    Region,
    Star,
    StarFilledSurface,
    SurfaceError,
    canonical_surface,
    dual_graph,
    star_gate_structure,
    trace_boundary_circles,
    validate_surface,
)


def annulus_model() -> StarFilledSurface:
    star = Star("s", 2)
    region = Region("r0", (ARC, GateRef("s", 0), ARC, GateRef("s", 1)))
    return StarFilledSurface([star], [region], genus_hint=0, boundary_hint=2)


def test_annulus_valid_and_chi():
    surf = annulus_model()
    assert validate_surface(surf).valid
    assert surf.euler_characteristic() == 0
    assert len(trace_boundary_circles(surf)) == 2


def test_duplicate_gate_invalid():
    star = Star("s", 2)
    region = Region("r0", (ARC, GateRef("s", 0), ARC, GateRef("s", 0)))
    surf = StarFilledSurface([star], [region])
    report = validate_surface(surf)
    assert not report.valid
    assert any("appears" in p for p in report.problems)


def test_three_arcs_invalid():
    star = Star("s", 2)
    region = Region(
        "r0", (ARC, GateRef("s", 0), ARC, GateRef("s", 1), ARC, GateRef("s", 1))
    )
    surf = StarFilledSurface([star], [region])
    report = validate_surface(surf)
    assert not report.valid
    assert any("3 boundary arcs" in p for p in report.problems)
    assert any("r0" in p for p in report.problems)


def test_small_star_invalid():
    surf = StarFilledSurface([Star("s", 1)], [Region("r0", (ARC, GateRef("s", 0)))])
    assert not validate_surface(surf).valid


def test_dual_graph_annulus():
    graph = dual_graph(annulus_model())
    assert len(graph.vertices) == 2
    assert len(graph.edges) == 2
    assert graph.betti == 1
    assert '"s" -- "r0"' in graph.to_dot()


def test_dual_graph_one_holed_torus():
    surf, _ = canonical_surface(1, 1)
    graph = dual_graph(surf)
    assert len(graph.vertices) == 3
    assert len(graph.edges) == 4
    assert graph.betti == 2


def test_dual_graph_rejects_disconnected():
    stars = [Star("s", 2), Star("t", 2)]
    regions = [
        Region("r0", (ARC, GateRef("s", 0), ARC, GateRef("s", 1))),
        Region("r1", (ARC, GateRef("t", 0), ARC, GateRef("t", 1))),
    ]
    surf = StarFilledSurface(stars, regions)
    report = validate_surface(surf)
    assert any("disconnected" in p for p in report.problems)
    with pytest.raises(SurfaceError):
        dual_graph(surf)


def test_star_gate_structure():
    info = star_gate_structure(Star("s", 4))
    gates = info["gates"]
    assert gates == tuple(GateRef("s", e) for e in range(4))
    for i in range(4):
        assert info["successor"][gates[i]] == gates[(i + 1) % 4]
    assert all(sign == 1 for sign in info["epsilon"].values())

    info2 = star_gate_structure(Star("s", 2))
    assert info2["successor"][GateRef("s", 0)] == GateRef("s", 1)
    assert info2["successor"][GateRef("s", 1)] == GateRef("s", 0)


@pytest.mark.parametrize(
    "genus,boundary,star_edges,regions",
    [(0, 2, 2, 1), (1, 1, 4, 2), (0, 3, 4, 2), (2, 1, 8, 4), (1, 2, 6, 3)],
)
def test_canonical_surface_counts(genus, boundary, star_edges, regions):
    surf, gens = canonical_surface(genus, boundary)
    assert validate_surface(surf).valid
    assert surf.stars[0].edge_count == star_edges
    assert len(surf.regions) == regions
    assert surf.euler_characteristic() == 2 - 2 * genus - boundary
    assert len(trace_boundary_circles(surf)) == boundary
    assert dual_graph(surf).betti == 2 * genus + boundary - 1
    assert len(gens) == 2 * genus + boundary - 1


def test_canonical_annulus_generator_is_core():
    surf, gens = canonical_surface(0, 2)
    (core,) = gens.values()
    assert [(t.edge, t.sign) for t in core.transits] == [(0, 1)]


def test_trivial_surface_needs_flag():
    with pytest.raises(SurfaceError):
        canonical_surface(0, 1)
    surf, gens = canonical_surface(0, 1, allow_trivial=True)
    assert validate_surface(surf).valid
    assert gens == {}
    assert len(trace_boundary_circles(surf)) == 1


def test_bad_signature_rejected():
    with pytest.raises(SurfaceError):
        canonical_surface(-1, 1)
    with pytest.raises(SurfaceError):
        canonical_surface(0, 0)


def test_boundary_hint_mismatch_detected():
    star = Star("s", 2)
    region = Region("r0", (ARC, GateRef("s", 0), ARC, GateRef("s", 1)))
    surf = StarFilledSurface([star], [region], genus_hint=1, boundary_hint=2)
    report = validate_surface(surf)
    assert not report.valid


def test_json_roundtrip_idempotent():
    surf, _ = canonical_surface(1, 1)
    blob = surf.dumps()
    again = StarFilledSurface.from_json(json.loads(blob))
    assert again.dumps() == blob
    assert validate_surface(again).valid


def test_json_boundary_rotated_to_minimal_form():
    star = Star("s", 2)
    r1 = Region("r0", (ARC, GateRef("s", 0), ARC, GateRef("s", 1)))
    r2 = Region("r0", (ARC, GateRef("s", 1), ARC, GateRef("s", 0)))
    s1 = StarFilledSurface([star], [r1])
    s2 = StarFilledSurface([star], [r2])
    assert s1.dumps() == s2.dumps()


def test_filling_graph_spec_json_roundtrip():
    spec = FillingGraphSpec(
        blue=(("p", ("e0", "e1")),),
        red=(("q", ("e0", "e1")),),
        edges=(("e0", "p", "q"), ("e1", "p", "q")),
    )
    assert FillingGraphSpec.from_json(spec.to_json()) == spec
