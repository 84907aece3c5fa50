import xml.etree.ElementTree as ET

import numpy as np
import pytest

from pfds import datasets, mdscore
from pfds.errors import ValidationError
from pfds.plot import plot_1d, plot_2d
from pfds.trajectory import LambdaSchedule, run_trajectory

NS = "{http://www.w3.org/2000/svg}"


def elements(svg, tag, cls=None):
    root = ET.fromstring(svg)
    return [e for e in root.iter(NS + tag) if cls is None or e.get("class") == cls]


@pytest.fixture(scope="module")
def run2():
    p = mdscore.normalize(datasets.simplex(4))
    return p, run_trajectory(p, LambdaSchedule.parse("lin:0:1:101"), p=2)


@pytest.fixture(scope="module")
def run1():
    rng = np.random.default_rng(3)
    a = rng.uniform(0.5, 1.5, size=(5, 5))
    p = mdscore.normalize(datasets.MdsProblem(np.triu(a, 1) + np.triu(a, 1).T))
    return p, run_trajectory(p, LambdaSchedule.parse("lin:0:5:51"), p=1)


def test_2d_structure(run2):
    problem, rec = run2
    svg = plot_2d(rec, problem.labels)
    m, n = len(rec.results), problem.n
    assert len(elements(svg, "polyline", "track")) == n
    assert len(elements(svg, "circle", "point")) == (m - 1) * n
    finals = elements(svg, "circle", "final")
    assert len(finals) == n and {e.get("data-step") for e in finals} == {str(m - 1)}
    assert [e.text for e in elements(svg, "text", "label")] == list(problem.labels)


def test_2d_inside_canvas(run2):
    problem, rec = run2
    for c in elements(plot_2d(rec, problem.labels), "circle"):
        assert 0 <= float(c.get("cx")) <= 600 and 0 <= float(c.get("cy")) <= 600


def test_2d_preserves_final_geometry(run2):
    # the final markers form the same shape as the stored final configuration, up to scale
    problem, rec = run2
    finals = elements(plot_2d(rec, problem.labels), "circle", "final")
    pts = np.array([[float(e.get("cx")), -float(e.get("cy"))] for e in finals])
    d_plot = mdscore.distances(pts)
    d_true = mdscore.distances(rec.final.x)
    off = ~np.eye(problem.n, dtype=bool)
    ratio = d_plot[off] / d_true[off]
    assert np.ptp(ratio) <= 1e-2 * ratio.mean()


def test_1d_structure(run1):
    problem, rec = run1
    svg = plot_1d(rec, problem.labels)
    assert len(elements(svg, "line", "hline")) == problem.n
    assert len(elements(svg, "polyline", "track")) == problem.n
    ys = sorted(float(e.get("y1")) for e in elements(svg, "line", "hline"))
    assert len(set(ys)) == problem.n


def test_dims_checked(run1, run2):
    with pytest.raises(ValidationError):
        plot_2d(run2[1], run2[0].labels, (0, 2))
    with pytest.raises(ValidationError):
        plot_1d(run1[1], run1[0].labels, dim=1)


def test_deterministic(run2):
    problem, rec = run2
    assert plot_2d(rec, problem.labels) == plot_2d(rec, problem.labels)


def test_labels_escaped(run2):
    problem, rec = run2
    svg = plot_2d(rec, ("<a>", "b&c", "d", "e"))
    assert [e.text for e in elements(svg, "text", "label")] == ["<a>", "b&c", "d", "e"]
