from conftest import QUARTER

from ads_earthquake.circlemap import PiecewiseMobiusCircleMap, finite_earthquake_boundary
from ads_earthquake.earthquake import simple_earthquake
from ads_earthquake.mobius import IDENTITY, INFINITY, RP1Point
from ads_earthquake.models import EarthquakeMap, Lamination, Stratum
from ads_earthquake.render import DiscCanvas, render_circle_map, render_earthquake, save_svg


class TestDiscCanvas:
    def test_boundary_positions(self):
        canvas = DiscCanvas(size=100, margin=10)
        x, y = canvas.point(INFINITY)
        assert (x, y) == (90.0, 50.0)
        x, y = canvas.point(RP1Point.from_real(-1.0))
        assert abs(x - 50.0) < 1e-9 and abs(y - 10.0) < 1e-9


class TestRender:
    def test_earthquake_svg(self, nested_spec, tmp_path):
        _, E = finite_earthquake_boundary(nested_spec)
        path = save_svg(render_earthquake(E, overlay=True), tmp_path / "E.svg")
        text = path.read_text()
        assert text.startswith("<?xml") or text.startswith("<svg")
        assert "stroke-dasharray" in text
        assert text.count("<path") >= len(E.strata) + len(E.lamination)

    def test_output_is_deterministic(self):
        E = simple_earthquake(IDENTITY, QUARTER)
        assert render_earthquake(E, seed=3).as_svg() == render_earthquake(E, seed=3).as_svg()

    def test_whole_plane_stratum(self):
        E = EarthquakeMap(simple_earthquake(IDENTITY, QUARTER).side, Lamination(), (Stratum((), (), IDENTITY),))
        assert "<circle" in render_earthquake(E).as_svg()

    def test_circle_map_svg(self, simple_map, tmp_path):
        path = save_svg(render_circle_map(simple_map, samples=400), tmp_path / "f.svg")
        text = path.read_text()
        # one dot per breakpoint
        assert text.count('fill="#c0392b"') == len(simple_map.breakpoints)
        assert "<polyline" in text or "<path" in text

    def test_global_map_has_no_breakpoint_dots(self):
        d = render_circle_map(PiecewiseMobiusCircleMap.global_map(IDENTITY), size=200, samples=50)
        assert 'fill="#c0392b"' not in d.as_svg()
