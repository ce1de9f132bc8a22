"""Finite boundary samples as exact metric spaces, and group elements as point maps.

A nontrivial element of a free group has exactly two fixed points on the
boundary and every other orbit is infinite, so no finite sample with more
than two points is invariant under it. Samples are therefore built as a
base set together with its images (``closure_depth`` rounds), and each
element becomes a partial map defined wherever its image stays inside the
sample.
"""
from __future__ import annotations

import json
import random
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .mobius import FiniteMetricSpace, PointMap
from .scalar import INF, format_scalar
from .words import BoundaryPoint, FreeGroup, Word, act, gromov_product

DEFAULT_CAP = 10_000


class SampleError(ValueError):
    pass


def random_points(group: FreeGroup, count: int, rng: random.Random, max_preperiod: int = 6, max_period: int = 3) -> list[BoundaryPoint]:
    """``count`` distinct random eventually periodic points, in draw order."""
    seen: dict[BoundaryPoint, None] = {}
    tries = 0
    while len(seen) < count:
        seen.setdefault(group.random_point(rng, max_preperiod, max_period))
        tries += 1
        if tries > 100 * count + 1000:
            raise SampleError("could not draw enough distinct points; raise the preperiod length")
    return list(seen)


def close_sample(
    points: Sequence[BoundaryPoint],
    elements: Sequence[Word],
    depth: int = 1,
    *,
    strict: bool = False,
    cap: int = DEFAULT_CAP,
) -> list[BoundaryPoint]:
    """Add images of the sample under ``elements`` for ``depth`` rounds.

    With ``strict`` nothing is added; a point whose image leaves the sample
    raises :class:`SampleError` naming it. Growth beyond ``cap`` points is
    an error as well.
    """
    out = list(dict.fromkeys(points))
    have = set(out)
    if strict:
        for g in elements:
            for xi in out:
                y = act(g, xi)
                if y not in have:
                    raise SampleError(f"sample not closed: {g} sends {xi} to {y}, which is outside it")
        return out
    frontier = list(out)
    for _ in range(depth):
        new = []
        for xi in frontier:
            for g in elements:
                y = act(g, xi)
                if y not in have:
                    have.add(y)
                    new.append(y)
                    if len(have) > cap:
                        raise SampleError(f"sample exceeds {cap} points (escaping point {y})")
        out.extend(new)
        frontier = new
    return out


def visual_distance(q: int, xi: BoundaryPoint, omega: BoundaryPoint) -> Fraction:
    k = gromov_product(xi, omega)
    return Fraction(0) if k is INF else Fraction(1, q**k)


def sample_space(group: FreeGroup, points: Sequence[BoundaryPoint]) -> FiniteMetricSpace:
    """The exact space ``(points, q^-(xi, omega))``."""
    n = len(points)
    zero = Fraction(0)
    dist = [[zero] * n for _ in range(n)]
    powers: dict = {}
    for i in range(n):
        for j in range(i + 1, n):
            k = gromov_product(points[i], points[j])
            d = zero if k is INF else powers.get(k)
            if d is None:
                d = powers[k] = Fraction(1, group.q**k)
            dist[i][j] = dist[j][i] = d
    return FiniteMetricSpace([str(p) for p in points], dist, exact=True)


def element_map(points: Sequence[BoundaryPoint], g: Word) -> PointMap:
    index = {p: i for i, p in enumerate(points)}
    return PointMap(tuple(index.get(act(g, p)) for p in points))


def build_sample(
    group: FreeGroup,
    count: int,
    elements: Sequence[Word],
    rng: random.Random,
    depth: int = 1,
    **kwargs,
) -> tuple[list[BoundaryPoint], FiniteMetricSpace, list[PointMap]]:
    base = random_points(group, count, rng)
    pts = close_sample(base, elements, depth, cap=kwargs.pop("cap", DEFAULT_CAP), strict=kwargs.pop("strict", False))
    return pts, sample_space(group, pts), [element_map(pts, g) for g in elements]


# -- file formats -------------------------------------------------------------


def space_to_json(space: FiniteMetricSpace) -> str:
    if space.exact:
        rows = [[format_scalar(x) for x in row] for row in space.dist]
    else:
        rows = [[float(x) for x in row] for row in space.dist]
    return json.dumps({"points": space.points, "dist": rows}, indent=1)


def map_to_json(m: PointMap, element: str | None = None) -> str:
    body: dict = {"map": list(m.images)}
    if element is not None:
        body["element"] = element
    return json.dumps(body)


def _entry(x):
    if isinstance(x, str):
        if "/" in x:
            return Fraction(x)
        raise SampleError(f"exact entries must be written as 'a/b', got {x!r}")
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise SampleError(f"bad distance entry {x!r}")
    return x


def load_space(path: str | Path) -> FiniteMetricSpace:
    """Read a JSON ``{"points", "dist"}`` file or a CSV distance matrix, then validate it.

    JSON entries given as ``"a/b"`` strings make an exact space, numbers an
    approximate one. A CSV file has a header row of point names and one
    numeric row per point.
    """
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".csv":
        import csv

        rows = list(csv.reader(text.splitlines()))
        if not rows:
            raise SampleError("empty CSV distance matrix")
        points, body = rows[0], rows[1:]
        try:
            dist = [[float(x) for x in row] for row in body]
        except ValueError as exc:
            raise SampleError(f"bad CSV entry: {exc}") from None
        return FiniteMetricSpace(points, dist, exact=False).validate()
    try:
        data = json.loads(text)
        points, raw = data["points"], data["dist"]
    except (ValueError, KeyError, TypeError) as exc:
        raise SampleError(f"malformed space file: {exc}") from None
    if not isinstance(raw, list) or not all(isinstance(row, list) for row in raw):
        raise SampleError("dist must be a list of rows")
    entries = [[_entry(x) for x in row] for row in raw]
    flat = [x for row in entries for x in row]
    exact = all(isinstance(x, (Fraction, int)) for x in flat)
    if not exact and any(isinstance(x, Fraction) for x in flat):
        raise SampleError("mixed exact and floating entries")
    try:
        space = FiniteMetricSpace([str(p) for p in points], entries, exact=exact)
    except (ValueError, TypeError) as exc:
        raise SampleError(str(exc)) from None
    return space.validate()


def load_map(path: str | Path, size: int) -> PointMap:
    """Read ``{"map": [...]}`` or a bare JSON list; ``null`` marks points outside the domain."""
    try:
        data = json.loads(Path(path).read_text())
    except ValueError as exc:
        raise SampleError(f"malformed map file: {exc}") from None
    images = data.get("map") if isinstance(data, dict) else data
    if not isinstance(images, list) or len(images) != size:
        raise SampleError(f"map must list {size} images")
    if any(x is not None and (isinstance(x, bool) or not isinstance(x, int)) for x in images):
        raise SampleError("map entries must be integers or null")
    return PointMap(tuple(images))


def write_sample(outdir: str | Path, space: FiniteMetricSpace, maps: Iterable[tuple[str, PointMap]]) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = [outdir / "space.json"]
    written[0].write_text(space_to_json(space) + "\n")
    for k, (name, m) in enumerate(maps):
        p = outdir / f"map_{k}.json"
        p.write_text(map_to_json(m, name) + "\n")
        written.append(p)
    return written
