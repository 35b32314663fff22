"""
Point-set file formats.

Text: first non-comment line "q d", then one point per line as d integers.
'#' starts a comment, blank lines are ignored.
JSON: {"q": q, "d": d, "points": [[...], ...]}.
"""
import json
import logging
from pathlib import Path
from typing import List, Tuple, Union

from errors import ParseError
from geometry import PointSet
from gf import make_field

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _parse_ints(text: str, line_no: int) -> List[int]:
    try:
        return [int(tok) for tok in text.split()]
    except ValueError:
        raise ParseError(f"expected integers, got {text!r}", line_no)


def parse_pointset_text(text: str) -> PointSet:
    header = None
    points: List[Tuple[int, ...]] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        values = _parse_ints(line, line_no)
        if header is None:
            if len(values) != 2:
                raise ParseError(f"header must be 'q d', got {line!r}", line_no)
            header = (values[0], values[1])
            make_field(header[0])
            if header[1] < 1:
                raise ParseError(f"dimension must be positive, got {header[1]}", line_no)
            continue
        q, d = header
        if len(values) != d:
            raise ParseError(f"expected {d} coordinates, got {len(values)}", line_no)
        if any(v < 0 or v >= q for v in values):
            raise ParseError(f"coordinates must lie in [0, {q})", line_no)
        points.append(tuple(values))
    if header is None:
        raise ParseError("missing 'q d' header")
    return PointSet.from_points(header[0], header[1], points)


def parse_pointset_json(text: str) -> PointSet:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", e.lineno)
    if not isinstance(payload, dict) or not {"q", "d", "points"} <= payload.keys():
        raise ParseError("JSON point set needs keys q, d, points")
    q, d = payload["q"], payload["d"]
    if not isinstance(q, int) or not isinstance(d, int) or d < 1:
        raise ParseError("q and d must be integers with d >= 1")
    make_field(q)
    points = []
    for pos, p in enumerate(payload["points"], start=1):
        if not isinstance(p, list) or len(p) != d or not all(isinstance(v, int) and 0 <= v < q for v in p):
            raise ParseError(f"point #{pos} must be {d} integers in [0, {q})")
        points.append(tuple(p))
    return PointSet.from_points(q, d, points)


def read_pointset(path: PathLike) -> PointSet:
    """Format is picked by extension: .json, anything else is text"""
    path = Path(path)
    text = path.read_text(encoding='utf-8')
    E = parse_pointset_json(text) if path.suffix.lower() == '.json' else parse_pointset_text(text)
    logger.info(f"Loaded {E!r} from {path}")
    return E


def format_pointset_text(E: PointSet) -> str:
    lines = [f"{E.q} {E.dim}"]
    lines.extend(" ".join(str(v) for v in p) for p in E.points())
    return "\n".join(lines) + "\n"


def format_pointset_json(E: PointSet) -> str:
    return json.dumps({"q": E.q, "d": E.dim, "points": [list(p) for p in E.points()]})


def write_pointset(E: PointSet, path: PathLike):
    path = Path(path)
    text = format_pointset_json(E) if path.suffix.lower() == '.json' else format_pointset_text(E)
    path.write_text(text, encoding='utf-8')
    logger.debug(f"Wrote {E!r} to {path}")
