"""Plain-text channel matrices and flat JSON run configurations."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .channels import STOCHASTIC_TOL, ChannelError, channel_matrix


class ChannelFileError(ChannelError):
    def __init__(self, path, line: int | None, message: str):
        self.path, self.line = str(path), line
        where = f"{path}:{line}" if line is not None else str(path)
        super().__init__(f"{where}: {message}")


def parse_matrix(text: str, source: str = "<matrix>") -> np.ndarray:
    """Parse ``in out`` followed by ``in`` rows of ``out`` reals; ``#`` starts a comment."""
    rows: list[tuple[int, list[float]]] = []
    shape = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if shape is None:
            if len(fields) != 2:
                raise ChannelFileError(source, lineno, "header must be two integers: 'in out'")
            try:
                shape = (int(fields[0]), int(fields[1]))
            except ValueError:
                raise ChannelFileError(source, lineno, f"header is not two integers: {line!r}") from None
            if min(shape) < 1:
                raise ChannelFileError(source, lineno, "alphabet sizes must be positive")
            continue
        if len(rows) == shape[0]:
            raise ChannelFileError(source, lineno, f"more than the declared {shape[0]} rows")
        if len(fields) != shape[1]:
            raise ChannelFileError(source, lineno, f"expected {shape[1]} entries, found {len(fields)}")
        try:
            values = [float(f) for f in fields]
        except ValueError as exc:
            raise ChannelFileError(source, lineno, f"not a number ({exc})") from None
        if any(not np.isfinite(v) or v < -STOCHASTIC_TOL for v in values):
            raise ChannelFileError(source, lineno, "entries must be finite and nonnegative")
        if abs(sum(values) - 1.0) > STOCHASTIC_TOL:
            raise ChannelFileError(source, lineno, f"row sums to {sum(values)!r}, not 1")
        rows.append((lineno, values))
    if shape is None:
        raise ChannelFileError(source, None, "empty matrix file")
    if len(rows) != shape[0]:
        raise ChannelFileError(source, None, f"declared {shape[0]} rows, found {len(rows)}")
    return channel_matrix([values for _, values in rows])


def read_matrix(path) -> np.ndarray:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ChannelFileError(path, None, exc.strerror or str(exc)) from None
    return parse_matrix(text, str(path))


def format_matrix(w: np.ndarray, comment: str | None = None) -> str:
    w = np.asarray(w, dtype=float)
    lines = [f"# {comment}"] if comment else []
    lines.append(f"{w.shape[0]} {w.shape[1]}")
    lines.extend(" ".join(format(v, ".17g") for v in row) for row in w)
    return "\n".join(lines) + "\n"


def write_matrix(path, w: np.ndarray, comment: str | None = None) -> None:
    Path(path).write_text(format_matrix(w, comment))


def load_config(path) -> dict:
    """Read a flat JSON object of flag values.

    A document with a top-level ``"config"`` object (as written by the command line
    tool next to its results) is unwrapped, so result files can be fed back in.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise ValueError(f"{path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from None
    if isinstance(doc, dict) and isinstance(doc.get("config"), dict):
        doc = doc["config"]
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: configuration must be a JSON object")
    for key, value in doc.items():
        if isinstance(value, (dict, list)) and key != "r0_grid":
            raise ValueError(f"{path}: key {key!r} must hold a scalar value")
    return {key.replace("-", "_"): value for key, value in doc.items()}
