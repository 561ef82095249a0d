"""
Theory files and auxiliary inputs shipped with the package.
"""
from importlib import resources
from pathlib import Path

from jetbrane.exceptions import ConfigurationError

SUFFIXES = (".thy", ".sym", ".param", ".cur")


def bundled() -> list[str]:
    """Names of the bundled files, suffix included."""
    return sorted(
        entry.name
        for entry in resources.files(__name__).iterdir()
        if entry.name.endswith(SUFFIXES)
    )


def read_text(name: str) -> str:
    """
    Contents of ``name``, a filesystem path or the name of a bundled
    file. A bundled theory may be named without its ``.thy`` suffix.

    Example:
        >>> read_text("mechanics").splitlines()[1]
        'space dim=1 coords=t'
    """
    path = Path(name)
    if path.is_file():
        return path.read_text(encoding="utf-8")
    candidates = [name] if name.endswith(SUFFIXES) else [f"{name}.thy"]
    for candidate in candidates:
        entry = resources.files(__name__).joinpath(candidate)
        if entry.is_file():
            return entry.read_text(encoding="utf-8")
    raise ConfigurationError(f"no such theory file: `{name}`")


def theory_name(name: str) -> str:
    """``em2d`` for ``em2d``, ``em2d.thy`` and ``path/to/em2d.thy``."""
    stem = Path(name).name
    for suffix in SUFFIXES:
        if stem.endswith(suffix):
            return stem[: -len(suffix)]
    return stem
