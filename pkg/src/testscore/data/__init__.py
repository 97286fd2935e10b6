"""Bundled data files."""

from importlib.resources import files


def sample_ratings_path() -> str:
    """Filesystem path of the bundled synthetic ratings CSV."""
    return str(files("testscore.data") / "sample_ratings.csv")
