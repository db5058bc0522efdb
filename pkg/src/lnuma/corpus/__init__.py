"""Sample `.nm` programs shipped with the package."""
from importlib import resources


def names() -> list:
    return sorted(p.name[:-3] for p in resources.files(__name__).iterdir()
                  if p.name.endswith(".nm"))


def source(name: str) -> str:
    return resources.files(__name__).joinpath(f"{name}.nm").read_text(encoding="utf-8")


def path(name: str):
    """A context manager yielding a real filesystem path to the program."""
    return resources.as_file(resources.files(__name__).joinpath(f"{name}.nm"))
