"""The figure package must stay a pure consumer of CSV files.

It never imports the simulation package and never pulls in numerical
libraries beyond numpy for array plumbing, so every plotted value has to
originate in an input file.
"""

from pathlib import Path

SRC = Path(__file__).resolve().parent.parent / "src" / "vzbwfig"


def test_source_never_imports_the_simulator():
    sources = list(SRC.rglob("*.py"))
    assert sources, f"no sources found under {SRC}"
    for path in sources:
        text = path.read_text()
        assert "vortexzbw" not in text, f"{path} references the simulator"
        assert "scipy" not in text, f"{path} imports numerical routines"
