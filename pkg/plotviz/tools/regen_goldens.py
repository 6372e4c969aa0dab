"""Regenerate the pinned reference-image hashes from the golden CSVs.

Run from the plotviz directory after an intentional rendering change:

    python tools/regen_goldens.py

The hashes are environment-specific (they pin the rendering stack as well
as the code); regenerate them when matplotlib is upgraded.
"""

import hashlib
import json
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from plotviz import PlotSpec, render_cdf, render_surface  # noqa: E402

DATA = Path(__file__).resolve().parents[1] / "tests" / "data"


def file_hash(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def main():
    hashes = {}
    with tempfile.TemporaryDirectory() as tmp:
        out = Path(tmp) / "img.png"
        render_cdf(PlotSpec((str(DATA / "cdf_two_runs.csv"),), "cdf_overlay",
                            str(out)))
        hashes["cdf_overlay.png"] = file_hash(out)
        render_surface(PlotSpec((str(DATA / "surface_grid.csv"),),
                                "gain_surface", str(out)))
        hashes["gain_surface.png"] = file_hash(out)
        render_surface(PlotSpec((str(DATA / "surface_grid.csv"),),
                                "gain_vs_bias", str(out)))
        hashes["gain_vs_bias.png"] = file_hash(out)
    target = DATA / "golden_hashes.json"
    target.write_text(json.dumps(hashes, indent=2, sort_keys=True) + "\n")
    print(f"wrote {target}")
    for name, h in hashes.items():
        print(f"  {name}: {h[:16]}...")


if __name__ == "__main__":
    main()
