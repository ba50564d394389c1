"""Write the CSV tables behind the optimal-ratio and (T_L, T_R) map figures.

Usage: python3 demos/05_figure_data.py [output-directory]
"""

import pathlib
import sys

from cdsense import cli

out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "figure-data")
out.mkdir(parents=True, exist_ok=True)

runs = {
    "ratio_classical.csv": ["ratio", "--mode", "classical", "--x-min", "-4", "--x-max", "4", "--points", "161"],
    "ratio_uql.csv": ["ratio", "--mode", "uql", "--x-min", "-4", "--x-max", "4", "--points", "161"],
    "sweep_eta08.csv": ["sweep", "--grid", "51", "--workers", "4"],
    "sweep_eta05.csv": ["sweep", "--grid", "51", "--eta-l", "0.5", "--eta-r", "0.5", "--workers", "4"],
}
for name, argv in runs.items():
    code = cli.main(argv + ["--out", str(out / name)])
    print(f"{name}: exit {code}")
