"""
The command-line pipeline
=========================

Every stage is also available as ``magic-cd <command>``; this script drives
them in-process and prints what each one reports.
"""

import tempfile
from pathlib import Path

from magic_cd.cli import run_command

work = Path(tempfile.mkdtemp(prefix="magic-cd-demo-"))
nodes, edges, truth = work / "nodes.tsv", work / "edges.tsv", work / "truth.tsv"


def step(*argv):
    print("$ magic-cd", " ".join(str(a) for a in argv))
    code = run_command([str(a) for a in argv])
    print(f"(exit {code})\n")


# %%
# A planted network with a private vocabulary per block, written as TSV files.
step("sample", "--planted", "240,3", "--vocab-size", 20, "--seed", 4, "--out-dir", work)
print(nodes.read_text().splitlines()[0], "\n")

step("validate", "--nodes", nodes, "--edges", edges)

# %%
# Fit, threshold and score.  Options can also come from a key=value file;
# flags on the command line win.
(work / "run.cfg").write_text(f"nodes = {nodes}\nedges = {edges}\nk = 3\n")
step("--config", work / "run.cfg", "fit", "--out-dir", work / "fit")
step("communities", "--model", work / "fit" / "model.txt", "--out-dir", work / "fit")
step("eval", "--nodes", nodes, "--edges", edges, "--truth", truth,
     "--communities", work / "fit" / "communities.tsv")
step("analyze", "--nodes", nodes, "--edges", edges, "--truth", truth)
step("choose-k", "--nodes", nodes, "--edges", edges, "--candidates", "2,3,5")
print("outputs in", work)
