# %% [markdown]
# # Reproducing figure data from the command line
#
# Each preset writes CSV files plus a manifest.  The same seed gives the same
# bytes whatever the number of workers.

# %%
import tempfile
from pathlib import Path

from specialstate import cli

out = Path(tempfile.mkdtemp())
for args in (["decay", "--preset", "fig1"], ["kicks", "optimize", "--mode", "sorted"]):
    cli.main([*args, "--out", str(out / args[0])])

print((out / "kicks" / "optimize.txt").read_text())
print((out / "decay" / "manifest.json").read_text())
