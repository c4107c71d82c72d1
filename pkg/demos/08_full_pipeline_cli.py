"""End-to-end run through the command-line interface.

Drives the installed CLI as a subprocess: generate synthetic data,
run the louvain-mode pipeline, then repeat the kmeans branch via a JSON
config file with a flag override. Every artifact lands in a temp
directory whose manifest ties the outputs together.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

workdir = Path(tempfile.mkdtemp(prefix="embedcluster_cli_"))
print(f"working in {workdir}\n")


def run(*args):
    cmd = [sys.executable, "-m", "embedcluster", *args]
    print("$", " ".join(str(a) for a in args))
    proc = subprocess.run(cmd, capture_output=True, text=True, check=True)
    print(proc.stdout)
    return proc.stdout


emb = workdir / "emb.bin"
corpus = workdir / "corpus.jsonl"
run(
    "synth", "--clusters", "5", "--items", "3000", "--dim", "48",
    "--separation", "9", "--seed", "11",
    "--out-embeddings", str(emb), "--out-corpus", str(corpus),
)

# unknown cluster count: louvain branch (builds the k-NN graph first)
out = run(
    "pipeline", "--embeddings", str(emb), "--corpus", str(corpus),
    "--mode", "louvain", "--knn-k", "12", "--seed", "1",
    "--outdir", str(workdir / "louvain_run"),
)
manifest = json.loads(out)
print(f"louvain found {manifest['n_clusters']} clusters; "
      f"stage seconds: { {k: round(v, 2) for k, v in manifest['timings'].items()} }\n")

# known cluster count via config file; the flag overrides the file's seed
config = {
    "embeddings": str(emb),
    "corpus": str(corpus),
    "mode": "kmeans",
    "kmeans_k": 5,
    "seed": 0,
    "outdir": str(workdir / "kmeans_run"),
}
cfg_path = workdir / "pipeline.json"
cfg_path.write_text(json.dumps(config, indent=2))
out = run("pipeline", "--config", str(cfg_path), "--seed", "99")
manifest = json.loads(out)
print(f"kmeans run used seed {manifest['seed']} (flag beat the config file)")

quality = json.loads(Path(manifest["quality_report_path"]).read_text())
print(f"purity {quality['purity']:.3f}, nmi {quality['nmi']:.3f}")

run("eval", "--partition", manifest["partition_path"], "--labels", str(corpus))
