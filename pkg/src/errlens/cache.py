"""On-disk workspace for preprocessed corpus artifacts.

`ingest` writes the store, features and projection once; `discover` adds the
rule report; `serve` and `report` read everything back. All artifacts are
keyed by the corpus content hash recorded in the manifest, so a changed
input file invalidates the whole directory.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import pickle
from datetime import datetime, timezone
from pathlib import Path

from errlens.features import CorpusFeatures, build_features
from errlens.ingest import DatasetStore, load_dataset
from errlens.projection import Projection2D, project_store
from errlens.rules import DiscoveryConfig, RuleSet

MANIFEST = "manifest.json"
STORE_PKL = "store.pkl"
FEATURES_PKL = "features.pkl"
PROJECTION_PKL = "projection.pkl"
RULES_TSV = "rules.tsv"


def corpus_sha256(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class Workspace:
    def __init__(self, root: str | Path):
        self.root = Path(root)

    def _path(self, name: str) -> Path:
        return self.root / name

    def read_manifest(self) -> dict:
        path = self._path(MANIFEST)
        if not path.exists():
            raise FileNotFoundError(f"{path} not found; run ingest first")
        return json.loads(path.read_text(encoding="utf-8"))

    def write_manifest(self, manifest: dict) -> None:
        self._path(MANIFEST).write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )

    # build

    def ingest(
        self,
        input_path: str | Path,
        min_df: int | None = None,
        projection_method: str = "auto",
        seed: int = 0,
        tsne_iters: int = 1000,
        perplexity: float = 30.0,
    ) -> tuple[DatasetStore, CorpusFeatures, Projection2D | None]:
        store = load_dataset(str(input_path))
        features = build_features(store, min_df=min_df)
        projection = None
        if projection_method != "skip":
            projection = project_store(
                store, method=projection_method, perplexity=perplexity, iters=tsne_iters, seed=seed
            )

        self.root.mkdir(parents=True, exist_ok=True)
        with open(self._path(STORE_PKL), "wb") as fh:
            pickle.dump(store, fh)
        with open(self._path(FEATURES_PKL), "wb") as fh:
            pickle.dump(features, fh)
        if projection is not None:
            with open(self._path(PROJECTION_PKL), "wb") as fh:
                pickle.dump(projection, fh)

        manifest = {
            "corpus_sha256": corpus_sha256(input_path),
            "corpus_path": str(Path(input_path).resolve()),
            "created_utc": datetime.now(timezone.utc).isoformat(),
            "n_test": store.n_test,
            "n_train": store.n_train,
            "classes": list(store.classes),
            "min_df": features.min_df,
            "projection_method": projection.method if projection is not None else None,
        }
        self.write_manifest(manifest)
        return store, features, projection

    # load

    def load_store(self) -> DatasetStore:
        with open(self._path(STORE_PKL), "rb") as fh:
            return pickle.load(fh)

    def load_features(self) -> CorpusFeatures:
        with open(self._path(FEATURES_PKL), "rb") as fh:
            return pickle.load(fh)

    def load_projection(self) -> Projection2D | None:
        path = self._path(PROJECTION_PKL)
        if not path.exists():
            return None
        with open(path, "rb") as fh:
            return pickle.load(fh)

    def has_ruleset(self) -> bool:
        return self._path(RULES_TSV).exists()

    def save_ruleset(self, ruleset: RuleSet) -> None:
        self._path(RULES_TSV).write_text(ruleset.to_lines(), encoding="utf-8")
        manifest = self.read_manifest()
        manifest["discovery"] = {
            "config": dataclasses.asdict(ruleset.config),
            "baseline_error_rate": ruleset.baseline_error_rate,
            "n_test": ruleset.n_test,
            "n_rules": len(ruleset.rules),
        }
        self.write_manifest(manifest)

    def load_ruleset(self) -> RuleSet | None:
        if not self.has_ruleset():
            return None
        manifest = self.read_manifest()
        meta = manifest.get("discovery")
        if meta is None:
            return None
        rules = RuleSet.rules_from_lines(self._path(RULES_TSV).read_text(encoding="utf-8"))
        return RuleSet(
            rules=rules,
            baseline_error_rate=meta["baseline_error_rate"],
            n_test=meta["n_test"],
            config=DiscoveryConfig(**meta["config"]),
        )
