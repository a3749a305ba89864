"""errlens: error analysis for text classifiers.

Ingests documents with labels, predictions, per-token attribution scores and
embeddings; discovers statistically significant error-prone subpopulations
described by interpretable rules; and serves subpopulation statistics,
aggregated attributions and 2D projections over an HTTP API.
"""

from errlens.ingest import DatasetStore, DocumentRecord, load_dataset
from errlens.features import CorpusFeatures, build_features
from errlens.rules import Condition, DiscoveryConfig, Rule, RuleSet, discover

__version__ = "0.1.0"

__all__ = [
    "DatasetStore",
    "DocumentRecord",
    "load_dataset",
    "CorpusFeatures",
    "build_features",
    "Condition",
    "DiscoveryConfig",
    "Rule",
    "RuleSet",
    "discover",
    "__version__",
]
