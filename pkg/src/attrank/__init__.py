"""attrank: visual-attractiveness scoring and search re-ranking.

The pipeline classifies product images into three display types (person,
mannequin, flat), estimates per-type user preference odds from click
sessions with a biased-urn choice model, and re-ranks search results by
attractiveness, evaluated with nDCG against rankSVM and random baselines.
"""

__version__ = "0.1.0"

from .choicemodel import (
    Observation,
    UrnConfig,
    WeightVector,
    enumerate_domain,
    estimate_weights,
    mean,
    pmf,
    pmf_table,
    sample,
)
from .classifier import (
    ClassScores,
    LinearModel,
    TrainConfig,
    evaluate_accuracy,
    predict,
    score,
    train_ova,
)
from .core import (
    Dataset,
    DisplayType,
    ItemRecord,
    SellerClass,
    SessionRecord,
    ValidationReport,
    validate,
)
from .evaluation import (
    MetricReport,
    dcg_at_k,
    ndcg_at_k,
    overlap_score,
    random_baseline,
)
from .features import (
    BowHistogram,
    DescriptorSet,
    GrayImage,
    Vocabulary,
    build_vocabulary,
    dense_descriptors,
    quantize,
)
from .kernel import KernelMapConfig, approx_map, chi2_kernel, map_error_report
from .rerank import (
    PreferencePairs,
    RankModel,
    RankedList,
    RerankConfig,
    RerankMethod,
    SigmoidMode,
    attractiveness_score,
    make_preference_pairs,
    ranksvm_features,
    ranksvm_rerank,
    ranksvm_train,
    rerank,
)
from .sim import FixedClicks, SimConfig, TruncatedPoissonClicks, simulate_features, simulate_sessions

__all__ = [name for name in dir() if not name.startswith("_")]
