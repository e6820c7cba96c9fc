"""Decision trees and random forests under label noise.

Split criteria (gini, entropy, misclassification, twoing), symmetric /
class-conditional / non-uniform label-noise injection, closed-form noisy
criterion values, sample-size bounds with Monte Carlo validators, and a
reproducible benchmark harness.
"""

from .bench import (
    ExperimentConfig,
    ResultTable,
    build_learner,
    emit_runs,
    emit_table,
    run_leaf_size_sweep,
    run_noise_sweep,
    run_training_size_sweep,
)
from .bounds import (
    BoundQuery,
    entropy_counterexample,
    leaf_sample_bound,
    split_sample_bound,
    validate_leaf_bound,
    validate_split_bound,
)
from .criteria import (
    SplitStats,
    criterion_value,
    gain,
    impurity,
    noisy_gain_closed_form,
    noisy_split_stats,
    twoing,
)
from .datasets import (
    Dataset,
    SplitSpec,
    generate_checkerboard,
    generate_imbalanced_linear,
    load_table,
    save_dataset,
    split_dataset,
)
from .forest import ForestClassifier, forest_from_text, forest_predict, forest_to_text
from .noise import (
    AffineFeatureNoise,
    ClassConditionalNoise,
    NoisyDataset,
    SymmetricNoise,
    expected_noisy_fraction,
    inject_noise,
    parse_noise_model,
)
from .tree import (
    TreeClassifier,
    best_split,
    candidate_thresholds,
    grow_tree,
    tree_from_text,
    tree_predict,
    tree_to_text,
    trees_equal,
)

__version__ = "0.1.0"

__all__ = [
    "AffineFeatureNoise",
    "BoundQuery",
    "ClassConditionalNoise",
    "Dataset",
    "ExperimentConfig",
    "ForestClassifier",
    "NoisyDataset",
    "ResultTable",
    "SplitSpec",
    "SplitStats",
    "SymmetricNoise",
    "TreeClassifier",
    "best_split",
    "build_learner",
    "candidate_thresholds",
    "criterion_value",
    "emit_runs",
    "emit_table",
    "entropy_counterexample",
    "expected_noisy_fraction",
    "forest_from_text",
    "forest_predict",
    "forest_to_text",
    "gain",
    "generate_checkerboard",
    "generate_imbalanced_linear",
    "grow_tree",
    "impurity",
    "inject_noise",
    "leaf_sample_bound",
    "load_table",
    "noisy_gain_closed_form",
    "noisy_split_stats",
    "parse_noise_model",
    "run_leaf_size_sweep",
    "run_noise_sweep",
    "run_training_size_sweep",
    "save_dataset",
    "split_dataset",
    "split_sample_bound",
    "tree_from_text",
    "tree_predict",
    "tree_to_text",
    "trees_equal",
    "twoing",
    "validate_leaf_bound",
    "validate_split_bound",
]
