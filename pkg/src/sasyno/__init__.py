"""Self-adaptive synthetic over-sampling (SASYNO), baseline resamplers and an
imbalanced-classification evaluation harness."""

from .classifiers import KNNClassifier, knn_fit, knn_predict
from .core import (SASYNO, DisturbanceProfile, PairSet, SyntheticBatch, balance,
                   disturbance_profile, gamma_quantifier, gaussian_disturb, interpolate,
                   mean_pairwise_distance, neighbor_pairs, per_attribute_sigma,
                   sasyno_oversample)
from .dataset import (ClassPartition, Dataset, NormParams, generate_gaussian_imbalanced,
                      load_csv, minmax_normalize, partition_by_class, train_test_split,
                      write_csv)
from .harness import (DisturbanceCoverage, ExperimentConfig, ExperimentReport, load_config,
                      parse_config, run_experiment, validate_disturbance)
from .metrics import (ConfusionMatrix, MetricSet, RankTable, confusion_matrix, metrics,
                      rank_table)
from .samplers import (ADASYN, SMOTE, BorderlineSMOTE, NoResampling, RandomDownSampler,
                       SafeLevelSMOTE, SamplerConfig, adasyn, apply_sampler, blsmote,
                       random_downsample, slsmote, smote)

__version__ = "0.1.0"
