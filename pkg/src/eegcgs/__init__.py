"""Self-supervised seizure channel detection on EEG graphs.

Contrastive and generative subgraph learning with a one-layer GCN
autoencoder trained on normal clips only, plus the synthetic
anomalous-channel benchmark.
"""

from .benchmark import (BenchConfig, average_clips, inject_anomaly, run_synthetic_eval,
                        synth_generate)
from .features import fft_features
from .graphs import (KINDS, EegGraph, build_corr_graph, build_dist_graph, build_dtf_graph,
                     build_graph, build_rand_graph, node_strength, normalize_adjacency)
from .metrics import MetricSet, classification_metrics, roc_auc
from .model import (ModelParams, decode_subgraph, encode_node, encode_subgraph, init_params,
                    load_checkpoint, readout, save_checkpoint, similarity)
from .montage import EegClip, ElectrodeMontage, load_clips, load_montage, ten_twenty
from .sampling import make_triplet, rwr_sample
from .scoring import AnomalyReport, detect, ensemble_score, minmax_scale, score_nodes
from .training import TrainConfig, train, train_kinds

__version__ = "0.1.0"
