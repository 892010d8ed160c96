"""Quasi-arc construction in finite doubling, linearly connected spaces."""

from .arcs import DiscreteArc, loop_erase, validate_arc
from .blobs import BlobFamily, build_blobs, verify_blob_properties
from .corpus import (CorpusInstance, GeneratorSpec, generate,
                     generate_from_string, load_arc, load_space,
                     parse_genspec, save_arc, save_space)
from .errors import (FormatError, HypothesisFailure, QuasiarcError,
                     ScaleFloorError, VerificationError)
from .multiscale import (CauchyReport, IterationConfig, LambdaMeasurement,
                         MultiscaleTrace, check_cauchy, compose_follow_maps,
                         iterate, measure_local_quasiarc)
from .nets import Coloring, Net, build_net, color_net
from .profile import (BallSample, PairSample, SpaceProfile,
                      estimate_doubling, estimate_linear_connectivity,
                      linear_path, min_hop_path, profile_space)
from .space import (MetricSpace, check_metric_axioms, diameter,
                    hausdorff_distance, set_distance)
from .straighten import (BlobChain, CoarseMap, Discretization,
                         FollowsVerdict, StarCheck, StraighteningResult,
                         assemble_arc, build_follow_map, discretize_arc,
                         extract_chain, measure_star, scale_floor,
                         straighten, verify_follows)

__version__ = "0.1.0"
