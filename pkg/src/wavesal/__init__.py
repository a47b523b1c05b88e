"""Wavelet-domain scale saliency.

Library surface: image/fixation I/O, four wavelet descriptor back-ends
(DWT, best-basis packets, and their dual-tree quaternion variants),
entropy/surprise saliency maps with WSS or DIS scale selection, the
pixel-value scale-saliency baseline, and AUC/NSS evaluation.
"""

from .backends import backend_name
from .descriptors import (
    GGDParams,
    StackLayer,
    SubbandStack,
    energy_stack,
    fit_ggd,
    fit_ggd_table,
    ggd_density,
    ggd_log2_density,
    interband_pdf,
)
from .errors import (
    ConfigurationError,
    DegenerateDistributionError,
    FixationParseError,
    FormatError,
    KindError,
    ParameterError,
    WavesalError,
)
from .evaluation import EvalScore, RocCurve, aggregate, nss, roc_auc
from .filters import (
    DualTreeFilterSet,
    FilterBank,
    get_bank,
    get_dual_tree_set,
    group_delay_difference,
)
from .imagedata import (
    FixationSet,
    Image,
    SaliencyMap,
    load_fixations,
    load_image,
    write_map,
)
from .pss import PssConfig, pss_map
from .saliency import (
    SaliencyConfig,
    ScaleField,
    ScaleSelection,
    compute_map,
    entropy_observer,
    entropy_searcher,
    mutual_information,
    select_scale,
)
from .wavelet import (
    DecompositionTree,
    PacketTree,
    SubbandNode,
    best_basis,
    dwpt_full,
    dwt2,
    quaternion_magnitude,
    qwpt_best_basis,
    qwt2,
    transform,
)

__version__ = "0.1.0"
