"""Region based easy path wavelet transform codec."""

from .analysis import CoeffId, basis_element, keep_n_largest, psnr_paper, psnr_std, tensor_n_term
from .codec import EASY, EPWT, GRAD, EncodedImage, decode, encode, level_paths, recompute_paths
from .container import deserialize, read_encoded, serialize, write_encoded
from .errors import FormatError, PreconditionError, RbepwtError
from .imagecore import load_image, row_major_rank, save_image
from .paths import (
    CHEBYSHEV,
    EUCLIDEAN,
    RegionGradient,
    compute_region_gradient,
    decimate,
    easy_path,
    epwt_path,
    glue_paths,
    grad_path,
)
from .roi import ancestors, keep_ancestors_only, roi_threshold
from .segmentation import LabelMap, SegParams, fh_segment, gaussian_smooth, perimeter, region_points
from .wavelet import CDF97, HAAR, dwt_periodic, idwt_periodic, tensor_dwt2, tensor_idwt2

__version__ = "0.1.0"
