"""Learning-free, privatizing, explainable compression for chest X-ray images.

Pixels are kept or discarded by fixed spatial sampling priors (horizontal
row bands, seeded random lines, a saliency-derived region of interest, and
their combinations), optionally after median pooling. Kept pixels travel
as an xz-compressed flat vector in a small self-describing packet; the
sampling mask is rebuilt from the packet header, never stored.
"""

from .codec import (
    decode_packet,
    encode_masked_jpeg,
    encode_packet,
    flatten,
    imr,
    odr,
    reconstruct,
)
from .errors import (
    CorruptionError,
    DecodeError,
    FormatError,
    HeartSpotError,
    IntegrityError,
    ShapeError,
)
from .explain import (
    attribution_to_image,
    load_attribution,
    render_heatmap,
    smooth_attribution,
)
from .imaging import center_crop, decode_image, encode_image
from .pooling import PoolSpec, median_pool, quantile_pool
from .priors import (
    DEFAULT_HEART_QUANTILE,
    BinaryMask,
    CirclePointPair,
    HeartReference,
    PriorSpec,
    bresenham_line,
    combine_masks,
    generate_mask,
    heart_mask_from_saliency,
    heart_reference_from_bytes,
    hline_mask,
    load_heart_reference,
    mask_from_png,
    mask_to_png,
    rline_mask,
    sample_circle_pair,
    synthetic_heart_saliency,
)

__version__ = "0.1.0"
