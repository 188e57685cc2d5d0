"""Synthetic dyslexia-handwriting word scenes and detection evaluation.

The heavy lifting lives in the C++ extension ``lexikit._core``; this package
re-exports its public surface.
"""

from lexikit._core import (  # noqa: F401
    CLASS_NAMES,
    LETTER_SIZE,
    LetterPool,
    LexikitError,
    __version__,
    average_precision,
    compose_scene,
    detect_dataset,
    detect_image,
    evaluate,
    generate_dataset,
    iou,
    load_pool,
    match_detections,
    mirror,
    prep_letter,
    read_labels,
    read_predictions,
    synth_pool,
)

NORMAL, REVERSAL, CORRECTED = 0, 1, 2
