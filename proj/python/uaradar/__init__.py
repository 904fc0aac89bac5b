"""Similarity radar and impact classifier for captured web pages."""

from ._core import (
    Backbone,
    Report,
    Snapshot,
    UaradarError,
    VisualOptions,
    aggregate,
    classify,
    compare,
    content_similarity,
    delta,
    extract_backbone,
    hunk_levenshtein,
    load_backbone,
    load_snapshot,
    merge_backbones,
    parse_report,
    radar_svg,
    read_report,
    recompute_axes,
    run_batch,
    save_backbone,
    screenshot_profile,
    severity_of,
    structure_similarity,
    tree_edit_distance,
    visual_similarity,
    write_report,
)

AXES = ("html_structure", "html_content", "visual", "javascript", "css")

__all__ = [
    "AXES",
    "Backbone",
    "Report",
    "Snapshot",
    "UaradarError",
    "VisualOptions",
    "aggregate",
    "classify",
    "compare",
    "content_similarity",
    "delta",
    "extract_backbone",
    "hunk_levenshtein",
    "load_backbone",
    "load_snapshot",
    "merge_backbones",
    "parse_report",
    "radar_svg",
    "read_report",
    "recompute_axes",
    "run_batch",
    "save_backbone",
    "screenshot_profile",
    "severity_of",
    "structure_similarity",
    "tree_edit_distance",
    "visual_similarity",
    "write_report",
]
