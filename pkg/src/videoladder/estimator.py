"""Placeholder; filled in after the trainer lands."""

class VideoLadderPredictor:
    pass
