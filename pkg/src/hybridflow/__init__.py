"""Hybrid multi-task optical flow / next-frame prediction toolkit.

Subpackages
-----------
flowio      flow & frame data types, file codecs, metrics, warping, visualization
datagen     procedural triplet generator with exact ground truth + dataset storage
network     shared-encoder dual-decoder convolutional model and checkpoints
training    hybrid minibatch multiplexer, gated loss, optimizer, training loop
evalharness desk-scale reproductions of the evaluation protocols
cli         command-line entry points
"""

__version__ = "0.1.0"
