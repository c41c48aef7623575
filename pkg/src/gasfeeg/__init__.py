"""EEG epilepsy detection from Gramian Angular Summation Field images.

Two classification paths over fixed-length EEG epochs:
  - GASF image encoding -> from-scratch convolutional network
  - time-frequency spectra -> co-occurrence texture features -> binary PSO
    feature selection -> dense neural classifier
with precision/recall/F1 and ROC/AUC evaluation.
"""

__version__ = "0.1.0"

from . import gasf, ingest, kernels, metrics, nn, pipeline, pso, synth, texture, tfr

__all__ = ["gasf", "ingest", "kernels", "metrics", "nn", "pipeline", "pso",
           "synth", "texture", "tfr", "__version__"]
