"""OFDM radar pulse design with genetic algorithms."""
from .baselines import newman_phases, random_phases, uncoded
from .design_rules import bandwidth_from_extent, max_pulse_length, max_subcarriers
from .detection import (TargetModel, normalize_spectrum, optimal_weights,
                        reflectivity_spectrum, two_step_design)
from .encoding import Chromosome, decode, encode, population_size_for_coverage
from .metrics import ObjectiveVector, autocorrelation, islr, objectives, pmepr, pslr
from .moo import MooConfig, crowding_distance, non_dominated_sort, run_nsga2, scalarized_objective
from .sga import SgaConfig, run_sga
from .waveform import OfdmParams, PhaseCodeMatrix, SampledPulse, apply_mask, synthesize_pulse

__version__ = "0.1.0"
