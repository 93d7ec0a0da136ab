"""Secrecy-aware downlink beamforming for cell-free massive MIMO."""

from .channel import (ChannelSet, CorrelationPair, build_channel_set,
                      correlation_matrix, dump_channels, load_channel_dump,
                      psd_sqrt, synth_channel)
from .complexity import flops_proposed, flops_sdp, flops_srm
from .config import (ConfigError, SystemConfig, Topology, dbm_to_watt,
                     large_scale_gain, load_config, place_nodes, snr_to_pmax)
from .metrics import (BeamformerSet, MetricsRecord, eav_interference_cov,
                      evaluate, intended_rate, interference_cov, leakage_rate,
                      relaxed_secrecy_objective, worst_eavesdropper)
from .mmse import rx_mmse, tx_mmse_init
from .seclm import (FpAux, FpState, build_aux_i, build_aux_l, ldt_surrogate,
                    leakage_gradient, qt_surrogate, run_seclm,
                    update_precoders)
from .simulate import (ALGORITHMS, SweepResult, complexity_table, emit_csv,
                       run_sweep, summarize)
from .srm import run_srm

__version__ = "0.1.0"
