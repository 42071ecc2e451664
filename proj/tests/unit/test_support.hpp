#pragma once

#include "ssr/harness.hpp"
#include "ssr/network.hpp"
#include "ssr/synth.hpp"

namespace ssr::testing {

// A reduced acquisition: 6000 folded bins, 41 spectra, 40 kHz steps.
inline ExperimentConfig small_config(double power_fraction = 0.0) {
  auto c = default_config(Scale::kDesk);
  c.synth.if_band_hz = 6e5;
  c.synth.n_spectra = 41;
  c.synth.faxion.start_window_hz = 4e5;
  c.synth.faxion.power_fraction = power_fraction;
  c.repetitions = 4;
  c.output_dir = "";
  return c;
}

inline NetworkParams with_signal(NetworkParams p) {
  p.n_A = 1.0;
  return p;
}

}  // namespace ssr::testing
