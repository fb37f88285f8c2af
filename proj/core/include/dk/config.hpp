#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dk/profile.hpp"
#include "dk/softening.hpp"
#include "dk/vec.hpp"

namespace dk {

// Run configuration, parsed from a key = value file with [section] headers.
// The raw file bytes are kept so the output directory name (FNV-1a 64 of the
// bytes) is stable against formatting-preserving round trips.
struct RunConfig {
  InitialProfile profile;
  int n_per_axis = 4;
  Softening softening{0.2};
  double dt = 4e-3;
  double t_end = 1.0;
  // ct-distance the wave data surface is pushed back before t = 0; large
  // enough that the backward cone from every probe has cleared the support
  double preroll_ct = 8.0;
  std::vector<double> c_list{4.0, 8.0, 16.0, 32.0};

  // spatial probe grid: box_n^3 midpoints of [box_lo, box_hi]
  Vec3 box_lo{-1.5, -1.5, -1.5};
  Vec3 box_hi{1.5, 1.5, 1.5};
  int box_n = 3;
  int n_phase_probes = 64;

  double fp_tol = 1e-12;
  double retard_tol = 1e-13;
  double ibp_tol = 5e-2;
  bool dvm_c4_term = false;
  bool compare_dvm = true;

  std::vector<double> eps_list{1.0, 0.25, 0.0625};
  std::string out_dir = "runs";

  std::string raw;  // original file contents

  std::uint64_t hash() const;
  std::string hash_hex() const;
  // out_dir/<hash_hex>, created on demand
  std::string run_dir() const;
};

std::uint64_t fnv1a64(const std::string& bytes);

// throws std::runtime_error with file/line context on malformed input or
// unknown keys
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace dk
