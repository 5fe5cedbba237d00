#ifndef MRA_EXPERIMENTS_HPP
#define MRA_EXPERIMENTS_HPP

#include <string>
#include <vector>

#include "mra/serialize.hpp"

namespace mra {

// Exit codes shared by the library-level commands and the CLI wrapper.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFailure = 2;
inline constexpr int kExitInconclusive = 3;

struct CmdResult {
  int exit_code = kExitOk;
  json output;       // machine-readable payload (written to --out when given)
  std::string text;  // human-readable table / CSV body
};

/// Model construction from config params, e.g. {"model":"cryo_em","L":4,"R":9,"P":10},
/// {"model":"cyclic","N":8}, {"model":"rotated_images","L":2,"R":4}.
ModelInstance model_from_config(const json& config);

struct BoundRow {
  std::string model;
  int N = 0;
  int M = 0;
  int K_max = 0;
  double ratio = 0;          // max(K_max, 0) / N
  double closed_form = -1;   // cryo-EM only: the band-limit ratio formula
};

/// Band-limit ratio (2/3 L^3 + L^2 + L/3) / (2 L^3 + 5 L^2 + 4 L + 1); equals
/// K_max / N for the cryo-EM model when R = 2L + 1, which cmd_bound asserts.
double cryo_bound_ratio(int bandlimit);

BoundRow compute_bound(const ModelInstance& model);

/// FNV-1a hash of the canonical (sorted-key, compact) dump of the config.
std::uint64_t config_hash(const json& config);

/// Resolve the run seed: explicit override wins, else config "seed", else error.
std::uint64_t resolve_seed(const json& config, const std::uint64_t* override_seed);

CmdResult cmd_bound(const json& config);
CmdResult cmd_certify(const json& config, std::uint64_t seed);
CmdResult cmd_recover(const json& config, std::uint64_t seed);

struct SweepRecord {
  std::string model;
  double sigma = 0;
  long long n = 0;
  std::uint64_t seed = 0;
  double gram_error = 0;
  double recovery_error = 0;
  bool success = false;
  double wall_time_ms = 0;
};

/// CSV body with the exact column contract
/// model,sigma,n,seed,gram_error,recovery_error,success,wall_time_ms and a
/// provenance comment line (config hash + seed list).
std::string sweep_csv(const std::vector<SweepRecord>& records, std::uint64_t hash,
                      const std::vector<std::uint64_t>& seeds);

/// Runs the (sigma, n, seed) grid; grid points execute in parallel but rows
/// come out sorted by (sigma, n, seed), so the CSV does not depend on the
/// thread count. Set config "measure_time": false for bit-identical reruns.
CmdResult cmd_sweep(const json& config, std::uint64_t seed, int threads);

/// Emits a binary observation batch file at out_path.
CmdResult cmd_simulate(const json& config, std::uint64_t seed, const std::string& out_path);

/// Least-squares slope of log(y) against log(x); x, y > 0.
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Linear-interpolated crossing of rate = 0.5 on an (x, rate) curve sorted by
/// x ascending; negative when the curve never crosses.
double half_crossing(const std::vector<double>& x, const std::vector<double>& rate);

}  // namespace mra

#endif
