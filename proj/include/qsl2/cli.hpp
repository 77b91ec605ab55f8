#pragma once

// Command-line front end plus the pieces it shares with the acceptance suite:
// the seeded matrix generator and the batch runner behind `selftest`.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qsl2/reduce.hpp"

namespace qsl2 {

enum ExitCode : int { kExitOk = 0, kExitVerify = 1, kExitExhausted = 2, kExitInvalid = 3 };

/// Exit code for a library error.
int exit_code_for(Errc code);

/// Product of `word_len` random E12/E21/ZWORD factors; E12/E21 parameters are
/// non-zero with norm <= param_max_norm.  Uses raw engine output only, so the
/// sequence is identical across standard libraries.
Matrix2 random_sl2(long d, std::mt19937_64& rng, int word_len, long param_max_norm);

/// Engine for field d under a run seed.
std::mt19937_64 field_rng(std::uint64_t seed, long d);

struct SelftestOptions {
  std::vector<long> fields{-1, -2, -3, -7, -11, -19, -43, -67, -163};
  int count = 25;
  std::uint64_t seed = 1;
  int gen_word_len = 8;
  long param_max_norm = 20;
  bool timing = false;  // wall-clock millis in the CSV (otherwise 0, keeping it deterministic)
  std::string certs_dir;  // write each certificate here when non-empty
  PipelineConfig pipeline;
};

struct RunRow {
  long d = 0;
  int index = 0;
  std::size_t cert_len = 0;
  std::uint64_t trials = 0;
  unsigned long max_t = 0;
  long long millis = 0;
  long long wall_millis = 0;  // always measured; only printed with timing
  bool verified = false;
  int exit_code = kExitOk;
  std::string error;
  ReduceStats stats;
  std::string certificate_json;
};

struct RunReport {
  std::vector<RunRow> rows;

  int exit_code() const;
  std::size_t max_len() const;
  std::size_t max_len(long d) const;
};

RunReport run_selftest(const SelftestOptions& opt);

/// `d,index,cert_len,trials,max_t,millis` rows plus a header.
std::string report_csv(const RunReport& rep);
/// Per-field min/max/mean of length, trials and t.
std::string report_summary(const RunReport& rep);

/// Entry point of the qsl2 executable.
int run_cli(int argc, char** argv);

}  // namespace qsl2
