#pragma once

#include <string>
#include <vector>

namespace scrt {

/// Outcome of one verification check. Checks numbered 1..11 are the release
/// acceptance checks; id 0 marks the supplementary invariant bundles that the
/// named suites run in addition. Every check carries its own wall-clock
/// budget; exceeding it fails the check.
struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;  // empty on success, otherwise the first failures
  double seconds = 0.0;
};

CheckResult check_param_counts();       // 1
CheckResult check_lookahead();          // 2
CheckResult check_was_suite();          // 3
CheckResult check_causality();          // 4
CheckResult check_chunk_invariance();   // 5
CheckResult check_memory_law();         // 6
CheckResult check_dense_equivalence();  // 7
CheckResult check_rnnt_oracle();        // 8
CheckResult check_rnnt_gradient();      // 9
CheckResult check_decoder_sanity();     // 10
CheckResult check_subsampling_law();    // 11

// Supplementary invariant bundles, grouped by the suite that runs them.
CheckResult check_kernel_invariants();      // was
CheckResult check_attention_invariants();   // causality
CheckResult check_streaming_invariants();   // chunking
CheckResult check_transducer_invariants();  // rnnt
CheckResult check_config_invariants();      // params

/// Runs one named suite: was, causality, chunking, rnnt, or params.
/// Throws ConfigError for an unknown name.
std::vector<CheckResult> run_suite(const std::string& name);

/// Runs the eleven acceptance checks in order.
std::vector<CheckResult> run_all();

}  // namespace scrt
