#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ttu/sched_proto.hpp"

namespace oracle {

/// Table-driven reference for the switch side of the bundle exchange.
/// Predicts the reply to each message from its own bookkeeping.
class BundleModel {
 public:
  enum class Phase { Opened, Closed, Pending, Executed, Discarded };

  struct Entry {
    Phase phase = Phase::Opened;
    std::vector<std::string> staged;
    std::optional<std::uint64_t> at;
  };

  /// Error the switch must answer with, or nullopt for acceptance.
  /// Applies the transition when accepted.
  std::optional<ttu::Errc> step(const ttu::BundleMsg& m, std::uint64_t now);

  /// Pending ids due at `now`, in (time, commit order); marks them executed.
  std::vector<std::uint32_t> due(std::uint64_t now);

  const Entry* find(std::uint32_t id) const;

 private:
  std::map<std::uint32_t, Entry> bundles_;
  std::map<std::uint32_t, std::uint64_t> commit_order_;
  std::uint64_t commits_ = 0;
};

struct FuzzStats {
  std::uint64_t sequences = 0;
  std::uint64_t messages = 0;
  std::uint64_t executions = 0;
  std::uint64_t discarded_executed = 0;   // commands run from a discarded bundle
  std::uint64_t executed_discarded = 0;   // discard accepted after execution
  std::uint64_t out_of_order = 0;         // bad history, interleaving or time order
  std::uint64_t model_mismatches = 0;     // reply or execution differs from BundleModel
  std::uint64_t idempotence_failures = 0;
};

/// Random message sequences of length [1, max_len] over a handful of ids.
FuzzStats run_bundle_fuzz(std::uint64_t seed, std::uint64_t sequences, unsigned max_len = 24);

}  // namespace oracle
