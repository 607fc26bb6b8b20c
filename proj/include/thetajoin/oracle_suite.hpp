#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "thetajoin/cost_model.hpp"
#include "thetajoin/workload.hpp"

namespace thetajoin {

struct OracleCase {
  std::uint64_t seed = 0;
  std::size_t relations = 0;
  std::size_t conditions = 0;
  std::size_t jobs = 0;
  std::uint64_t rows = 0;
  std::uint64_t oracle_rows = 0;
  std::uint64_t duplicates = 0;        // over every job output
  bool shuffle_matches_score = true;   // every job, every relation
  bool match = false;
  std::string error;
};

struct OracleSuiteOptions {
  std::size_t count = 50;
  std::uint64_t seed = 7;
  std::uint64_t k_p = 4;
  double sample_rate = 0.2;
  bool inject_flip = false;  // plan and run with condition 1 negated
  RandomWorkloadShape shape;
};

struct OracleSuiteResult {
  std::vector<OracleCase> cases;
  std::array<std::size_t, 6> operator_counts{};  // by CompareOp
  std::size_t passed() const;
  std::uint64_t duplicates() const;
};

// Random queries planned and executed, each compared with the nested-loop
// answer.
OracleSuiteResult run_oracle_suite(const OracleSuiteOptions& options, const Profile& profile);

}  // namespace thetajoin
