#pragma once

// Randomized invariant suites behind `banachproj verify`. Each suite draws
// `count` seeded instances in l_p^n and checks one family of identities.

#include <cstdint>
#include <string>
#include <vector>

namespace banachproj {

struct SuiteReport {
  std::string suite;
  double p = 2.0;
  std::size_t n = 0;
  std::size_t passed = 0;
  std::size_t failed = 0;
  /// Instances whose finite-difference oracle did not converge; they count
  /// as neither pass nor fail.
  std::size_t excluded = 0;
  /// First few failure descriptions.
  std::vector<std::string> failures;

  bool ok() const { return failed == 0 && passed > 0; }
};

/// "duality", "ball", "cone", "subspace", "properties4", "hilbert".
const std::vector<std::string>& suite_names();

/// Throws DomainError for an unknown suite, and for "hilbert" unless p = 2.
SuiteReport run_suite(const std::string& suite, double p, std::size_t n, std::uint64_t seed, std::size_t count = 100);

}  // namespace banachproj
