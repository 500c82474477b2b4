#pragma once

// Oracles and generators shared by the unit tests and the acceptance binary.
// The oracles do not use the engine.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "recasm/parser.hpp"
#include "recasm/runtime.hpp"

#ifndef RECASM_CORPUS_DIR
#error "RECASM_CORPUS_DIR must point at the corpus directory"
#endif

namespace support {

inline std::string corpus(const std::string& name) { return std::string(RECASM_CORPUS_DIR) + "/" + name + ".recasm"; }

inline recasm::Program load(const std::string& name) { return recasm::parse_file(corpus(name)); }

inline std::vector<std::int64_t> sorted_copy(std::vector<std::int64_t> xs) {
  std::sort(xs.begin(), xs.end());
  return xs;
}

inline std::vector<std::int64_t> primes_by_trial_division(std::size_t count) {
  std::vector<std::int64_t> out;
  for (std::int64_t n = 2; out.size() < count; ++n) {
    bool prime = true;
    for (std::int64_t d = 2; d * d <= n; ++d) {
      if (n % d == 0) {
        prime = false;
        break;
      }
    }
    if (prime) out.push_back(n);
  }
  return out;
}

inline std::vector<std::int64_t> random_list(std::mt19937_64& rng, std::size_t max_len, std::int64_t bound) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<std::int64_t> val(-bound, bound);
  std::vector<std::int64_t> xs(len(rng));
  for (auto& x : xs) x = val(rng);
  return xs;
}

inline recasm::Value to_value(const std::vector<std::int64_t>& xs) {
  recasm::Value::List l;
  for (auto x : xs) l.emplace_back(x);
  return recasm::Value(std::move(l));
}

/// Integers of a list value; nullopt if it is anything else.
inline std::optional<std::vector<std::int64_t>> ints_of(const recasm::Value& v) {
  if (!v.is_list()) return std::nullopt;
  std::vector<std::int64_t> out;
  for (const auto& x : v.as_list()) {
    if (!x.is_int()) return std::nullopt;
    out.push_back(x.as_int());
  }
  return out;
}

inline recasm::Value main_output(const recasm::Engine& e) {
  const auto& main = e.program().rule(e.program().main);
  return e.state().lookup(recasm::Location{recasm::AgentId{0}, main.output, {}});
}

}  // namespace support
