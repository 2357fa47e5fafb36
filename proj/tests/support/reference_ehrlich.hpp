#pragma once

// Test-side Ehrlich scorer built only from the serialized oracle document.
// It counts integer quantization levels and divides once at the end, so it
// shares no arithmetic with the library's scorer.

#include <cstddef>
#include <vector>

#include <nlohmann/json.hpp>

namespace testsupport {

struct ReferenceEhrlich {
  std::size_t alphabet_size = 0;
  std::size_t length = 0;
  std::size_t q = 1;
  std::vector<std::vector<double>> rows;
  std::vector<std::vector<unsigned>> motifs;
  std::vector<std::vector<std::size_t>> offsets;

  static ReferenceEhrlich from_json(const nlohmann::json& doc) {
    ReferenceEhrlich r;
    r.alphabet_size = doc.at("alphabet_size").get<std::size_t>();
    r.length = doc.at("sequence_length").get<std::size_t>();
    r.q = doc.at("quantization").get<std::size_t>();
    r.rows = doc.at("transition_matrix").get<std::vector<std::vector<double>>>();
    r.motifs = doc.at("motifs").get<std::vector<std::vector<unsigned>>>();
    r.offsets = doc.at("offsets").get<std::vector<std::vector<std::size_t>>>();
    return r;
  }

  double score(const std::vector<unsigned>& x) const {
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      if (!(rows[x[i]][x[i + 1]] > 0.0)) return 0.0;
    }
    long numerator = 1;
    long denominator = 1;
    for (std::size_t m = 0; m < motifs.size(); ++m) {
      const auto& sym = motifs[m];
      const auto& off = offsets[m];
      std::size_t best = 0;
      for (std::size_t a = 0; a + off.back() < x.size(); ++a) {
        std::size_t hits = 0;
        for (std::size_t j = 0; j < sym.size(); ++j) hits += x[a + off[j]] == sym[j] ? 1 : 0;
        if (hits > best) best = hits;
      }
      // Largest level k with k/q <= hits/l.
      std::size_t level = 0;
      while ((level + 1) * sym.size() <= best * q) ++level;
      numerator *= static_cast<long>(level);
      denominator *= static_cast<long>(q);
    }
    return static_cast<double>(numerator) / static_cast<double>(denominator);
  }
};

}  // namespace testsupport
