#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "depthlab/errors.hpp"

namespace depthlab {

/// Results of the stronger player after one opening. p: as Black (moves
/// 3, 5, ... after the opening stone), q: as White (moves 2, 4, ...).
/// A count of 0 marks an exact value rather than an estimate.
struct OpeningWinrate {
  std::string id;
  double p = 0.5;
  double q = 0.5;
  std::uint64_t n_p = 0;
  std::uint64_t n_q = 0;

  friend bool operator==(const OpeningWinrate&, const OpeningWinrate&) = default;
};

struct WinrateTable {
  std::string strong;
  std::string weak;
  std::vector<OpeningWinrate> openings;

  std::size_t size() const { return openings.size(); }
  const OpeningWinrate& operator[](std::size_t i) const { return openings.at(i); }

  void validate() const {
    if (openings.empty()) throw ConfigError("winrate table '" + strong + "' vs '" + weak + "' has no openings");
    for (const auto& o : openings) {
      if (!(o.p >= 0.0 && o.p <= 1.0) || !(o.q >= 0.0 && o.q <= 1.0))
        throw ConfigError("opening '" + o.id + "': winrates must lie in [0,1]");
    }
  }

  bool is_analytic() const {
    for (const auto& o : openings)
      if (o.n_p != 0 || o.n_q != 0) return false;
    return true;
  }

  bool low_count(std::uint64_t threshold = 30) const {
    for (const auto& o : openings)
      if ((o.n_p != 0 && o.n_p < threshold) || (o.n_q != 0 && o.n_q < threshold)) return true;
    return false;
  }

  friend bool operator==(const WinrateTable&, const WinrateTable&) = default;
};

inline void to_json(nlohmann::json& j, const OpeningWinrate& o) {
  j = nlohmann::json{{"id", o.id}, {"p", o.p}, {"q", o.q}, {"n_p", o.n_p}, {"n_q", o.n_q}};
}

inline void from_json(const nlohmann::json& j, OpeningWinrate& o) {
  o.id = j.at("id").get<std::string>();
  o.p = j.at("p").get<double>();
  o.q = j.at("q").get<double>();
  o.n_p = j.value("n_p", std::uint64_t{0});
  o.n_q = j.value("n_q", std::uint64_t{0});
}

inline void to_json(nlohmann::json& j, const WinrateTable& t) {
  j = nlohmann::json{{"pair", {t.strong, t.weak}}, {"openings", t.openings}};
}

inline void from_json(const nlohmann::json& j, WinrateTable& t) {
  const auto pair = j.at("pair").get<std::vector<std::string>>();
  if (pair.size() != 2) throw ConfigError("\"pair\" must hold two labels");
  t.strong = pair[0];
  t.weak = pair[1];
  t.openings = j.at("openings").get<std::vector<OpeningWinrate>>();
  t.validate();
}

}  // namespace depthlab
