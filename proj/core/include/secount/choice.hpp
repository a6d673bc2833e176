#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <variant>
#include <vector>

#include "secount/rng.hpp"

namespace secount {

/// Which selection primitive a draw belongs to.
enum class Phase { weighted, uniform };

/// One pre-recorded draw: the phase it must come from and the label of the
/// candidate it selects.
struct ScriptedChoice {
  Phase phase;
  std::string label;
};

/// Source of every random decision an estimator makes: either a seeded
/// stream or a finite script of recorded draws. Estimators cannot tell the
/// two apart. A scripted source supplies exactly one entry per draw, forced
/// ones included; a random source skips the generator when the outcome is
/// forced.
class ChoiceSource {
 public:
  static ChoiceSource random(Rng rng) { return ChoiceSource(std::move(rng)); }
  static ChoiceSource random(std::uint64_t seed) { return ChoiceSource(Rng(seed)); }
  static ChoiceSource scripted(std::vector<ScriptedChoice> script) {
    return ChoiceSource(Script{std::move(script), 0});
  }

  bool is_scripted() const { return std::holds_alternative<Script>(state_); }

  /// Underlying generator; only valid for random sources.
  Rng& rng();

  /// Consumes the next scripted entry, which must belong to `phase`. Throws
  /// ScriptError when the script is exhausted or the phase does not match.
  const ScriptedChoice& next_scripted(Phase phase);

  /// Entries not yet consumed (0 for random sources).
  std::size_t remaining() const;
  bool exhausted() const { return is_scripted() && remaining() == 0; }

 private:
  struct Script {
    std::vector<ScriptedChoice> entries;
    std::size_t pos = 0;
  };

  explicit ChoiceSource(Rng rng) : state_(std::move(rng)) {}
  explicit ChoiceSource(Script s) : state_(std::move(s)) {}

  std::variant<Rng, Script> state_;
};

/// Script that makes the importance/uniform two-phase draw select each listed
/// hypernode in turn: the first label of each set is the weighted pick, the
/// rest are the uniform picks, in the order given.
std::vector<ScriptedChoice> hypernode_script(
    std::initializer_list<std::initializer_list<std::string>> hypernodes);

}  // namespace secount
