#include "secount/choice.hpp"

#include <stdexcept>

#include "secount/errors.hpp"

namespace secount {

Rng& ChoiceSource::rng() {
  if (auto* r = std::get_if<Rng>(&state_)) return *r;
  throw std::logic_error("scripted choice source has no generator");
}

const ScriptedChoice& ChoiceSource::next_scripted(Phase phase) {
  auto* s = std::get_if<Script>(&state_);
  if (s == nullptr) throw std::logic_error("random choice source has no script");
  if (s->pos >= s->entries.size()) {
    throw ScriptError("choice script exhausted after " + std::to_string(s->entries.size()) + " draws");
  }
  const ScriptedChoice& c = s->entries[s->pos];
  if (c.phase != phase) {
    throw ScriptError("scripted draw " + std::to_string(s->pos) + " ('" + c.label + "') expected a " +
                      (phase == Phase::weighted ? "weighted" : "uniform") + " draw");
  }
  ++s->pos;
  return c;
}

std::size_t ChoiceSource::remaining() const {
  if (const auto* s = std::get_if<Script>(&state_)) return s->entries.size() - s->pos;
  return 0;
}

std::vector<ScriptedChoice> hypernode_script(
    std::initializer_list<std::initializer_list<std::string>> hypernodes) {
  std::vector<ScriptedChoice> out;
  for (const auto& h : hypernodes) {
    bool first = true;
    for (const auto& label : h) {
      out.push_back({first ? Phase::weighted : Phase::uniform, label});
      first = false;
    }
  }
  return out;
}

}  // namespace secount
