#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace tout {

using StateId = std::uint64_t;

/// A node of the search tree: the problem input plus the thoughts accepted so far.
///
/// States are immutable once published through a StateStore and may be shared
/// freely between evaluation workers.
struct State {
  StateId id = 0;
  std::optional<StateId> parent_id;
  std::string input;
  std::vector<std::string> thoughts;

  std::size_t depth() const noexcept { return thoughts.size(); }
  bool is_root() const noexcept { return !parent_id.has_value(); }
};

using StatePtr = std::shared_ptr<const State>;

/// Owns every state created during one run and hands out run-local ids.
///
/// Ids come from a monotonically increasing counter, so two children carrying
/// identical thought text under different parents are still distinct states.
/// Reads may happen concurrently; writes are expected from the search loop only.
class StateStore {
 public:
  StatePtr make_root(std::string input);

  /// Child of `parent` with `thought` appended. Throws InvalidArgument on an
  /// empty thought.
  StatePtr extend(const State& parent, std::string thought);

  /// Throws MissingState when `id` is unknown.
  StatePtr get(StateId id) const;
  bool contains(StateId id) const;
  void evict(StateId id);
  std::size_t size() const;

 private:
  StatePtr publish(State state);

  mutable std::shared_mutex mutex_;
  std::unordered_map<StateId, StatePtr> states_;
  StateId next_id_ = 0;
};

/// Ancestors of `state` from the root down to `state` itself.
/// Throws MissingState naming the first unresolvable parent id.
std::vector<StatePtr> path_to_root(const State& state, const StateStore& store);

}  // namespace tout
