#include "tout/state.hpp"

#include <algorithm>
#include <mutex>

#include "tout/error.hpp"

namespace tout {

StatePtr StateStore::make_root(std::string input) {
  State root;
  root.input = std::move(input);
  return publish(std::move(root));
}

StatePtr StateStore::extend(const State& parent, std::string thought) {
  if (thought.empty()) throw InvalidArgument("extend_state: thought must be non-empty");
  State child;
  child.parent_id = parent.id;
  child.input = parent.input;
  child.thoughts = parent.thoughts;
  child.thoughts.push_back(std::move(thought));
  return publish(std::move(child));
}

StatePtr StateStore::publish(State state) {
  std::unique_lock lock(mutex_);
  state.id = next_id_++;
  auto ptr = std::make_shared<const State>(std::move(state));
  states_.emplace(ptr->id, ptr);
  return ptr;
}

StatePtr StateStore::get(StateId id) const {
  std::shared_lock lock(mutex_);
  auto it = states_.find(id);
  if (it == states_.end()) throw MissingState(id);
  return it->second;
}

bool StateStore::contains(StateId id) const {
  std::shared_lock lock(mutex_);
  return states_.contains(id);
}

void StateStore::evict(StateId id) {
  std::unique_lock lock(mutex_);
  states_.erase(id);
}

std::size_t StateStore::size() const {
  std::shared_lock lock(mutex_);
  return states_.size();
}

std::vector<StatePtr> path_to_root(const State& state, const StateStore& store) {
  std::vector<StatePtr> path;
  path.push_back(store.contains(state.id) ? store.get(state.id) : std::make_shared<const State>(state));
  while (path.back()->parent_id) {
    path.push_back(store.get(*path.back()->parent_id));
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace tout
