#pragma once

#include <algorithm>
#include <vector>

namespace mmcoord {

template <typename Key>
std::map<Key, CommunityId> canonicalize(const std::map<Key, CommunityId>& assignment) {
  std::map<CommunityId, std::vector<Key>> groups;
  for (const auto& [key, c] : assignment) groups[c].push_back(key);  // keys arrive ascending
  std::vector<const std::vector<Key>*> order;
  order.reserve(groups.size());
  for (const auto& [c, members] : groups) order.push_back(&members);
  std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    if (a->size() != b->size()) return a->size() > b->size();
    return a->front() < b->front();
  });
  std::map<Key, CommunityId> out;
  for (CommunityId id = 0; id < order.size(); ++id) {
    for (const auto& key : *order[id]) out.emplace(key, id);
  }
  return out;
}

}  // namespace mmcoord
