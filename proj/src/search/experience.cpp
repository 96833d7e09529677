#include "flowsearch/search/experience.hpp"

#include <stdexcept>

namespace flowsearch::search {

void ExperienceStore::add_global(const std::string& workflow_id, double score) {
  if (has_global(workflow_id))
    throw std::invalid_argument("workflow already in global experience: " + workflow_id);
  global_.emplace_back(workflow_id, score);
}

bool ExperienceStore::add_edge(const EditEdge& edge) {
  if (edge.delta.empty()) throw std::invalid_argument("edit edge with empty delta");
  if (!seen_pairs_.insert({edge.parent_id, edge.child_id}).second) return false;
  local_[edge.parent_id].push_back(edge);
  if (!has_global(edge.child_id)) global_.emplace_back(edge.child_id, edge.child_score);
  return true;
}

const std::vector<EditEdge>& ExperienceStore::local(const std::string& parent_id) const {
  static const std::vector<EditEdge> empty;
  auto it = local_.find(parent_id);
  return it == local_.end() ? empty : it->second;
}

bool ExperienceStore::has_global(const std::string& workflow_id) const {
  for (const auto& [id, _] : global_) {
    if (id == workflow_id) return true;
  }
  return false;
}

std::size_t ExperienceStore::edge_count() const {
  std::size_t n = 0;
  for (const auto& [_, edges] : local_) n += edges.size();
  return n;
}

}  // namespace flowsearch::search
