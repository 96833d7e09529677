#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace flowsearch::search {

/// One recorded edit: (parent, score) --delta--> (child, score).
struct EditEdge {
  std::string parent_id;
  double parent_score = 0.0;
  std::string delta;  // non-empty
  std::string child_id;
  double child_score = 0.0;
  int round = 0;  // round of the child

  friend bool operator==(const EditEdge&, const EditEdge&) = default;
};

/// Local edit edges per parent plus the global (workflow, score) set. Exactly
/// one global entry per evaluated workflow.
class ExperienceStore {
 public:
  /// Registers an evaluated workflow in the global set. Throws on duplicates.
  void add_global(const std::string& workflow_id, double score);

  /// Adds an edit edge; the child joins the global set if not yet present.
  /// Idempotent per (parent, child): returns false and changes nothing on a
  /// repeat. Throws on an empty delta.
  bool add_edge(const EditEdge& edge);

  const std::vector<EditEdge>& local(const std::string& parent_id) const;
  const std::vector<std::pair<std::string, double>>& global_entries() const { return global_; }
  bool has_global(const std::string& workflow_id) const;
  std::size_t edge_count() const;

  friend bool operator==(const ExperienceStore&, const ExperienceStore&) = default;

 private:
  std::map<std::string, std::vector<EditEdge>> local_;
  std::vector<std::pair<std::string, double>> global_;
  std::set<std::pair<std::string, std::string>> seen_pairs_;
};

}  // namespace flowsearch::search
