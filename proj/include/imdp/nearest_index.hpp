#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "imdp/types.hpp"

namespace imdp {

struct Neighbor {
  StateId id;
  double distance;
};

/// Incremental bucketed k-d tree over R^d. Results are exactly those of a
/// brute-force scan ordered by (distance, id): ties go to the lower id.
///
/// Single writer. Concurrent const queries are safe once insertion stops.
class NearestIndex {
 public:
  explicit NearestIndex(int dim = 1, std::size_t leaf_capacity = 12);

  int dim() const { return dim_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  bool contains(StateId id) const { return id < present_.size() && present_[id]; }

  /// Throws std::invalid_argument on a duplicate id or a dimension mismatch.
  void insert(StateId id, const Vector& z);

  /// min(k, size()) neighbours sorted by nondecreasing distance.
  std::vector<Neighbor> nearest(const Vector& z, std::size_t k) const;
  void nearest(const Vector& z, std::size_t k, std::vector<Neighbor>& out) const;

 private:
  struct Node {
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int32_t axis = -1;
    double split = 0.0;
    StateId min_id = 0;
    std::vector<std::uint32_t> items;  // slots, ascending id; leaves only

    bool leaf() const { return axis < 0; }
  };

  struct Candidate {
    double d2;
    StateId id;
    bool operator<(const Candidate& o) const { return d2 < o.d2 || (d2 == o.d2 && id < o.id); }
  };

  const double* point(std::uint32_t slot) const { return points_.data() + std::size_t(slot) * dim_; }
  double* lo(std::size_t node) { return lo_.data() + node * dim_; }
  double* hi(std::size_t node) { return hi_.data() + node * dim_; }
  const double* lo(std::size_t node) const { return lo_.data() + node * dim_; }
  const double* hi(std::size_t node) const { return hi_.data() + node * dim_; }

  std::size_t new_node();
  void grow_box(std::size_t node, const double* p);
  void split_leaf(std::size_t node);
  bool degenerate(std::size_t node) const;
  double box_distance2(std::size_t node, const double* q) const;
  void search(std::size_t node, const double* q, std::size_t k, std::vector<Candidate>& best) const;
  static void offer(std::vector<Candidate>& best, std::size_t k, Candidate c);

  int dim_;
  std::size_t leaf_capacity_;
  std::vector<double> points_;
  std::vector<StateId> ids_;
  std::vector<Node> nodes_;
  std::vector<double> lo_, hi_;
  std::vector<char> present_;
};

}  // namespace imdp
