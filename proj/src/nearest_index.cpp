#include "imdp/nearest_index.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace imdp {

NearestIndex::NearestIndex(int dim, std::size_t leaf_capacity)
    : dim_(dim), leaf_capacity_(std::max<std::size_t>(leaf_capacity, 2)) {
  if (dim <= 0) throw std::invalid_argument("index dimension must be positive");
}

std::size_t NearestIndex::new_node() {
  nodes_.emplace_back();
  lo_.resize(lo_.size() + dim_, 0.0);
  hi_.resize(hi_.size() + dim_, 0.0);
  return nodes_.size() - 1;
}

void NearestIndex::grow_box(std::size_t node, const double* p) {
  double* l = lo(node);
  double* h = hi(node);
  for (int k = 0; k < dim_; ++k) {
    l[k] = std::min(l[k], p[k]);
    h[k] = std::max(h[k], p[k]);
  }
}

bool NearestIndex::degenerate(std::size_t node) const {
  const double* l = lo(node);
  const double* h = hi(node);
  for (int k = 0; k < dim_; ++k)
    if (l[k] != h[k]) return false;
  return true;
}

void NearestIndex::insert(StateId id, const Vector& z) {
  if (z.size() != dim_) throw std::invalid_argument("point dimension mismatch");
  if (contains(id)) throw std::invalid_argument("duplicate state id " + std::to_string(id));
  if (present_.size() <= id) present_.resize(std::size_t(id) + 1, 0);
  present_[id] = 1;

  const auto slot = static_cast<std::uint32_t>(ids_.size());
  ids_.push_back(id);
  points_.insert(points_.end(), z.data(), z.data() + dim_);
  const double* p = point(slot);

  if (nodes_.empty()) {
    const std::size_t root = new_node();
    std::copy(p, p + dim_, lo(root));
    std::copy(p, p + dim_, hi(root));
    nodes_[root].min_id = id;
  }

  std::size_t node = 0;
  for (;;) {
    grow_box(node, p);
    nodes_[node].min_id = std::min(nodes_[node].min_id, id);
    if (nodes_[node].leaf()) break;
    const auto& n = nodes_[node];
    node = static_cast<std::size_t>(p[n.axis] < n.split ? n.left : n.right);
  }

  auto& items = nodes_[node].items;
  const auto pos = std::upper_bound(items.begin(), items.end(), id,
                                    [&](StateId v, std::uint32_t s) { return v < ids_[s]; });
  items.insert(pos, slot);
  if (items.size() > leaf_capacity_ && !degenerate(node)) split_leaf(node);
}

void NearestIndex::split_leaf(std::size_t node) {
  int axis = 0;
  double widest = -1.0;
  for (int k = 0; k < dim_; ++k) {
    const double w = hi(node)[k] - lo(node)[k];
    if (w > widest) {
      widest = w;
      axis = k;
    }
  }
  std::vector<double> values;
  values.reserve(nodes_[node].items.size());
  for (auto s : nodes_[node].items) values.push_back(point(s)[axis]);
  std::sort(values.begin(), values.end());
  // Split at the distinct-value boundary closest to the median so both
  // halves are nonempty.
  const std::size_t mid = values.size() / 2;
  std::size_t cut = 0;
  for (std::size_t off = 0; off < values.size(); ++off) {
    if (mid + off < values.size() && mid + off > 0 && values[mid + off - 1] < values[mid + off]) {
      cut = mid + off;
      break;
    }
    if (off < mid && values[mid - off - 1] < values[mid - off]) {
      cut = mid - off;
      break;
    }
  }
  if (cut == 0) return;
  const double split = values[cut];

  const std::size_t left = new_node();
  const std::size_t right = new_node();
  std::vector<std::uint32_t> items = std::move(nodes_[node].items);
  nodes_[node].items.clear();
  nodes_[node].axis = axis;
  nodes_[node].split = split;
  nodes_[node].left = static_cast<std::int32_t>(left);
  nodes_[node].right = static_cast<std::int32_t>(right);

  bool init_left = false, init_right = false;
  for (auto s : items) {
    const double* p = point(s);
    const bool go_left = p[axis] < split;
    const std::size_t child = go_left ? left : right;
    bool& init = go_left ? init_left : init_right;
    if (!init) {
      std::copy(p, p + dim_, lo(child));
      std::copy(p, p + dim_, hi(child));
      nodes_[child].min_id = ids_[s];
      init = true;
    }
    grow_box(child, p);
    nodes_[child].min_id = std::min(nodes_[child].min_id, ids_[s]);
    nodes_[child].items.push_back(s);  // stays id-sorted
  }
}

double NearestIndex::box_distance2(std::size_t node, const double* q) const {
  const double* l = lo(node);
  const double* h = hi(node);
  double d2 = 0.0;
  for (int k = 0; k < dim_; ++k) {
    double d = 0.0;
    if (q[k] < l[k]) d = l[k] - q[k];
    else if (q[k] > h[k]) d = q[k] - h[k];
    d2 += d * d;
  }
  return d2;
}

void NearestIndex::offer(std::vector<Candidate>& best, std::size_t k, Candidate c) {
  if (best.size() == k) {
    if (!(c < best.back())) return;
    best.pop_back();
  }
  best.insert(std::upper_bound(best.begin(), best.end(), c), c);
}

void NearestIndex::search(std::size_t node, const double* q, std::size_t k,
                          std::vector<Candidate>& best) const {
  const Node& n = nodes_[node];
  if (n.leaf()) {
    const bool same_point = degenerate(node);
    for (auto s : n.items) {
      const double* p = point(s);
      double d2 = 0.0;
      for (int j = 0; j < dim_; ++j) {
        const double d = p[j] - q[j];
        d2 += d * d;
      }
      const Candidate c{d2, ids_[s]};
      if (best.size() == k && !(c < best.back())) {
        if (same_point) break;
        continue;
      }
      offer(best, k, c);
    }
    return;
  }
  const auto l = static_cast<std::size_t>(n.left);
  const auto r = static_cast<std::size_t>(n.right);
  const double dl = box_distance2(l, q);
  const double dr = box_distance2(r, q);
  const bool left_first = dl < dr || (dl == dr && nodes_[l].min_id < nodes_[r].min_id);
  const std::size_t first = left_first ? l : r;
  const std::size_t second = left_first ? r : l;
  const double d_first = left_first ? dl : dr;
  const double d_second = left_first ? dr : dl;
  auto prune = [&](std::size_t child, double d2) {
    return best.size() == k && !(Candidate{d2, nodes_[child].min_id} < best.back());
  };
  if (!prune(first, d_first)) search(first, q, k, best);
  if (!prune(second, d_second)) search(second, q, k, best);
}

void NearestIndex::nearest(const Vector& z, std::size_t k, std::vector<Neighbor>& out) const {
  out.clear();
  if (z.size() != dim_) throw std::invalid_argument("query dimension mismatch");
  if (k == 0 || nodes_.empty()) return;
  k = std::min(k, ids_.size());
  thread_local std::vector<Candidate> best;
  best.clear();
  best.reserve(k + 1);
  search(0, z.data(), k, best);
  out.reserve(best.size());
  for (const auto& c : best) out.push_back({c.id, std::sqrt(c.d2)});
}

std::vector<Neighbor> NearestIndex::nearest(const Vector& z, std::size_t k) const {
  std::vector<Neighbor> out;
  nearest(z, k, out);
  return out;
}

}  // namespace imdp
