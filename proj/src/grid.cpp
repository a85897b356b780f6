#include "isodeform/grid.hpp"

#include <fmt/format.h>

#include "isodeform/error.hpp"

namespace isodeform {

bool Box::contains(std::span<const double> u) const {
  if (static_cast<int>(u.size()) != dim()) return false;
  for (int i = 0; i < dim(); ++i)
    if (u[i] < lo[i] || u[i] > hi[i]) return false;
  return true;
}

Box Box::shrunk(double fraction) const {
  Box b = *this;
  for (int i = 0; i < dim(); ++i) {
    const double pad = fraction * (hi[i] - lo[i]);
    b.lo[i] += pad;
    b.hi[i] -= pad;
  }
  return b;
}

SampleGrid::SampleGrid(Box box, int count) : box_(std::move(box)), count_(count), size_(1) {
  if (box_.lo.size() != box_.hi.size() || box_.lo.empty()) throw DimensionError("grid: malformed box");
  if (count < 1) throw DimensionError(fmt::format("grid: {} nodes per axis", count));
  for (int i = 0; i < dim(); ++i) {
    if (!(box_.hi[i] >= box_.lo[i])) throw DimensionError(fmt::format("grid: axis {} has hi < lo", i + 1));
    size_ *= static_cast<std::size_t>(count);
  }
}

double SampleGrid::coordinate(int axis, int i) const {
  if (count_ == 1) return 0.5 * (box_.lo[axis] + box_.hi[axis]);
  const double t = static_cast<double>(i) / (count_ - 1);
  return box_.lo[axis] + t * (box_.hi[axis] - box_.lo[axis]);
}

std::vector<int> SampleGrid::multi_index(std::size_t flat) const {
  std::vector<int> idx(dim());
  for (int axis = dim() - 1; axis >= 0; --axis) {
    idx[axis] = static_cast<int>(flat % count_);
    flat /= count_;
  }
  return idx;
}

std::size_t SampleGrid::flat_index(std::span<const int> multi) const {
  std::size_t flat = 0;
  for (int axis = 0; axis < dim(); ++axis) flat = flat * count_ + static_cast<std::size_t>(multi[axis]);
  return flat;
}

std::vector<double> SampleGrid::node(std::size_t flat) const {
  const auto idx = multi_index(flat);
  std::vector<double> u(dim());
  for (int axis = 0; axis < dim(); ++axis) u[axis] = coordinate(axis, idx[axis]);
  return u;
}

std::vector<double> SampleGrid::axis_nodes(int axis) const {
  std::vector<double> x(count_);
  for (int i = 0; i < count_; ++i) x[i] = coordinate(axis, i);
  return x;
}

}  // namespace isodeform
