#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace isodeform {

/// Axis-aligned box [lo_i, hi_i] in parameter space.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(std::span<const double> u) const;
  /// Same box with every side pulled in by `fraction` of its length.
  Box shrunk(double fraction) const;
};

/// Tensor-product grid of `count` equispaced nodes per axis, endpoints
/// included. Nodes are enumerated with the last axis varying fastest.
class SampleGrid {
 public:
  SampleGrid() : count_(0), size_(0) {}
  SampleGrid(Box box, int count);

  /// Grid on the open parameter box: each side shrunk by 2%.
  static SampleGrid interior(const Box& domain, int count) { return {domain.shrunk(0.02), count}; }

  int dim() const { return box_.dim(); }
  int count() const { return count_; }
  std::size_t size() const { return size_; }
  const Box& box() const { return box_; }

  double coordinate(int axis, int i) const;
  std::vector<double> node(std::size_t flat) const;
  std::vector<int> multi_index(std::size_t flat) const;
  std::size_t flat_index(std::span<const int> multi) const;
  /// Node positions along one axis.
  std::vector<double> axis_nodes(int axis) const;

 private:
  Box box_;
  int count_;
  std::size_t size_;
};

}  // namespace isodeform
