#pragma once

#include <span>
#include <vector>

#include "cno/errors.hpp"

namespace cno {

// Layout metadata for one latent tensor: either a (C, S, S) grid or a flat
// vector of length dim.
struct LatentShape {
  bool grid = false;
  int channels = 1;
  int side = 0;  // S for grids
  int dim = 0;   // C*S*S for grids, element count otherwise

  static LatentShape flat(int dim) { return {false, 1, 0, dim}; }
  static LatentShape make_grid(int channels, int side) {
    return {true, channels, side, channels * side * side};
  }
};

// B latent tensors stored row-major in one contiguous buffer.
struct LatentBatch {
  int batch_size = 0;
  LatentShape shape;
  std::vector<double> data;

  LatentBatch() = default;
  LatentBatch(int batch, LatentShape s)
      : batch_size(batch), shape(s),
        data(static_cast<std::size_t>(batch) * s.dim, 0.0) {
    if (batch < 0 || s.dim <= 0) throw ParamError("invalid latent batch dims");
  }

  int dim() const { return shape.dim; }

  std::span<double> row(int i) {
    return {data.data() + static_cast<std::size_t>(i) * shape.dim,
            static_cast<std::size_t>(shape.dim)};
  }
  std::span<const double> row(int i) const {
    return {data.data() + static_cast<std::size_t>(i) * shape.dim,
            static_cast<std::size_t>(shape.dim)};
  }
};

}  // namespace cno
