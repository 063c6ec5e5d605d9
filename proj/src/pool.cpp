#include "cno/pool.hpp"

#include <algorithm>
#include <cmath>

#include "cno/errors.hpp"

namespace cno {

std::vector<PoolBin> pool_bins(int length, int w) {
  if (w < 1 || w > length) throw ParamError("pool window out of range");
  std::vector<PoolBin> bins(static_cast<std::size_t>(w));
  for (int i = 0; i < w; ++i) {
    const auto lo = static_cast<int>(std::floor(static_cast<double>(i) * length / w));
    const auto hi = static_cast<int>(std::ceil(static_cast<double>(i + 1) * length / w));
    bins[static_cast<std::size_t>(i)] = {lo, std::min(hi, length)};
  }
  return bins;
}

int pooled_dim(const LatentShape& shape, int w) {
  return shape.grid ? shape.channels * w * w : w;
}

void downsample(std::span<const double> in, const LatentShape& shape, int w,
                std::span<double> out) {
  if (shape.grid) {
    const auto bins = pool_bins(shape.side, w);
    const int S = shape.side;
    std::size_t o = 0;
    for (int c = 0; c < shape.channels; ++c) {
      const double* plane = in.data() + static_cast<std::size_t>(c) * S * S;
      for (const auto& rb : bins) {
        for (const auto& cb : bins) {
          double acc = 0.0;
          for (int r = rb.begin; r < rb.end; ++r)
            for (int col = cb.begin; col < cb.end; ++col)
              acc += plane[static_cast<std::size_t>(r) * S + col];
          out[o++] = acc / (static_cast<double>(rb.size()) * cb.size());
        }
      }
    }
  } else {
    const auto bins = pool_bins(shape.dim, w);
    for (std::size_t i = 0; i < bins.size(); ++i) {
      double acc = 0.0;
      for (int j = bins[i].begin; j < bins[i].end; ++j)
        acc += in[static_cast<std::size_t>(j)];
      out[i] = acc / bins[i].size();
    }
  }
}

void downsample_adjoint(std::span<const double> pooled_grad,
                        const LatentShape& shape, int w, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  if (shape.grid) {
    const auto bins = pool_bins(shape.side, w);
    const int S = shape.side;
    std::size_t o = 0;
    for (int c = 0; c < shape.channels; ++c) {
      double* plane = out.data() + static_cast<std::size_t>(c) * S * S;
      for (const auto& rb : bins) {
        for (const auto& cb : bins) {
          const double g = pooled_grad[o++] /
                           (static_cast<double>(rb.size()) * cb.size());
          for (int r = rb.begin; r < rb.end; ++r)
            for (int col = cb.begin; col < cb.end; ++col)
              plane[static_cast<std::size_t>(r) * S + col] += g;
        }
      }
    }
  } else {
    const auto bins = pool_bins(shape.dim, w);
    for (std::size_t i = 0; i < bins.size(); ++i) {
      const double g = pooled_grad[i] / bins[i].size();
      for (int j = bins[i].begin; j < bins[i].end; ++j)
        out[static_cast<std::size_t>(j)] += g;
    }
  }
}

}  // namespace cno
