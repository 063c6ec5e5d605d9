#pragma once
// Adaptive average pooling over latent tensors. Bin i of an axis of length S
// covers [floor(i*S/w), ceil((i+1)*S/w)); bins may overlap when w does not
// divide S. Grid tensors pool each spatial axis to w (keeping channels), flat
// tensors pool the single axis to w. w equal to the axis length is identity.

#include <span>
#include <vector>

#include "cno/latent.hpp"

namespace cno {

struct PoolBin {
  int begin = 0;
  int end = 0;  // exclusive
  int size() const { return end - begin; }
};

std::vector<PoolBin> pool_bins(int length, int w);

// Output length for one tensor: C*w*w (grid) or w (flat).
int pooled_dim(const LatentShape& shape, int w);

void downsample(std::span<const double> in, const LatentShape& shape, int w,
                std::span<double> out);

// Adjoint map: distributes a pooled-space gradient back to tensor elements
// (each bin contributes grad/bin_size to every covered element).
void downsample_adjoint(std::span<const double> pooled_grad,
                        const LatentShape& shape, int w, std::span<double> out);

}  // namespace cno
