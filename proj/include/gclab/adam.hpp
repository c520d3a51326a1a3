#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gclab/matrix.hpp"

namespace gclab {

struct AdamOptions {
  double lr = 5e-4;
  double weight_decay = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamOptions options;
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;
  std::uint64_t step = 0;
};

AdamState make_adam_state(std::span<const Matrix> params, const AdamOptions& options);

// One Adam update in place. Weight decay enters as an L2 gradient term
// (g + wd·θ) before the moment updates, as torch.optim.Adam does.
void adam_step(AdamState& state, std::span<Matrix> params, std::span<const Matrix> grads);

}  // namespace gclab
