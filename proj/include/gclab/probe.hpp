#pragma once

#include <stdexcept>
#include <vector>

#include "gclab/matrix.hpp"

namespace gclab {

class ProbeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProbeOptions {
  double l2 = 1.0;
  int iters = 500;
  double tol = 1e-6;
};

// Multinomial logistic regression. The bias is not regularised.
struct ProbeModel {
  Matrix w;               // K×d
  std::vector<double> b;  // K
  double l2 = 1.0;
  int iters = 500;
  double tol = 1e-6;
  int iterations_run = 0;
  double objective = 0.0;
  double grad_norm = 0.0;
  bool trained = false;
};

// (1/n)·[Σ_i CE_i + (l2/2)‖W‖²] over the n training rows.
double probe_objective(const Matrix& w, const std::vector<double>& b, const Matrix& h, const std::vector<int>& labels,
                       const std::vector<std::size_t>& ids, double l2);

// Full-batch gradient descent with Armijo backtracking from W = 0, b = 0.
// Stops once the gradient norm drops below tol or after iters steps.
ProbeModel fit_probe(const Matrix& h, const std::vector<int>& labels, const std::vector<std::size_t>& train_ids,
                     int num_classes, const ProbeOptions& options = {});

Matrix predict_proba(const ProbeModel& model, const Matrix& h);
// Argmax of the logits; ties go to the lowest class index.
std::vector<int> predict(const ProbeModel& model, const Matrix& h);
double accuracy(const ProbeModel& model, const Matrix& h, const std::vector<int>& labels,
                const std::vector<std::size_t>& ids);

}  // namespace gclab
