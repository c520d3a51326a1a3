#pragma once

#include <stdexcept>
#include <vector>

#include "gclab/matrix.hpp"

namespace gclab {

struct EigenDecomp {
  std::vector<double> eigenvalues;  // ascending
  Matrix eigenvectors;              // column i pairs with eigenvalues[i]
};

class EighError : public std::runtime_error {
 public:
  EighError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Symmetric eigendecomposition by Householder tridiagonalisation followed by
// implicit QL with Wilkinson shifts. The input is symmetrised as (A + Aᵀ)/2
// first. Each eigenvector is sign-fixed so its largest-magnitude entry (first
// one on ties) is positive.
//
// Throws ShapeError for non-square input, std::invalid_argument when the
// asymmetry exceeds 1e-10·max(1, max|A|), and EighError (carrying the
// off-diagonal residual) if QL fails to converge within the iteration cap.
EigenDecomp eigh(const Matrix& a);

// U diag(λ) Uᵀ
Matrix reconstruct(const Matrix& eigenvectors, const std::vector<double>& eigenvalues);

}  // namespace gclab
