// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The chanest Authors

#pragma once

#include <Eigen/Dense>

#include <complex>

namespace chanest {

using cplx = std::complex<double>;
using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;
using rvec = Eigen::VectorXd;

inline constexpr double kConditionLimit = 1e12;
inline constexpr double kEigenClip = 1e-12;

cmat hermitian_part(const cmat& a);

bool is_hermitian(const cmat& a, double tol = 1e-10);

// Solves a x = b for Hermitian positive (semi)definite a. When a is worse
// conditioned than kConditionLimit a ridge of 1e-12 * trace / dim is added.
cmat hermitian_solve(const cmat& a, const cmat& b);
cmat hermitian_inverse(const cmat& a);

// Pseudo-inverse of a Hermitian PSD matrix; eigenvalues below
// rel_tol * max eigenvalue are treated as zero.
cmat hermitian_pinv(const cmat& a, double rel_tol = 1e-12);

// Hermitian square root with eigenvalues below kEigenClip (relative to the
// largest) clipped to zero. Throws std::invalid_argument on non-Hermitian input.
cmat psd_sqrt(const cmat& a);

rvec eigenvalues_descending(const cmat& a);

cmat kron(const cmat& a, const cmat& b);

double min_eigenvalue(const cmat& a);

} // namespace chanest
