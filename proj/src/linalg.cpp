// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The chanest Authors

#include "chanest/linalg.hpp"

#include <algorithm>
#include <stdexcept>

namespace chanest {

cmat hermitian_part(const cmat& a)
{
    return 0.5 * (a + a.adjoint());
}

bool is_hermitian(const cmat& a, double tol)
{
    if (a.rows() != a.cols())
        return false;
    double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

namespace {

// Reciprocal condition estimate from the Cholesky diagonal; cheap and good
// enough to decide whether the ridge is needed.
double llt_rcond(const Eigen::LLT<cmat>& llt)
{
    auto d = llt.matrixLLT().diagonal().real().cwiseAbs();
    double lo = d.minCoeff();
    double hi = d.maxCoeff();
    if (hi <= 0.0)
        return 0.0;
    double r = lo / hi;
    return r * r;
}

} // namespace

cmat hermitian_solve(const cmat& a, const cmat& b)
{
    if (a.rows() != a.cols() || a.rows() != b.rows())
        throw std::invalid_argument("hermitian_solve: dimension mismatch");
    if (a.rows() == 0)
        return cmat(0, b.cols());
    cmat h = hermitian_part(a);
    Eigen::LLT<cmat> llt(h);
    if (llt.info() == Eigen::Success && llt_rcond(llt) >= 1.0 / kConditionLimit)
        return llt.solve(b);
    double ridge = 1e-12 * h.trace().real() / static_cast<double>(h.rows());
    if (!(ridge > 0.0))
        throw std::runtime_error("hermitian_solve: matrix is singular");
    h.diagonal().array() += ridge;
    llt.compute(h);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("hermitian_solve: matrix is not positive semidefinite");
    return llt.solve(b);
}

cmat hermitian_inverse(const cmat& a)
{
    return hermitian_solve(a, cmat::Identity(a.rows(), a.cols()));
}

cmat hermitian_pinv(const cmat& a, double rel_tol)
{
    Eigen::SelfAdjointEigenSolver<cmat> es(hermitian_part(a));
    const rvec& w = es.eigenvalues();
    double top = w.cwiseAbs().maxCoeff();
    rvec inv = rvec::Zero(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i)
        if (w(i) > rel_tol * top)
            inv(i) = 1.0 / w(i);
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
}

cmat psd_sqrt(const cmat& a)
{
    if (!is_hermitian(a, 1e-9))
        throw std::invalid_argument("psd_sqrt: matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<cmat> es(hermitian_part(a));
    rvec w = es.eigenvalues();
    double top = std::max(w.maxCoeff(), 0.0);
    for (Eigen::Index i = 0; i < w.size(); ++i)
        w(i) = w(i) > kEigenClip * top ? std::sqrt(w(i)) : 0.0;
    return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

rvec eigenvalues_descending(const cmat& a)
{
    Eigen::SelfAdjointEigenSolver<cmat> es(hermitian_part(a), Eigen::EigenvaluesOnly);
    rvec w = es.eigenvalues().reverse();
    return w;
}

cmat kron(const cmat& a, const cmat& b)
{
    cmat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

double min_eigenvalue(const cmat& a)
{
    Eigen::SelfAdjointEigenSolver<cmat> es(hermitian_part(a), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

} // namespace chanest
