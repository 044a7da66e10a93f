#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <stdexcept>

namespace trackfind {

using Vec3 = Eigen::Vector3d;

/// Euclidean distance between two points, micrometers. Coincident points
/// have no direction and are rejected.
template <typename DerivedA, typename DerivedB>
double segment_length(const Eigen::MatrixBase<DerivedA>& a,
                      const Eigen::MatrixBase<DerivedB>& b) {
    const double length = (b.derived() - a.derived()).norm();
    if (!(length > 0.0)) {
        throw std::invalid_argument("degenerate segment: coincident hit positions");
    }
    return length;
}

/// Cosine of the turning angle at `mid` between the incoming step
/// (prev -> mid) and the outgoing step (mid -> next). 1 means the chain
/// continues on a straight line, 0 a right-angle turn. Clamped to [-1, 1]
/// after floating-point evaluation.
template <typename DerivedA, typename DerivedB, typename DerivedC>
double turning_cosine(const Eigen::MatrixBase<DerivedA>& prev,
                      const Eigen::MatrixBase<DerivedB>& mid,
                      const Eigen::MatrixBase<DerivedC>& next) {
    const auto u = (mid.derived() - prev.derived()).eval();
    const auto v = (next.derived() - mid.derived()).eval();
    const double norm_u = u.norm();
    const double norm_v = v.norm();
    if (!(norm_u > 0.0) || !(norm_v > 0.0)) {
        throw std::invalid_argument("degenerate segment: coincident hit positions");
    }
    return std::clamp(u.dot(v) / (norm_u * norm_v), -1.0, 1.0);
}

/// Cost of chaining two segments: -cosine / (length_a + length_b),
/// micrometer^-1. Straighter turns and shorter steps give lower (more
/// negative) values, so minimizing the total favors smooth tracks built
/// from many small segments.
inline double triplet_cost_value(double cosine, double length_a, double length_b) {
    return -cosine / (length_a + length_b);
}

/// Cost of the consecutive segment pair (prev, mid), (mid, next).
template <typename DerivedA, typename DerivedB, typename DerivedC>
double triplet_cost(const Eigen::MatrixBase<DerivedA>& prev,
                    const Eigen::MatrixBase<DerivedB>& mid,
                    const Eigen::MatrixBase<DerivedC>& next) {
    return triplet_cost_value(turning_cosine(prev, mid, next),
                              segment_length(prev, mid),
                              segment_length(mid, next));
}

}  // namespace trackfind
