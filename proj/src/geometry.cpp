#include "riesztool/geometry.hpp"

#include <cstdio>

namespace riesz {

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

AffinePlane::AffinePlane(Vec base, Mat frame, bool strict) : base_(std::move(base)) {
    const int d = static_cast<int>(base_.size());
    const int n = static_cast<int>(frame.cols());
    if (frame.rows() != d) throw std::invalid_argument("AffinePlane: frame/base dimension mismatch");
    if (n < 1 || n > d) throw std::invalid_argument("AffinePlane: need 1 <= n <= d directions");
    if (strict) {
        Mat gram = frame.transpose() * frame;
        if ((gram - Mat::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-10)
            throw std::invalid_argument("AffinePlane: frame not orthonormal (Gram deviation > 1e-10)");
    }
    // Re-orthonormalize so downstream projections are exact to rounding.
    Eigen::HouseholderQR<Mat> qr(frame);
    Mat q = qr.householderQ() * Mat::Identity(d, n);
    // QR may flip signs; align with the input for determinism.
    for (int j = 0; j < n; ++j)
        if (q.col(j).dot(frame.col(j)) < 0.0) q.col(j) = -q.col(j);
    frame_ = q;

    // Complement basis: full QR of the frame, last d-n columns.
    Eigen::HouseholderQR<Mat> full(frame_);
    Mat qfull = full.householderQ();
    normal_ = qfull.rightCols(d - n);
}

double AffinePlane::distance(const Vec& x) const {
    if (normal_.cols() == 0) return 0.0;
    return (normal_.transpose() * (x - base_)).norm();
}

Vec AffinePlane::project(const Vec& x) const {
    Vec rel = x - base_;
    return base_ + frame_ * (frame_.transpose() * rel);
}

Vec AffinePlane::reject_vector(const Vec& v) const {
    return v - frame_ * (frame_.transpose() * v);
}

double AffinePlane::gram_deviation() const {
    const int n = plane_dim();
    return (frame_.transpose() * frame_ - Mat::Identity(n, n)).cwiseAbs().maxCoeff();
}

double principal_angle(const AffinePlane& a, const AffinePlane& b) {
    if (a.plane_dim() != b.plane_dim())
        throw std::invalid_argument("principal_angle: plane dimensions differ");
    Mat m = a.frame().transpose() * b.frame();
    Eigen::JacobiSVD<Mat> svd(m);
    double smin = svd.singularValues().minCoeff();
    smin = std::min(1.0, std::max(-1.0, smin));
    return std::acos(smin);
}

double simplex_volume(const std::vector<Vec>& vertices) {
    if (vertices.size() < 2) throw std::invalid_argument("simplex_volume: need >= 2 vertices");
    const int n = static_cast<int>(vertices.size()) - 1;
    const int d = static_cast<int>(vertices[0].size());
    Mat edges(d, n);
    for (int j = 0; j < n; ++j) edges.col(j) = vertices[j + 1] - vertices[0];
    Mat gram = edges.transpose() * edges;
    double det = gram.determinant();
    if (det < 0.0) det = 0.0;
    double factorial = 1.0;
    for (int k = 2; k <= n; ++k) factorial *= k;
    return std::sqrt(det) / factorial;
}

AffinePlane reference_plane(int n, int d) {
    Mat frame = Mat::Zero(d, n);
    for (int j = 0; j < n; ++j) frame(j, j) = 1.0;
    return AffinePlane(Vec::Zero(d), frame);
}

}  // namespace riesz
