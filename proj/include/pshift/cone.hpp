#pragma once

// Polyhedral preference cones and the dominance order they induce on
// reward vectors. A cone is the set of improvement directions: y is at
// least as good as x when (y - x) lies in the cone.

#include <Eigen/Dense>

#include <cstddef>
#include <limits>
#include <sstream>
#include <string>

#include "pshift/error.hpp"

namespace pshift {

using RewardVector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Absolute tolerance for halfspace tests. Values of a_i . v inside
/// [-kBoundaryTol, kBoundaryTol] count as lying on the boundary.
inline constexpr double kBoundaryTol = 1e-12;

/// Largest accepted condition number of a generator matrix.
inline constexpr double kMaxGeneratorCondition = 1e8;

enum class ConeKind { orthant, simplicial };

inline const char* to_string(ConeKind kind) {
    return kind == ConeKind::orthant ? "orthant" : "simplicial";
}

/// A pointed, full-dimensional simplicial cone {W lambda : lambda >= 0}.
///
/// Stored in both generator form (columns of W) and halfspace form
/// (rows of A = W^-1), so that membership is `A v >= 0`.
/// Immutable after construction.
class Cone {
public:
    /// The nonnegative orthant R^M_+ (W = A = I).
    static Cone orthant(std::size_t dim) {
        if (dim == 0) throw DomainError("cone dimension must be >= 1");
        const auto m = static_cast<Eigen::Index>(dim);
        return Cone(Matrix::Identity(m, m), Matrix::Identity(m, m), ConeKind::orthant);
    }

    /// Builds the cone generated by the columns of `generators`.
    /// Rejects non-square, singular and ill-conditioned matrices.
    static Cone from_generators(const Matrix& generators,
                                double max_condition = kMaxGeneratorCondition) {
        if (generators.rows() == 0 || generators.rows() != generators.cols()) {
            throw DomainError("generator matrix must be square and non-empty");
        }
        if (!generators.allFinite()) throw DomainError("generator matrix has non-finite entries");

        Eigen::JacobiSVD<Matrix> svd(generators);
        const auto& sv = svd.singularValues();
        const double smax = sv(0);
        const double smin = sv(sv.size() - 1);
        if (!(smin > 0.0) || smax / smin > max_condition) {
            std::ostringstream msg;
            msg << "generator matrix is singular or ill-conditioned (condition number "
                << (smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity()) << ")";
            throw DomainError(msg.str());
        }

        const auto m = generators.rows();
        if (generators == Matrix::Identity(m, m)) {
            return Cone(generators, generators, ConeKind::orthant);
        }
        return Cone(generators, generators.inverse(), ConeKind::simplicial);
    }

    std::size_t dim() const noexcept { return static_cast<std::size_t>(generators_.cols()); }
    ConeKind kind() const noexcept { return kind_; }
    bool is_orthant() const noexcept { return kind_ == ConeKind::orthant; }

    /// Columns are the generating rays w_j.
    const Matrix& generators() const noexcept { return generators_; }
    /// Rows are the halfspace normals a_i.
    const Matrix& halfspace_normals() const noexcept { return normals_; }

    bool contains(const RewardVector& v) const {
        check_dim(v);
        return ((normals_ * v).array() >= -kBoundaryTol).all();
    }

    bool strictly_contains(const RewardVector& v) const {
        check_dim(v);
        return ((normals_ * v).array() > kBoundaryTol).all();
    }

    /// Membership through the generator representation: solve W lambda = v
    /// and test lambda >= -tol. Independent of the stored halfspace matrix.
    bool generator_contains(const RewardVector& v, double tol = kBoundaryTol) const {
        check_dim(v);
        const RewardVector lambda = generators_.partialPivLu().solve(v);
        return (lambda.array() >= -tol).all();
    }

    /// (y - x) in cone.
    bool weakly_dominates(const RewardVector& y, const RewardVector& x) const {
        check_pair(y, x);
        return contains(y - x);
    }

    /// Weak dominance with y != x.
    bool dominates(const RewardVector& y, const RewardVector& x) const {
        return weakly_dominates(y, x) && y != x;
    }

    /// (y - x) in the interior of the cone.
    bool strictly_dominates(const RewardVector& y, const RewardVector& x) const {
        check_pair(y, x);
        return strictly_contains(y - x);
    }

    /// True when every generator of `this` lies in `other`, i.e. this is a
    /// subset of other.
    bool is_subcone_of(const Cone& other) const {
        if (other.dim() != dim()) throw DomainError("cone dimension mismatch");
        for (Eigen::Index j = 0; j < generators_.cols(); ++j) {
            if (!other.contains(generators_.col(j))) return false;
        }
        return true;
    }

private:
    Cone(Matrix generators, Matrix normals, ConeKind kind)
        : generators_(std::move(generators)), normals_(std::move(normals)), kind_(kind) {}

    void check_dim(const RewardVector& v) const {
        if (static_cast<std::size_t>(v.size()) != dim()) {
            throw DomainError("vector of dimension " + std::to_string(v.size()) +
                              " used with cone of dimension " + std::to_string(dim()));
        }
    }

    void check_pair(const RewardVector& y, const RewardVector& x) const {
        check_dim(y);
        check_dim(x);
    }

    Matrix generators_;
    Matrix normals_;
    ConeKind kind_;
};

}  // namespace pshift
