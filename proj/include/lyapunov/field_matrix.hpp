#pragma once

// Matrices over the reals, complexes or real quaternions. All three share a
// complex Eigen storage; a quaternion q = a + b j occupies the 2 x 2 complex
// block [[a, b], [-conj(b), conj(a)]], so an r x c quaternion matrix is stored
// as a 2r x 2c complex matrix.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "beta.hpp"

namespace lyap {

using Complex = std::complex<double>;

inline constexpr int embedding_factor(Beta beta) { return beta == Beta::quaternion ? 2 : 1; }

struct FieldMatrix {
    Beta beta = Beta::complex;
    Eigen::MatrixXcd data;

    int rows() const { return static_cast<int>(data.rows()) / embedding_factor(beta); }
    int cols() const { return static_cast<int>(data.cols()) / embedding_factor(beta); }
};

inline FieldMatrix operator*(const FieldMatrix& a, const FieldMatrix& b)
{
    if (a.beta != b.beta) {
        throw std::invalid_argument("field mismatch in matrix product");
    }
    return FieldMatrix{a.beta, a.data * b.data};
}

/// First k columns of the d x d identity.
inline FieldMatrix identity_frame(Beta beta, int d, int k)
{
    const int e = embedding_factor(beta);
    return FieldMatrix{beta, Eigen::MatrixXcd::Identity(e * d, e * k)};
}

/// True when every 2 x 2 block has the form [[a, b], [-conj(b), conj(a)]] exactly.
inline bool has_quaternion_structure(const Eigen::MatrixXcd& m)
{
    if (m.rows() % 2 != 0 || m.cols() % 2 != 0) {
        return false;
    }
    for (Eigen::Index i = 0; i < m.rows(); i += 2) {
        for (Eigen::Index j = 0; j < m.cols(); j += 2) {
            if (m(i + 1, j + 1) != std::conj(m(i, j)) || m(i + 1, j) != -std::conj(m(i, j + 1))) {
                return false;
            }
        }
    }
    return true;
}

/// Replaces every 2 x 2 block by the nearest quaternion block.
inline void enforce_quaternion_structure(Eigen::MatrixXcd& m)
{
    for (Eigen::Index i = 0; i < m.rows(); i += 2) {
        for (Eigen::Index j = 0; j < m.cols(); j += 2) {
            const Complex a = 0.5 * (m(i, j) + std::conj(m(i + 1, j + 1)));
            const Complex b = 0.5 * (m(i, j + 1) - std::conj(m(i + 1, j)));
            m(i, j) = a;
            m(i, j + 1) = b;
            m(i + 1, j) = -std::conj(b);
            m(i + 1, j + 1) = std::conj(a);
        }
    }
}

/// Second embedded column of the quaternion vector whose first embedded column is v.
inline Eigen::VectorXcd quaternion_mate(const Eigen::VectorXcd& v)
{
    Eigen::VectorXcd mate(v.size());
    for (Eigen::Index i = 0; i < v.size(); i += 2) {
        mate(i) = -std::conj(v(i + 1));
        mate(i + 1) = std::conj(v(i));
    }
    return mate;
}

/// Gram-Schmidt orthonormalization of the columns of m in place, over the field
/// of m. Returns the diagonal of the triangular factor, which is real and
/// positive. Each projection is applied twice to keep the frame orthonormal to
/// working precision. For quaternion matrices only the first embedded column of
/// each quaternion column is orthogonalized; its mate is rebuilt from it, so the
/// quaternion structure is exact on return.
inline std::vector<double> orthonormalize_columns(FieldMatrix& m)
{
    auto& q = m.data;
    const bool quaternion = m.beta == Beta::quaternion;
    const int step = embedding_factor(m.beta);
    std::vector<double> r_diag;
    r_diag.reserve(m.cols());
    for (Eigen::Index c = 0; c < q.cols(); c += step) {
        Eigen::VectorXcd v = q.col(c);
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index p = 0; p < c; ++p) {
                v -= q.col(p) * q.col(p).dot(v);
            }
        }
        const double r = v.norm();
        if (!(r > 0.0) || !std::isfinite(r)) {
            throw std::runtime_error("orthonormalize_columns: rank-deficient or non-finite column");
        }
        v /= r;
        if (m.beta == Beta::real) {
            v = v.real().cast<Complex>();
        }
        q.col(c) = v;
        if (quaternion) {
            q.col(c + 1) = quaternion_mate(v);
        }
        r_diag.push_back(r);
    }
    return r_diag;
}

} // namespace lyap
