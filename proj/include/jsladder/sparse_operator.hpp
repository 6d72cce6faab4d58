#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <json.hpp>

#include "jsladder/fock.hpp"

namespace jsladder {

using Complex = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;
using StateVector = Eigen::VectorXcd;
using BasisPtr = std::shared_ptr<const SectorBasis>;

inline BasisPtr make_basis(int spin, int n_max) {
    return std::make_shared<const SectorBasis>(enumerate_sector(spin, n_max));
}

/// Bound on how far an operator can move total particle number N.
///
/// `excursion` bounds the highest intermediate N reached above the input
/// state's N while the operator (a product of factors) is applied. A
/// truncated product is exact on every input with N <= n_max - excursion.
/// `shift_min`/`shift_max` bound the net change of N.
struct ParticleBudget {
    int excursion = 0;
    int shift_min = 0;
    int shift_max = 0;

    static ParticleBudget conserving() { return {}; }
    static ParticleBudget raising() { return {1, 1, 1}; }
    static ParticleBudget lowering() { return {0, -1, -1}; }

    /// Budget of X * Y (Y acts first).
    friend ParticleBudget product(const ParticleBudget& x, const ParticleBudget& y) {
        return {std::max(y.excursion, y.shift_max + x.excursion), x.shift_min + y.shift_min,
                x.shift_max + y.shift_max};
    }
    friend ParticleBudget join(const ParticleBudget& x, const ParticleBudget& y) {
        return {std::max(x.excursion, y.excursion), std::min(x.shift_min, y.shift_min),
                std::max(x.shift_max, y.shift_max)};
    }
    ParticleBudget adjoint() const {
        return {std::max(excursion - shift_min, std::max(0, -shift_min)), -shift_max, -shift_min};
    }

    bool operator==(const ParticleBudget&) const = default;
};

/// Sparse operator on the span of a SectorBasis.
class SparseOperator {
public:
    SparseOperator(BasisPtr basis, SparseMatrix matrix, ParticleBudget budget = {})
        : basis_(std::move(basis)), m_(std::move(matrix)), budget_(budget) {
        if (!basis_) throw std::invalid_argument("SparseOperator: null basis");
        const auto d = static_cast<Eigen::Index>(basis_->size());
        if (m_.rows() != d || m_.cols() != d) {
            throw std::invalid_argument("SparseOperator: matrix shape does not match basis");
        }
        m_.prune([](Eigen::Index, Eigen::Index, const Complex& v) { return v != Complex(0.0); });
        m_.makeCompressed();
    }

    static SparseOperator zero(BasisPtr basis) {
        const auto d = static_cast<Eigen::Index>(basis->size());
        return SparseOperator(std::move(basis), SparseMatrix(d, d));
    }

    static SparseOperator identity(BasisPtr basis) {
        const auto d = static_cast<Eigen::Index>(basis->size());
        SparseMatrix m(d, d);
        m.setIdentity();
        return SparseOperator(std::move(basis), std::move(m));
    }

    const BasisPtr& basis_ptr() const { return basis_; }
    const SectorBasis& basis() const { return *basis_; }
    const SparseMatrix& matrix() const { return m_; }
    std::size_t dim() const { return basis_->size(); }
    const ParticleBudget& budget() const { return budget_; }
    int particle_budget() const { return budget_.excursion; }

    bool is_zero() const { return m_.nonZeros() == 0; }
    Eigen::Index nonzeros() const { return m_.nonZeros(); }

    Complex coefficient(std::size_t row, std::size_t col) const {
        return m_.coeff(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
    }

    double frobenius_norm() const { return m_.norm(); }

    SparseOperator adjoint() const {
        return SparseOperator(basis_, SparseMatrix(m_.adjoint()), budget_.adjoint());
    }

    StateVector apply(const StateVector& v) const {
        if (v.size() != static_cast<Eigen::Index>(dim())) {
            throw std::invalid_argument("apply: vector length does not match basis");
        }
        return m_ * v;
    }

    SparseOperator with_budget(ParticleBudget b) const { return SparseOperator(basis_, m_, b); }

    friend SparseOperator operator+(const SparseOperator& x, const SparseOperator& y) {
        x.require_same_basis(y);
        return SparseOperator(x.basis_, SparseMatrix(x.m_ + y.m_), join(x.budget_, y.budget_));
    }
    friend SparseOperator operator-(const SparseOperator& x, const SparseOperator& y) {
        x.require_same_basis(y);
        return SparseOperator(x.basis_, SparseMatrix(x.m_ - y.m_), join(x.budget_, y.budget_));
    }
    friend SparseOperator operator-(const SparseOperator& x) {
        return SparseOperator(x.basis_, SparseMatrix(-x.m_), x.budget_);
    }
    friend SparseOperator operator*(const SparseOperator& x, const SparseOperator& y) {
        x.require_same_basis(y);
        return SparseOperator(x.basis_, SparseMatrix(x.m_ * y.m_), product(x.budget_, y.budget_));
    }
    friend SparseOperator operator*(Complex a, const SparseOperator& x) {
        return SparseOperator(x.basis_, SparseMatrix(a * x.m_), x.budget_);
    }
    friend SparseOperator operator*(double a, const SparseOperator& x) {
        return Complex(a, 0.0) * x;
    }
    friend SparseOperator operator*(const SparseOperator& x, double a) { return a * x; }

    void require_same_basis(const SparseOperator& other) const {
        if (basis_ != other.basis_ && !basis_->same_space(*other.basis_)) {
            throw std::invalid_argument("operator basis mismatch");
        }
    }

private:
    BasisPtr basis_;
    SparseMatrix m_;
    ParticleBudget budget_;
};

inline SparseOperator power(const SparseOperator& x, int n) {
    if (n < 0) throw std::invalid_argument("power: negative exponent");
    SparseOperator out = SparseOperator::identity(x.basis_ptr());
    for (int i = 0; i < n; ++i) out = x * out;
    return out;
}

inline SparseOperator commutator(const SparseOperator& x, const SparseOperator& y) {
    return x * y - y * x;
}

namespace detail {

inline void require_mode(const SectorBasis& basis, int mu) {
    if (mu < -basis.spin() || mu > basis.spin()) {
        throw std::invalid_argument("mode weight " + std::to_string(mu) + " outside [-" +
                                    std::to_string(basis.spin()) + ", " +
                                    std::to_string(basis.spin()) + "]");
    }
}

}  // namespace detail

/// a†_mu. Amplitude pushed above the basis cutoff is dropped.
inline SparseOperator creation_op(const BasisPtr& basis, int mu) {
    detail::require_mode(*basis, mu);
    const auto d = static_cast<Eigen::Index>(basis->size());
    std::vector<Eigen::Triplet<Complex>> triplets;
    for (std::size_t col = 0; col < basis->size(); ++col) {
        const FockState& in = basis->state(col);
        auto out = in.shifted(mu, +1);
        if (!out) continue;
        if (auto row = basis->state_index(*out)) {
            triplets.emplace_back(static_cast<Eigen::Index>(*row), static_cast<Eigen::Index>(col),
                                  std::sqrt(static_cast<double>(in.at(mu) + 1)));
        }
    }
    SparseMatrix m(d, d);
    m.setFromTriplets(triplets.begin(), triplets.end());
    return SparseOperator(basis, std::move(m), ParticleBudget::raising());
}

inline SparseOperator annihilation_op(const BasisPtr& basis, int mu) {
    return creation_op(basis, mu).adjoint();
}

inline SparseOperator number_op(const BasisPtr& basis, int mu) {
    detail::require_mode(*basis, mu);
    const auto d = static_cast<Eigen::Index>(basis->size());
    SparseMatrix m(d, d);
    std::vector<Eigen::Triplet<Complex>> triplets;
    for (std::size_t i = 0; i < basis->size(); ++i) {
        const int n = basis->state(i).at(mu);
        if (n) triplets.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i), n);
    }
    m.setFromTriplets(triplets.begin(), triplets.end());
    return SparseOperator(basis, std::move(m));
}

inline SparseOperator total_number_op(const BasisPtr& basis) {
    const auto d = static_cast<Eigen::Index>(basis->size());
    SparseMatrix m(d, d);
    std::vector<Eigen::Triplet<Complex>> triplets;
    for (std::size_t i = 0; i < basis->size(); ++i) {
        const int n = basis->state(i).total();
        if (n) triplets.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i), n);
    }
    m.setFromTriplets(triplets.begin(), triplets.end());
    return SparseOperator(basis, std::move(m));
}

inline StateVector basis_vector(const SectorBasis& basis, const FockState& state) {
    auto idx = basis.state_index(state);
    if (!idx) throw std::invalid_argument("basis_vector: " + to_string(state) + " not in basis");
    StateVector v = StateVector::Zero(static_cast<Eigen::Index>(basis.size()));
    v(static_cast<Eigen::Index>(*idx)) = 1.0;
    return v;
}

class EmptyRestrictionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rows and columns admitted by a residual check: total N <= n_max - margin,
/// and (columns only) an optional fixed J_z weight.
struct Restriction {
    int margin = 0;
    std::optional<int> column_weight;

    static Restriction interior(int margin) { return {margin, std::nullopt}; }
    static Restriction kernel(int margin) { return {margin, 0}; }
};

struct ResidualReport {
    double frobenius_absolute = 0.0;
    double frobenius_relative = 0.0;
    int interior_margin = 0;
};

namespace detail {

struct RestrictionMask {
    std::vector<char> rows;
    std::vector<char> cols;
};

inline RestrictionMask make_mask(const SectorBasis& basis, const Restriction& r) {
    if (r.margin < 0) throw std::invalid_argument("residual: negative margin");
    if (r.margin > basis.n_max()) {
        throw EmptyRestrictionError("residual: margin " + std::to_string(r.margin) +
                                    " exceeds n_max " + std::to_string(basis.n_max()));
    }
    const int top = basis.n_max() - r.margin;
    RestrictionMask mask{std::vector<char>(basis.size(), 0), std::vector<char>(basis.size(), 0)};
    bool any_col = false;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const FockState& s = basis.state(i);
        if (s.total() > top) continue;
        mask.rows[i] = 1;
        if (!r.column_weight || s.weight() == *r.column_weight) {
            mask.cols[i] = 1;
            any_col = true;
        }
    }
    if (!any_col) throw EmptyRestrictionError("residual: restriction selects no columns");
    return mask;
}

inline double restricted_norm(const SparseMatrix& m, const RestrictionMask& mask) {
    double sum = 0.0;
    for (Eigen::Index row = 0; row < m.outerSize(); ++row) {
        if (!mask.rows[static_cast<std::size_t>(row)]) continue;
        for (SparseMatrix::InnerIterator it(m, row); it; ++it) {
            if (mask.cols[static_cast<std::size_t>(it.col())]) sum += std::norm(it.value());
        }
    }
    return std::sqrt(sum);
}

}  // namespace detail

/// Frobenius norm of x restricted as in residual().
inline double restricted_norm(const SparseOperator& x, const Restriction& r) {
    return detail::restricted_norm(x.matrix(), detail::make_mask(x.basis(), r));
}

/// `scale_floor` bounds the relative denominator from below; use it when both
/// sides may legitimately vanish on the restriction (the relative error is then
/// measured against the natural size of the operators involved).
inline ResidualReport residual(const SparseOperator& x, const SparseOperator& y,
                               const Restriction& r, double scale_floor = 0.0) {
    x.require_same_basis(y);
    const auto mask = detail::make_mask(x.basis(), r);
    const SparseMatrix diff = x.matrix() - y.matrix();
    ResidualReport out;
    out.interior_margin = r.margin;
    out.frobenius_absolute = detail::restricted_norm(diff, mask);
    const double scale = std::max({detail::restricted_norm(x.matrix(), mask),
                                   detail::restricted_norm(y.matrix(), mask), scale_floor});
    out.frobenius_relative = scale > 0.0 ? out.frobenius_absolute / scale : out.frobenius_absolute;
    if (out.frobenius_absolute == 0.0) out.frobenius_relative = 0.0;
    return out;
}

inline ResidualReport residual(const SparseOperator& x, const SparseOperator& y, int margin) {
    return residual(x, y, Restriction::interior(margin));
}

/// Residual of XY against YX: zero exactly when X and Y commute on the restriction.
inline ResidualReport commutation_residual(const SparseOperator& x, const SparseOperator& y,
                                           const Restriction& r, double scale_floor = 0.0) {
    return residual(x * y, y * x, r, scale_floor);
}

/// Coordinate-triplet JSON: {rows, cols, dim, entries: [[i, j, re, im], ...]} in row-major order.
inline nlohmann::json operator_to_json(const SparseOperator& op) {
    nlohmann::json entries = nlohmann::json::array();
    const SparseMatrix& m = op.matrix();
    for (Eigen::Index row = 0; row < m.outerSize(); ++row) {
        std::vector<std::pair<Eigen::Index, Complex>> cols;
        for (SparseMatrix::InnerIterator it(m, row); it; ++it) cols.emplace_back(it.col(), it.value());
        std::sort(cols.begin(), cols.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [col, v] : cols) entries.push_back({row, col, v.real(), v.imag()});
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"dim", op.dim()}, {"entries", entries}};
}

inline SparseOperator operator_from_json(const BasisPtr& basis, const nlohmann::json& j) {
    const auto d = static_cast<Eigen::Index>(basis->size());
    if (j.at("dim").get<Eigen::Index>() != d) {
        throw std::invalid_argument("operator_from_json: dimension mismatch");
    }
    std::vector<Eigen::Triplet<Complex>> triplets;
    for (const auto& e : j.at("entries")) {
        triplets.emplace_back(e.at(0).get<Eigen::Index>(), e.at(1).get<Eigen::Index>(),
                              Complex(e.at(2).get<double>(), e.at(3).get<double>()));
    }
    SparseMatrix m(d, d);
    m.setFromTriplets(triplets.begin(), triplets.end());
    return SparseOperator(basis, std::move(m));
}

}  // namespace jsladder
