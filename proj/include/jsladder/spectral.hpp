#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jsladder/sparse_operator.hpp"

namespace jsladder {

/// (N, J_z weight) label of a block of the Fock space.
struct SectorKey {
    int n = 0;
    int weight = 0;
    auto operator<=>(const SectorKey&) const = default;
};

inline std::string to_string(const SectorKey& k) {
    return "(N=" + std::to_string(k.n) + ", weight=" + std::to_string(k.weight) + ")";
}

class SpectralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Eigen-decomposition of one (N, weight) block, in sector-local coordinates.
struct SectorEigensystem {
    SectorKey key;
    std::vector<std::size_t> indices;  // global basis positions, ascending
    Eigen::VectorXd eigenvalues;       // ascending
    Eigen::MatrixXcd vectors;          // columns orthonormal
};

namespace detail {

// Scale a vector so its first non-negligible coordinate is real positive.
inline void fix_phase(Eigen::Ref<Eigen::VectorXcd> v) {
    const double norm = v.norm();
    if (norm == 0.0) return;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > 1e-10 * norm) {
            v *= std::conj(v(i)) / std::abs(v(i));
            v(i) = std::abs(v(i));
            return;
        }
    }
}

inline std::map<SectorKey, std::vector<std::size_t>> group_by_sector(const SectorBasis& basis) {
    std::map<SectorKey, std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        out[{basis.state(i).total(), basis.state(i).weight()}].push_back(i);
    }
    return out;
}

}  // namespace detail

/// Block-wise spectral decomposition of an (N, weight)-conserving hermitian operator.
class SpectralDecomposition {
public:
    SpectralDecomposition(BasisPtr basis, std::vector<SectorEigensystem> sectors)
        : basis_(std::move(basis)), sectors_(std::move(sectors)) {}

    const BasisPtr& basis_ptr() const { return basis_; }
    const std::vector<SectorEigensystem>& sectors() const { return sectors_; }

    const SectorEigensystem& sector(SectorKey key) const {
        for (const auto& s : sectors_) {
            if (s.key == key) return s;
        }
        throw std::out_of_range("no sector " + to_string(key));
    }

    /// Reassemble sum_i f(lambda_i, key) |v_i><v_i| over all sectors.
    ///
    /// F is called as f(eigenvalue, key) and must return a finite value;
    /// anything else (a pole, a negative radicand) is reported with its sector.
    template <class F>
    SparseOperator apply(F&& f) const {
        const auto d = static_cast<Eigen::Index>(basis_->size());
        std::vector<Eigen::Triplet<Complex>> triplets;
        for (const auto& s : sectors_) {
            const auto m = s.eigenvalues.size();
            Eigen::VectorXcd fv(m);
            double fmax = 0.0;
            for (Eigen::Index i = 0; i < m; ++i) {
                const Complex value = f(s.eigenvalues(i), s.key);
                if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
                    std::ostringstream msg;
                    msg << "spectral function undefined at eigenvalue " << s.eigenvalues(i)
                        << " in sector " << to_string(s.key);
                    throw SpectralError(msg.str());
                }
                fv(i) = value;
                fmax = std::max(fmax, std::abs(value));
            }
            if (fmax == 0.0) continue;
            const Eigen::MatrixXcd block = s.vectors * fv.asDiagonal() * s.vectors.adjoint();
            const double cutoff = 1e-15 * fmax;
            for (Eigen::Index r = 0; r < m; ++r) {
                for (Eigen::Index c = 0; c < m; ++c) {
                    if (std::abs(block(r, c)) > cutoff) {
                        triplets.emplace_back(static_cast<Eigen::Index>(s.indices[r]),
                                              static_cast<Eigen::Index>(s.indices[c]), block(r, c));
                    }
                }
            }
        }
        SparseMatrix out(d, d);
        out.setFromTriplets(triplets.begin(), triplets.end());
        return SparseOperator(basis_, std::move(out));
    }

    SparseOperator reassemble() const {
        return apply([](double x, SectorKey) { return Complex(x, 0.0); });
    }

private:
    BasisPtr basis_;
    std::vector<SectorEigensystem> sectors_;
};

/// Verify that h only couples states within one (N, weight) sector.
inline void require_sector_diagonal(const SparseOperator& h) {
    const SectorBasis& basis = h.basis();
    const SparseMatrix& m = h.matrix();
    for (Eigen::Index row = 0; row < m.outerSize(); ++row) {
        const FockState& r = basis.state(static_cast<std::size_t>(row));
        for (SparseMatrix::InnerIterator it(m, row); it; ++it) {
            const FockState& c = basis.state(static_cast<std::size_t>(it.col()));
            if (r.total() != c.total() || r.weight() != c.weight()) {
                throw SpectralError("operator couples sectors " +
                                    to_string(SectorKey{c.total(), c.weight()}) + " -> " +
                                    to_string(SectorKey{r.total(), r.weight()}));
            }
        }
    }
}

inline void require_hermitian(const SparseOperator& h, double tol = 1e-12) {
    const SparseMatrix diff = h.matrix() - SparseMatrix(h.matrix().adjoint());
    double worst = 0.0;
    double scale = 0.0;
    for (Eigen::Index k = 0; k < diff.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
    }
    for (Eigen::Index k = 0; k < h.matrix().outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(h.matrix(), k); it; ++it) scale = std::max(scale, std::abs(it.value()));
    }
    if (worst > tol * std::max(1.0, scale)) {
        throw SpectralError("operator is not hermitian (max |H - H^dagger| = " + std::to_string(worst) + ")");
    }
}

inline SpectralDecomposition decompose(const SparseOperator& h) {
    require_sector_diagonal(h);
    require_hermitian(h);
    const auto groups = detail::group_by_sector(h.basis());
    std::vector<SectorEigensystem> sectors;
    sectors.reserve(groups.size());
    const SparseMatrix& m = h.matrix();
    for (const auto& [key, idx] : groups) {
        const auto k = static_cast<Eigen::Index>(idx.size());
        Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(k, k);
        for (Eigen::Index r = 0; r < k; ++r) {
            for (Eigen::Index c = 0; c < k; ++c) {
                block(r, c) = m.coeff(static_cast<Eigen::Index>(idx[r]), static_cast<Eigen::Index>(idx[c]));
            }
        }
        SectorEigensystem sys{key, idx, {}, {}};
        if (block.imag().isZero(0.0)) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block.real());
            sys.eigenvalues = solver.eigenvalues();
            sys.vectors = solver.eigenvectors().cast<Complex>();
        } else {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(block);
            sys.eigenvalues = solver.eigenvalues();
            sys.vectors = solver.eigenvectors();
        }
        for (Eigen::Index c = 0; c < k; ++c) detail::fix_phase(sys.vectors.col(c));
        sectors.push_back(std::move(sys));
    }
    return SpectralDecomposition(h.basis_ptr(), std::move(sectors));
}

/// f(H) for a hermitian, (N, weight)-block-diagonal H.
template <class F>
SparseOperator spectral_function(const SparseOperator& h, F&& f) {
    return decompose(h).apply([&](double x, SectorKey) { return Complex(f(x)); });
}

}  // namespace jsladder
