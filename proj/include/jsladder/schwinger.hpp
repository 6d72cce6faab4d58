#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "jsladder/sparse_operator.hpp"
#include "jsladder/spectral.hpp"

namespace jsladder {

/// Image X̆ = sum_ij x_ij a†_i a_j of a (2s+1)x(2s+1) matrix; rows/columns
/// run over mode weights -s..s.
inline SparseOperator jordan_schwinger(const BasisPtr& basis, const Eigen::MatrixXcd& x) {
    const int s = basis->spin();
    const int m = 2 * s + 1;
    if (x.rows() != m || x.cols() != m) {
        throw std::invalid_argument("jordan_schwinger: expected a " + std::to_string(m) + "x" +
                                    std::to_string(m) + " matrix");
    }
    const auto d = static_cast<Eigen::Index>(basis->size());
    std::vector<Eigen::Triplet<Complex>> triplets;
    for (std::size_t col = 0; col < basis->size(); ++col) {
        const FockState& in = basis->state(col);
        for (int j = 0; j < m; ++j) {
            const int nj = in.occupations()[static_cast<std::size_t>(j)];
            if (nj == 0) continue;
            for (int i = 0; i < m; ++i) {
                const Complex xij = x(i, j);
                if (xij == Complex(0.0)) continue;
                auto lowered = in.shifted(j - s, -1);
                auto out = lowered->shifted(i - s, +1);
                const int ni = lowered->occupations()[static_cast<std::size_t>(i)];
                auto row = basis->state_index(*out);
                if (!row) continue;  // only possible on a fixed-N basis with foreign states
                triplets.emplace_back(static_cast<Eigen::Index>(*row), static_cast<Eigen::Index>(col),
                                      xij * std::sqrt(static_cast<double>(nj) * (ni + 1)));
            }
        }
    }
    SparseMatrix mat(d, d);
    mat.setFromTriplets(triplets.begin(), triplets.end());
    return SparseOperator(basis, std::move(mat));
}

/// Spin-s matrices in the mode order -s..s.
struct SpinMatrices {
    Eigen::MatrixXcd jz;
    Eigen::MatrixXcd jplus;
    Eigen::MatrixXcd jminus;
};

inline SpinMatrices spin_matrices(int s) {
    const int m = 2 * s + 1;
    SpinMatrices out{Eigen::MatrixXcd::Zero(m, m), Eigen::MatrixXcd::Zero(m, m), {}};
    for (int mu = -s; mu <= s; ++mu) out.jz(mu + s, mu + s) = mu;
    for (int mu = -s; mu < s; ++mu) {
        out.jplus(mu + 1 + s, mu + s) = std::sqrt(static_cast<double>((s + mu + 1) * (s - mu)));
    }
    out.jminus = out.jplus.adjoint();
    return out;
}

/// Bosonic su(2) generators for spin s on a truncated Fock space.
struct Su2Generators {
    int s = 0;
    BasisPtr basis;
    SparseOperator Jz;
    SparseOperator Jplus;
    SparseOperator Jminus;
    SparseOperator J2;
    SparseOperator Ntot;
};

inline Su2Generators su2_generators(const BasisPtr& basis) {
    const int s = basis->spin();
    if (s < 1) throw std::invalid_argument("su2_generators: spin must be >= 1");
    const SpinMatrices sm = spin_matrices(s);
    SparseOperator jz = jordan_schwinger(basis, sm.jz);
    SparseOperator jp = jordan_schwinger(basis, sm.jplus);
    SparseOperator jm = jp.adjoint();
    SparseOperator j2 = jz * jz + 0.5 * (jp * jm + jm * jp);
    SparseOperator n = jordan_schwinger(basis, Eigen::MatrixXcd::Identity(2 * s + 1, 2 * s + 1));
    return {s, basis, std::move(jz), std::move(jp), std::move(jm), std::move(j2), std::move(n)};
}

/// Weight-0 eigenvector of J² with its representation label j.
struct KernelVector {
    int n = 0;
    int j = 0;
    StateVector vector;  // full-space coordinates
};

/// J² diagonalized per (N, weight) sector, with each eigenvector labeled by
/// the integer j solving j(j+1) = eigenvalue.
class CasimirSpectrum {
public:
    static constexpr double default_snap_tolerance = 1e-6;

    explicit CasimirSpectrum(const Su2Generators& gens, double snap_tolerance = default_snap_tolerance)
        : spin_(gens.s), decomposition_(decompose(gens.J2)) {
        for (const auto& sector : decomposition_.sectors()) {
            std::vector<int> labels;
            for (Eigen::Index i = 0; i < sector.eigenvalues.size(); ++i) {
                const double x = sector.eigenvalues(i);
                const double j = 0.5 * (std::sqrt(1.0 + 4.0 * std::max(x, 0.0)) - 1.0);
                const double snapped = std::round(j);
                if (x < -snap_tolerance || std::abs(j - snapped) > snap_tolerance) {
                    std::ostringstream msg;
                    msg.precision(12);
                    msg << "j-hat eigenvalue " << j << " (J^2 = " << x << ") in sector "
                        << to_string(sector.key) << " is not within " << snap_tolerance
                        << " of an integer";
                    throw SpectralError(msg.str());
                }
                labels.push_back(static_cast<int>(snapped));
            }
            labels_.push_back(std::move(labels));
        }
        std::vector<SectorEigensystem> relabeled;
        relabeled.reserve(decomposition_.sectors().size());
        for (std::size_t p = 0; p < decomposition_.sectors().size(); ++p) {
            const auto& sector = decomposition_.sectors()[p];
            Eigen::VectorXd j(static_cast<Eigen::Index>(labels_[p].size()));
            for (std::size_t i = 0; i < labels_[p].size(); ++i) j(static_cast<Eigen::Index>(i)) = labels_[p][i];
            relabeled.push_back({sector.key, sector.indices, std::move(j), sector.vectors});
        }
        labeled_ = SpectralDecomposition(decomposition_.basis_ptr(), std::move(relabeled));
    }

    int spin() const { return spin_; }
    const SpectralDecomposition& decomposition() const { return decomposition_; }
    const BasisPtr& basis_ptr() const { return decomposition_.basis_ptr(); }

    /// Integer labels aligned with decomposition().sectors()[i].eigenvalues.
    const std::vector<int>& labels(std::size_t sector_position) const { return labels_.at(sector_position); }

    /// f(ĵ, N) as an operator. F is called as f(j, key) with j the integer
    /// label and key.n the particle number of the sector.
    template <class F>
    SparseOperator function(F&& f) const {
        return labeled_.apply([&](double j, SectorKey key) {
            return Complex(f(static_cast<int>(std::lround(j)), key));
        });
    }

    SparseOperator j_hat() const {
        return function([](int j, SectorKey) { return static_cast<double>(j); });
    }

    /// Orthonormal weight-0 eigenvectors of J² in the n-particle sector,
    /// ordered by j, then by coefficients (descending, real part first).
    std::vector<KernelVector> kernel(int n) const {
        std::vector<KernelVector> out;
        const auto& sectors = decomposition_.sectors();
        const auto dim = static_cast<Eigen::Index>(decomposition_.basis_ptr()->size());
        for (std::size_t p = 0; p < sectors.size(); ++p) {
            const auto& s = sectors[p];
            if (s.key.n != n || s.key.weight != 0) continue;
            for (Eigen::Index c = 0; c < s.vectors.cols(); ++c) {
                StateVector full = StateVector::Zero(dim);
                for (std::size_t r = 0; r < s.indices.size(); ++r) {
                    full(static_cast<Eigen::Index>(s.indices[r])) = s.vectors(static_cast<Eigen::Index>(r), c);
                }
                out.push_back({n, labels_[p][static_cast<std::size_t>(c)], std::move(full)});
            }
        }
        std::stable_sort(out.begin(), out.end(), [](const KernelVector& a, const KernelVector& b) {
            if (a.j != b.j) return a.j < b.j;
            for (Eigen::Index i = 0; i < a.vector.size(); ++i) {
                const Complex x = a.vector(i);
                const Complex y = b.vector(i);
                if (std::abs(x.real() - y.real()) > 1e-12) return x.real() > y.real();
                if (std::abs(x.imag() - y.imag()) > 1e-12) return x.imag() > y.imag();
            }
            return false;
        });
        return out;
    }

private:
    int spin_;
    SpectralDecomposition decomposition_;
    std::vector<std::vector<int>> labels_;
    SpectralDecomposition labeled_{nullptr, {}};  // eigenvalues replaced by j labels
};

inline SparseOperator j_hat(const Su2Generators& gens) { return CasimirSpectrum(gens).j_hat(); }

inline std::vector<KernelVector> jz_kernel(const Su2Generators& gens, int n) {
    if (n < 0 || n > gens.basis->n_max()) {
        throw std::invalid_argument("jz_kernel: n outside [0, n_max]");
    }
    return CasimirSpectrum(gens).kernel(n);
}

}  // namespace jsladder
