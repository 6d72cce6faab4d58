#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jsladder/jpoly.hpp"
#include "jsladder/schwinger.hpp"
#include "jsladder/sparse_operator.hpp"

namespace jsladder {

/// A ladder check whose precondition ([H, P] = 0 and friends) does not hold.
class PreconditionError : public std::runtime_error {
public:
    PreconditionError(const std::string& what, double norm)
        : std::runtime_error(what), norm_(norm) {}
    double offending_norm() const { return norm_; }

private:
    double norm_;
};

/// An exact certificate (determinant, row consistency, α verification) failed.
class CertificationError : public std::runtime_error {
public:
    CertificationError(const std::string& what, JPoly witness = {})
        : std::runtime_error(what + (witness.is_zero() ? "" : ": " + witness.to_string())),
          witness_(std::move(witness)) {}
    const JPoly& witness() const { return witness_; }

private:
    JPoly witness_;
};

inline constexpr double default_ladder_tolerance = 1e-8;

namespace detail {

inline void require_commuting(const SparseOperator& x, const SparseOperator& y, const Restriction& r,
                              double tol, const char* what) {
    const ResidualReport rep = commutation_residual(x, y, r);
    if (rep.frobenius_relative > tol) {
        std::ostringstream msg;
        msg << what << " (relative " << rep.frobenius_relative << ", absolute "
            << rep.frobenius_absolute << ")";
        throw PreconditionError(msg.str(), rep.frobenius_absolute);
    }
}

}  // namespace detail

/// [H, p†] against p† P: p† is a right ladder operator of H with right function P.
inline ResidualReport check_rlo(const SparseOperator& h, const SparseOperator& p, const SparseOperator& rf,
                                const Restriction& r, double tol = default_ladder_tolerance,
                                double scale_floor = 0.0) {
    detail::require_commuting(h, rf, r, tol, "check_rlo: right function does not commute with H");
    return residual(commutator(h, p), p * rf, r, scale_floor);
}

/// [p, H] against P p: p is a left ladder operator of H.
inline ResidualReport check_llo(const SparseOperator& h, const SparseOperator& p, const SparseOperator& lf,
                                const Restriction& r, double tol = default_ladder_tolerance) {
    detail::require_commuting(h, lf, r, tol, "check_llo: left function does not commute with H");
    return residual(commutator(p, h), lf * p, r);
}

/// [Hⁿ, p†] against p†((H+P)ⁿ − Hⁿ), the right side expanded binomially
/// (H and P commute), so n = 1 is literally check_rlo.
inline ResidualReport check_power_identity(const SparseOperator& h, const SparseOperator& p,
                                           const SparseOperator& rf, int n, const Restriction& r,
                                           double tol = default_ladder_tolerance) {
    if (n < 1) throw std::invalid_argument("check_power_identity: n must be >= 1");
    detail::require_commuting(h, rf, r, tol, "check_power_identity: right function does not commute with H");
    SparseOperator shift = SparseOperator::zero(h.basis_ptr());
    double binom = 1.0;
    for (int k = 1; k <= n; ++k) {
        binom = binom * (n - k + 1) / k;
        shift = shift + binom * (power(h, n - k) * power(rf, k));
    }
    return residual(commutator(power(h, n), p), p * shift, r);
}

/// [H, p†A] against p†A P, valid when A commutes with H + P.
inline ResidualReport check_rlo_compose(const SparseOperator& h, const SparseOperator& p,
                                        const SparseOperator& rf, const SparseOperator& a,
                                        const Restriction& r, double tol = default_ladder_tolerance) {
    detail::require_commuting(h, rf, r, tol, "check_rlo_compose: right function does not commute with H");
    detail::require_commuting(h + rf, a, r, tol, "check_rlo_compose: A does not commute with H + P");
    const SparseOperator pa = p * a;
    return residual(commutator(h, pa), pa * rf, r);
}

// ---------------------------------------------------------------------------
// Construction: α-matrix, right functions, σ coefficients.

enum class Family { P, M };

inline std::string to_string(Family f) { return f == Family::P ? "P" : "M"; }

/// Family an eigenvalue shift θ belongs to: P when θ ≡ s (mod 2).
inline Family family_of(int s, int theta) { return ((theta - s) % 2 == 0) ? Family::P : Family::M; }

/// Tridiagonal coefficient matrix of [J², T_η] = Σ_μ T_μ α_μη on the J_z kernel.
///
/// Rows/columns are labeled by `indices` (0..s for P, 1..s for M);
/// entries[r][c] is α_{indices[r], indices[c]}.
struct AlphaMatrix {
    Family family = Family::P;
    int spin = 0;
    std::vector<int> indices;
    std::vector<std::vector<JPoly>> entries;

    std::size_t size() const { return indices.size(); }
    int first_index() const { return indices.empty() ? 0 : indices.front(); }

    const JPoly& at(int mu, int eta) const {
        return entries.at(static_cast<std::size_t>(mu - first_index()))
            .at(static_cast<std::size_t>(eta - first_index()));
    }

    bool is_tridiagonal() const {
        for (std::size_t r = 0; r < size(); ++r) {
            for (std::size_t c = 0; c < size(); ++c) {
                const auto gap = r > c ? r - c : c - r;
                if (gap > 1 && !entries[r][c].is_zero()) return false;
            }
        }
        return true;
    }
};

inline AlphaMatrix build_alpha(int s, Family family) {
    if (s < 1) throw std::invalid_argument("build_alpha: spin must be >= 1");
    AlphaMatrix a;
    a.family = family;
    a.spin = s;
    const int lo = family == Family::P ? 0 : 1;
    for (int k = lo; k <= s; ++k) a.indices.push_back(k);
    const auto m = a.indices.size();
    a.entries.assign(m, std::vector<JPoly>(m));
    const JPoly jj = JPoly::variable() * (JPoly::variable() + JPoly::constant(1));
    for (int k = lo; k <= s; ++k) {
        const auto c = static_cast<std::size_t>(k - lo);
        const long long lower = static_cast<long long>(s + k + 1) * (s - k);
        a.entries[c][c] = JPoly::constant(lower - static_cast<long long>(k) * (k - 1));
        if (k + 1 <= s) a.entries[c + 1][c] = JPoly::constant(k == 0 ? 2 * lower : lower);
        if (k - 1 >= lo) a.entries[c - 1][c] = jj - JPoly::constant(static_cast<long long>(k) * (k - 1));
    }
    if (!a.is_tridiagonal()) throw CertificationError("build_alpha: matrix is not tridiagonal");
    return a;
}

/// Determinant of a tridiagonal JPoly matrix by the three-term continuant.
inline JPoly tridiagonal_determinant(const std::vector<std::vector<JPoly>>& m) {
    const std::size_t n = m.size();
    if (n == 0) return JPoly::constant(1);
    JPoly prev = JPoly::constant(1);
    JPoly cur = m[0][0];
    for (std::size_t i = 1; i < n; ++i) {
        JPoly next = m[i][i] * cur - m[i][i - 1] * m[i - 1][i] * prev;
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

/// det(A − θ(θ+2ĵ+1)·I), exact.
inline JPoly shifted_determinant(const AlphaMatrix& a, int theta) {
    auto m = a.entries;
    const JPoly lambda = casimir_shift(theta);
    for (std::size_t i = 0; i < m.size(); ++i) m[i][i] -= lambda;
    return tridiagonal_determinant(m);
}

struct RightFunction {
    int theta = 0;
    Family family = Family::P;
    JPoly poly;
};

/// The 2s+1 eigenvalue shifts θ(θ+2ĵ+1), each certified by an exactly
/// vanishing determinant of its family matrix.
inline std::vector<RightFunction> right_functions(int s) {
    const AlphaMatrix p = build_alpha(s, Family::P);
    const AlphaMatrix m = build_alpha(s, Family::M);
    std::vector<RightFunction> out;
    for (int theta = -s; theta <= s; ++theta) {
        const Family f = family_of(s, theta);
        const JPoly det = shifted_determinant(f == Family::P ? p : m, theta);
        if (!det.is_zero()) {
            throw CertificationError("right_functions: det(A - P) nonzero for s=" + std::to_string(s) +
                                         ", theta=" + std::to_string(theta),
                                     det);
        }
        out.push_back({theta, f, casimir_shift(theta)});
    }
    return out;
}

/// σ^θ_k for k over the family indices, normalized by σ_s = 1.
struct SigmaVector {
    int theta = 0;
    Family family = Family::P;
    int first_index = 0;
    std::vector<JPoly> sigmas;
    JPoly consistency;  // unused top row; zero when the solution is genuine

    const JPoly& sigma(int k) const { return sigmas.at(static_cast<std::size_t>(k - first_index)); }
};

inline SigmaVector solve_sigma(const AlphaMatrix& a, int theta) {
    if (family_of(a.spin, theta) != a.family) {
        throw std::invalid_argument("solve_sigma: theta=" + std::to_string(theta) + " belongs to the " +
                                    to_string(family_of(a.spin, theta)) + " family, matrix is " +
                                    to_string(a.family));
    }
    const JPoly lambda = casimir_shift(theta);
    const std::size_t m = a.size();
    std::vector<JPoly> sigma(m);
    sigma[m - 1] = JPoly::constant(1);
    // Row r fixes σ_{r-1} from σ_r and σ_{r+1}.
    for (std::size_t r = m - 1; r >= 1; --r) {
        JPoly rest = (a.entries[r][r] - lambda) * sigma[r];
        if (r + 1 < m) rest += a.entries[r][r + 1] * sigma[r + 1];
        const JPoly& lead = a.entries[r][r - 1];
        if (!lead.is_constant() || lead.is_zero()) {
            throw CertificationError("solve_sigma: sub-diagonal entry is not a nonzero constant", lead);
        }
        sigma[r - 1] = -rest.divided_by_constant(lead);
    }
    JPoly consistency = (a.entries[0][0] - lambda) * sigma[0];
    if (m > 1) consistency += a.entries[0][1] * sigma[1];
    if (!consistency.is_zero()) {
        throw CertificationError("solve_sigma: consistency row nonzero for s=" + std::to_string(a.spin) +
                                     ", theta=" + std::to_string(theta),
                                 consistency);
    }
    return {theta, a.family, a.first_index(), std::move(sigma), std::move(consistency)};
}

// ---------------------------------------------------------------------------
// Numeric side.

/// poly(ĵ) as an operator.
inline SparseOperator poly_of_jhat(const CasimirSpectrum& spectrum, const JPoly& poly) {
    return spectrum.function([&](int j, SectorKey) { return poly.evaluate(static_cast<double>(j)); });
}

struct AlphaColumnCheck {
    int eta = 0;
    ResidualReport residual;
    bool passed = false;
};

struct AlphaCertificate {
    std::vector<AlphaColumnCheck> columns;
    double worst_relative = 0.0;
};

namespace detail {

// Least-squares coefficients of [J², T_η]v in the span of {T_μ v} on one
// kernel vector; names the μ whose coefficient deviates most from α_μη(j).
inline std::string locate_alpha_mismatch(const AlphaMatrix& a, int eta, const SparseOperator& lhs,
                                         const std::vector<SparseOperator>& ops,
                                         const CasimirSpectrum& spectrum, int n_max) {
    std::string best = "(no kernel node isolates the mismatch)";
    double worst = 0.0;
    for (int n = 0; n < n_max; ++n) {
        for (const KernelVector& kv : spectrum.kernel(n)) {
            Eigen::MatrixXcd cols(kv.vector.size(), static_cast<Eigen::Index>(ops.size()));
            for (std::size_t i = 0; i < ops.size(); ++i) cols.col(static_cast<Eigen::Index>(i)) = ops[i].apply(kv.vector);
            const Eigen::VectorXcd target = lhs.apply(kv.vector);
            Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(cols);
            if (cod.rank() < cols.cols()) continue;  // coefficients not identifiable here
            const Eigen::VectorXcd c = cod.solve(target);
            for (std::size_t i = 0; i < ops.size(); ++i) {
                const int mu = a.indices[i];
                const double expected = a.at(mu, eta).evaluate(static_cast<double>(kv.j));
                const double dev = std::abs(c(static_cast<Eigen::Index>(i)) - expected);
                if (dev > worst) {
                    worst = dev;
                    std::ostringstream msg;
                    msg << "(mu=" << mu << ", eta=" << eta << ") at node (n=" << n << ", j=" << kv.j
                        << "): measured " << c(static_cast<Eigen::Index>(i)).real() << ", expected " << expected;
                    best = msg.str();
                }
            }
        }
    }
    return best;
}

}  // namespace detail

/// Numerically confirm [J², T_η] = Σ_μ T_μ α_μη(ĵ) on weight-0 columns.
///
/// `ops` are the family operators aligned with a.indices. A failing column
/// aborts with the offending (μ, η) pair located by coefficient extraction.
inline AlphaCertificate certify_alpha(const AlphaMatrix& a, const Su2Generators& gens,
                                      const std::vector<SparseOperator>& ops, const CasimirSpectrum& spectrum,
                                      const Restriction& r = Restriction::kernel(1),
                                      double tol = default_ladder_tolerance) {
    if (ops.size() != a.size()) throw std::invalid_argument("certify_alpha: operator count mismatch");
    AlphaCertificate cert;
    for (std::size_t c = 0; c < a.size(); ++c) {
        const int eta = a.indices[c];
        const SparseOperator lhs = commutator(gens.J2, ops[c]);
        SparseOperator rhs = SparseOperator::zero(gens.basis);
        for (std::size_t row = 0; row < a.size(); ++row) {
            if (a.entries[row][c].is_zero()) continue;
            rhs = rhs + ops[row] * poly_of_jhat(spectrum, a.entries[row][c]);
        }
        // m†_k can vanish on the whole kernel (s = 1); measure against its size elsewhere
        const double floor = restricted_norm(lhs, Restriction::interior(r.margin));
        const ResidualReport rep = residual(lhs, rhs, r, floor);
        const bool ok = rep.frobenius_relative <= tol;
        cert.columns.push_back({eta, rep, ok});
        cert.worst_relative = std::max(cert.worst_relative, rep.frobenius_relative);
        if (!ok) {
            std::ostringstream msg;
            msg << "certify_alpha: column eta=" << eta << " of the " << to_string(a.family)
                << " matrix fails (relative " << rep.frobenius_relative << "); worst entry "
                << detail::locate_alpha_mismatch(a, eta, lhs, ops, spectrum, gens.basis->n_max());
            throw CertificationError(msg.str());
        }
    }
    return cert;
}

}  // namespace jsladder
