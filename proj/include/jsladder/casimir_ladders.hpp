#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jsladder/ladder_engine.hpp"
#include "jsladder/schwinger.hpp"
#include "jsladder/sparse_operator.hpp"

namespace jsladder {

// ---------------------------------------------------------------------------
// p†/m† families and τ† operators.

struct LadderFamily {
    int s = 0;
    std::vector<SparseOperator> p_ops;  // k = 0..s
    std::vector<SparseOperator> m_ops;  // k = 1..s

    const SparseOperator& p(int k) const { return p_ops.at(static_cast<std::size_t>(k)); }
    const SparseOperator& m(int k) const { return m_ops.at(static_cast<std::size_t>(k - 1)); }

    /// Operators aligned with build_alpha(s, f).indices.
    const std::vector<SparseOperator>& ops(Family f) const { return f == Family::P ? p_ops : m_ops; }
};

inline LadderFamily build_families(const Su2Generators& gens) {
    const int s = gens.s;
    if (s < 1) throw std::invalid_argument("build_families: spin must be >= 1");
    LadderFamily fam;
    fam.s = s;
    fam.p_ops.push_back(2.0 * creation_op(gens.basis, 0));
    SparseOperator jp_k = SparseOperator::identity(gens.basis);
    SparseOperator jm_k = SparseOperator::identity(gens.basis);
    double norm = 1.0;
    for (int k = 1; k <= s; ++k) {
        jp_k = gens.Jplus * jp_k;
        jm_k = gens.Jminus * jm_k;
        norm *= std::sqrt(static_cast<double>((s + k) * (s - k + 1)));
        const SparseOperator up = creation_op(gens.basis, -k) * jp_k;
        const SparseOperator down = creation_op(gens.basis, k) * jm_k;
        fam.p_ops.push_back((1.0 / norm) * (up + down));
        fam.m_ops.push_back((1.0 / norm) * (up - down));
    }
    return fam;
}

struct TauCertificate {
    ResidualReport casimir;  // [J², τ†] against τ† θ(θ+2ĵ+1)
    ResidualReport j_shift;  // [ĵ, τ†] against θ τ†
};

struct TauOperator {
    int theta = 0;
    Family family = Family::P;
    SparseOperator op;
    JPoly right_function;
    SigmaVector sigma;
    TauCertificate certificate;

    SparseOperator lowering() const { return op.adjoint(); }
};

/// τ†_θ = Σ_k T_k σ_k(ĵ), certified on weight-0 columns at margin 1.
inline TauOperator assemble_tau(const LadderFamily& fam, const SigmaVector& sigma, const Su2Generators& gens,
                                const CasimirSpectrum& spectrum, const SparseOperator& jhat,
                                double tol = default_ladder_tolerance) {
    const auto& ops = fam.ops(sigma.family);
    SparseOperator op = SparseOperator::zero(gens.basis);
    for (std::size_t i = 0; i < sigma.sigmas.size(); ++i) {
        op = op + ops.at(i) * poly_of_jhat(spectrum, sigma.sigmas[i]);
    }
    const JPoly rf = casimir_shift(sigma.theta);
    const Restriction r = Restriction::kernel(1);
    TauCertificate cert;
    // Off the kernel the commutators are generic; their size there is the
    // natural scale when both sides vanish on the kernel (m†_1 at s = 1).
    const Restriction wide = Restriction::interior(1);
    const SparseOperator cj = commutator(jhat, op);
    cert.casimir = check_rlo(gens.J2, op, poly_of_jhat(spectrum, rf), r, tol,
                             restricted_norm(commutator(gens.J2, op), wide));
    cert.j_shift = residual(cj, static_cast<double>(sigma.theta) * op, r, restricted_norm(cj, wide));
    if (cert.casimir.frobenius_relative > tol || cert.j_shift.frobenius_relative > tol) {
        std::ostringstream msg;
        msg << "assemble_tau: theta=" << sigma.theta << " fails certification (J^2 relative "
            << cert.casimir.frobenius_relative << ", j-hat relative " << cert.j_shift.frobenius_relative << ")";
        throw CertificationError(msg.str());
    }
    return {sigma.theta, sigma.family, std::move(op), rf, sigma, cert};
}

/// Everything downstream needs for one (s, n_max): generators, ĵ, families and all τ†_θ.
struct LadderStack {
    Su2Generators gens;
    CasimirSpectrum spectrum;
    SparseOperator jhat;
    LadderFamily family;
    std::vector<TauOperator> taus;  // θ = -s..s

    int spin() const { return gens.s; }
    int n_max() const { return gens.basis->n_max(); }
    const BasisPtr& basis() const { return gens.basis; }
    const TauOperator& tau(int theta) const { return taus.at(static_cast<std::size_t>(theta + gens.s)); }

    SparseOperator of_jhat(const JPoly& p) const { return poly_of_jhat(spectrum, p); }
};

inline LadderStack build_stack(int s, int n_max, double tol = default_ladder_tolerance) {
    BasisPtr basis = make_basis(s, n_max);
    Su2Generators gens = su2_generators(basis);
    CasimirSpectrum spectrum(gens);
    SparseOperator jhat = spectrum.j_hat();
    LadderFamily fam = build_families(gens);
    const AlphaMatrix pa = build_alpha(s, Family::P);
    const AlphaMatrix ma = build_alpha(s, Family::M);
    std::vector<TauOperator> taus;
    for (const RightFunction& rf : right_functions(s)) {
        const SigmaVector sigma = solve_sigma(rf.family == Family::P ? pa : ma, rf.theta);
        taus.push_back(assemble_tau(fam, sigma, gens, spectrum, jhat, tol));
    }
    return {std::move(gens), std::move(spectrum), std::move(jhat), std::move(fam), std::move(taus)};
}

enum class ClosureForm {
    Printed,   // + 2k (m†_k + m†_{k−1}) J_z
    Measured,  // + (p†_{k−1} − 2k m†_k − (2k−1) m†_{k−1}) J_z, m†_0 = 0
};

/// Full closure relation of [J², p†_k] including the J_z terms, as a residual.
/// Only the Measured form holds off the J_z kernel; both agree on it.
inline ResidualReport full_closure_residual(const LadderStack& st, int k, const Restriction& r,
                                            ClosureForm form = ClosureForm::Measured) {
    const int s = st.spin();
    if (k < 0 || k > s) throw std::invalid_argument("full_closure_residual: k outside [0, s]");
    const auto& g = st.gens;
    const auto& fam = st.family;
    const SparseOperator lhs = commutator(g.J2, fam.p(k));
    const double ss = static_cast<double>(s) * (s + 1);
    if (k == 0) return residual(lhs, ss * fam.p(0) + (2.0 * ss) * fam.p(1), r);
    const double lower = static_cast<double>(s + k + 1) * (s - k);
    const SparseOperator id = SparseOperator::identity(g.basis);
    // (ĵ + J_z + 1)(ĵ − J_z) = J² − J_z² − J_z
    const SparseOperator shift = g.J2 - g.Jz * g.Jz - g.Jz - static_cast<double>(k) * (k - 1) * id;
    SparseOperator rhs = (lower - static_cast<double>(k) * (k - 1)) * fam.p(k) + fam.p(k - 1) * shift;
    if (k + 1 <= s) rhs = rhs + lower * fam.p(k + 1);
    SparseOperator jz_coeff = SparseOperator::zero(g.basis);
    if (form == ClosureForm::Printed) {
        jz_coeff = (2.0 * k) * fam.m(k);
        if (k >= 2) jz_coeff = jz_coeff + (2.0 * k) * fam.m(k - 1);
    } else {
        jz_coeff = fam.p(k - 1) - (2.0 * k) * fam.m(k);
        if (k >= 2) jz_coeff = jz_coeff - (2.0 * k - 1.0) * fam.m(k - 1);
    }
    return residual(lhs, rhs + jz_coeff * g.Jz, r);
}

/// Ratio c minimizing ‖a − c·b‖ anchored at the first sizeable entry of b,
/// and the residual of a against c·b.
struct ScaleMatch {
    Complex scale{0.0, 0.0};
    ResidualReport residual;
};

inline ScaleMatch global_scale(const SparseOperator& a, const SparseOperator& b, const Restriction& r) {
    const SparseMatrix& mb = b.matrix();
    double bmax = 0.0;
    for (Eigen::Index row = 0; row < mb.outerSize(); ++row) {
        for (SparseMatrix::InnerIterator it(mb, row); it; ++it) bmax = std::max(bmax, std::abs(it.value()));
    }
    if (bmax == 0.0) throw std::invalid_argument("global_scale: reference operator is zero");
    for (Eigen::Index row = 0; row < mb.outerSize(); ++row) {
        for (SparseMatrix::InnerIterator it(mb, row); it; ++it) {
            if (std::abs(it.value()) > 1e-8 * bmax) {
                const Complex c = a.matrix().coeff(row, it.col()) / it.value();
                return {c, residual(a, c * b, r)};
            }
        }
    }
    throw std::logic_error("global_scale: unreachable");
}

/// Standard normalization of τ†_{±1} at s = 1: p†_0(ĵ+1) + 2p†_1 and p†_0 ĵ − 2p†_1.
inline SparseOperator standard_tau_s1(const LadderStack& st, int theta) {
    if (st.spin() != 1) throw std::invalid_argument("standard_tau_s1: requires s = 1");
    const auto& fam = st.family;
    const SparseOperator id = SparseOperator::identity(st.basis());
    if (theta == 1) return fam.p(0) * (st.jhat + id) + 2.0 * fam.p(1);
    if (theta == -1) return fam.p(0) * st.jhat - 2.0 * fam.p(1);
    throw std::invalid_argument("standard_tau_s1: theta must be +1 or -1");
}

// ---------------------------------------------------------------------------
// Resolvent functions 1/(2ĵ + 2k + 1).

enum class Side { Left, Right };

inline std::string to_string(Side s) { return s == Side::Left ? "left" : "right"; }

inline SparseOperator resolvent(const CasimirSpectrum& spectrum, int k) {
    return spectrum.function([k](int j, SectorKey) { return 1.0 / (2.0 * j + 2.0 * k + 1.0); });
}

/// [R_k, τ†_θ] against (R_k − R_{k−θ}) τ†_θ (left) or τ†_θ (R_{k+θ} − R_k) (right).
inline ResidualReport resolvent_commutator_check(const TauOperator& tau, const CasimirSpectrum& spectrum, int k,
                                                 Side side, const Restriction& r = Restriction::kernel(1)) {
    if (k < 0) throw std::invalid_argument("resolvent_commutator_check: k must be non-negative");
    const SparseOperator rk = resolvent(spectrum, k);
    const SparseOperator lhs = commutator(rk, tau.op);
    // For θ = 0 both sides vanish; measure against the size of R_k τ†.
    const double floor = restricted_norm(rk * tau.op, r);
    if (side == Side::Left) return residual(lhs, (rk - resolvent(spectrum, k - tau.theta)) * tau.op, r, floor);
    return residual(lhs, tau.op * (resolvent(spectrum, k + tau.theta) - rk), r, floor);
}

/// The right-hand form as printed, τ†_θ (R_k − R_{k−θ}); kept for the discrepancy ledger.
inline ResidualReport resolvent_printed_right_residual(const TauOperator& tau, const CasimirSpectrum& spectrum,
                                                       int k, const Restriction& r = Restriction::kernel(1)) {
    const SparseOperator rk = resolvent(spectrum, k);
    return residual(commutator(rk, tau.op), tau.op * (rk - resolvent(spectrum, k - tau.theta)), r,
                    restricted_norm(rk * tau.op, r));
}

// ---------------------------------------------------------------------------
// The (n, j) lattice inside the J_z kernel.

/// Raised when a τ image leaves the node the action scheme predicts.
class SchemeViolation : public CertificationError {
public:
    using CertificationError::CertificationError;
};

struct NodeAction {
    int theta = 0;
    std::optional<double> raise_norm;  // ‖τ†_θ V‖, absent at n = n_max (truncated)
    std::optional<double> raise_min_singular;
    std::optional<double> lower_norm;  // ‖τ_θ V‖, absent at n = 0
    bool raise_annihilates = false;
    bool raise_injective = false;
    bool lower_annihilates = false;
};

struct LatticeNode {
    int n = 0;
    int j = 0;
    int dim = 0;            // from J² diagonalization
    int generated_dim = 0;  // span of τ† words applied to the vacuum
    std::vector<int> reachable_by;
    std::vector<NodeAction> actions;  // one per θ, ascending
    Eigen::MatrixXcd vectors;         // orthonormal columns, full-space coordinates

    const NodeAction& action(int theta) const {
        for (const auto& a : actions) {
            if (a.theta == theta) return a;
        }
        throw std::out_of_range("no action for theta " + std::to_string(theta));
    }
};

struct LatticeArrow {
    int theta = 0;
    bool raising = true;
    int n_from = 0;
    int j_from = 0;
    int n_to = 0;
    int j_to = 0;
    double amplitude = 0.0;
};

struct KernelLatticeReport {
    int spin = 0;
    int n_max = 0;
    double tolerance = 0.0;
    std::vector<LatticeNode> nodes;
    std::vector<LatticeArrow> arrows;

    const LatticeNode* find(int n, int j) const {
        for (const auto& node : nodes) {
            if (node.n == n && node.j == j) return &node;
        }
        return nullptr;
    }
    const LatticeNode& node(int n, int j) const {
        if (const auto* p = find(n, j)) return *p;
        throw std::out_of_range("no lattice node (n=" + std::to_string(n) + ", j=" + std::to_string(j) + ")");
    }
};

namespace detail {

inline Eigen::MatrixXcd apply_to_columns(const SparseOperator& op, const Eigen::MatrixXcd& v) {
    return op.matrix() * v;
}

inline double min_singular(const Eigen::MatrixXcd& m) {
    if (m.cols() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

// Orthonormal basis of the column span, dropping directions below `floor`.
inline Eigen::MatrixXcd column_span(const Eigen::MatrixXcd& m, double floor) {
    if (m.cols() == 0) return Eigen::MatrixXcd(m.rows(), 0);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    const double cut = std::max(floor, 1e-8 * (sv.size() ? sv(0) : 0.0));
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > cut) ++rank;
    return svd.matrixU().leftCols(rank);
}

}  // namespace detail

/// Maps every kernel node through every τ†_θ and τ_θ, checking the
/// arithmetic n' = n ± 1, j' = j ± θ. `rel_tol` scales with each operator's
/// restricted norm to decide what counts as a zero image.
inline KernelLatticeReport lattice_report(const LadderStack& st, double rel_tol = 1e-9) {
    KernelLatticeReport rep;
    rep.spin = st.spin();
    rep.n_max = st.n_max();
    rep.tolerance = rel_tol;
    const auto dim = static_cast<Eigen::Index>(st.basis()->size());

    for (int n = 0; n <= st.n_max(); ++n) {
        std::map<int, std::vector<StateVector>> by_j;
        for (const KernelVector& kv : st.spectrum.kernel(n)) by_j[kv.j].push_back(kv.vector);
        for (auto& [j, vs] : by_j) {
            LatticeNode node;
            node.n = n;
            node.j = j;
            node.dim = static_cast<int>(vs.size());
            node.vectors.resize(dim, static_cast<Eigen::Index>(vs.size()));
            for (std::size_t c = 0; c < vs.size(); ++c) node.vectors.col(static_cast<Eigen::Index>(c)) = vs[c];
            rep.nodes.push_back(std::move(node));
        }
    }

    for (const TauOperator& tau : st.taus) {
        const SparseOperator lower = tau.lowering();
        const double scale = restricted_norm(tau.op, Restriction::interior(std::min(1, st.n_max())));
        const double zero = rel_tol * std::max(scale, 1.0);

        auto check_target = [&](const Eigen::MatrixXcd& image, int n_to, int j_to, const LatticeNode& from,
                                bool raising) {
            const double norm = image.norm();
            if (norm <= zero) return;
            const LatticeNode* target = rep.find(n_to, j_to);
            double outside = norm;
            if (target) outside = (image - target->vectors * (target->vectors.adjoint() * image)).norm();
            if (outside > zero) {
                std::ostringstream msg;
                msg << "lattice: " << (raising ? "tau^dagger_" : "tau_") << tau.theta << " maps node (n=" << from.n
                    << ", j=" << from.j << ") outside (n=" << n_to << ", j=" << j_to << "), stray norm " << outside;
                throw SchemeViolation(msg.str());
            }
            rep.arrows.push_back({tau.theta, raising, from.n, from.j, n_to, j_to, norm});
        };

        for (LatticeNode& node : rep.nodes) {
            NodeAction act;
            act.theta = tau.theta;
            if (node.n < st.n_max()) {
                const Eigen::MatrixXcd img = detail::apply_to_columns(tau.op, node.vectors);
                act.raise_norm = img.norm();
                act.raise_min_singular = detail::min_singular(img);
                act.raise_annihilates = *act.raise_norm <= zero;
                act.raise_injective = *act.raise_min_singular > zero;
                check_target(img, node.n + 1, node.j + tau.theta, node, true);
            }
            if (node.n > 0) {
                const Eigen::MatrixXcd img = detail::apply_to_columns(lower, node.vectors);
                act.lower_norm = img.norm();
                act.lower_annihilates = *act.lower_norm <= zero;
                check_target(img, node.n - 1, node.j - tau.theta, node, false);
            } else {
                act.lower_norm = detail::apply_to_columns(lower, node.vectors).norm();
                act.lower_annihilates = *act.lower_norm <= zero;
            }
            node.actions.push_back(act);
        }
    }

    for (const LatticeArrow& a : rep.arrows) {
        if (!a.raising) continue;
        for (LatticeNode& node : rep.nodes) {
            if (node.n == a.n_to && node.j == a.j_to &&
                std::find(node.reachable_by.begin(), node.reachable_by.end(), a.theta) == node.reachable_by.end()) {
                node.reachable_by.push_back(a.theta);
            }
        }
    }
    for (LatticeNode& node : rep.nodes) std::sort(node.reachable_by.begin(), node.reachable_by.end());

    // Span generated from the vacuum by words in the τ†_θ.
    std::map<std::pair<int, int>, Eigen::MatrixXcd> generated;
    {
        StateVector vac = StateVector::Zero(dim);
        vac(static_cast<Eigen::Index>(*st.basis()->state_index(FockState::vacuum(st.spin())))) = 1.0;
        generated[{0, 0}] = vac;
    }
    for (int n = 0; n < st.n_max(); ++n) {
        std::map<std::pair<int, int>, std::vector<StateVector>> next;
        for (const auto& [key, span] : generated) {
            if (key.first != n) continue;
            for (const TauOperator& tau : st.taus) {
                const double scale = restricted_norm(tau.op, Restriction::interior(std::min(1, st.n_max())));
                const Eigen::MatrixXcd img = detail::apply_to_columns(tau.op, span);
                for (Eigen::Index c = 0; c < img.cols(); ++c) {
                    if (img.col(c).norm() > rel_tol * std::max(scale, 1.0)) {
                        next[{n + 1, key.second + tau.theta}].push_back(img.col(c) / img.col(c).norm());
                    }
                }
            }
        }
        for (auto& [key, vs] : next) {
            Eigen::MatrixXcd m(dim, static_cast<Eigen::Index>(vs.size()));
            for (std::size_t c = 0; c < vs.size(); ++c) m.col(static_cast<Eigen::Index>(c)) = vs[c];
            generated[key] = detail::column_span(m, 1e-9);
        }
    }
    for (LatticeNode& node : rep.nodes) {
        auto it = generated.find({node.n, node.j});
        node.generated_dim = it == generated.end() ? 0 : static_cast<int>(it->second.cols());
    }
    return rep;
}

/// J_z eigenvalues of the irrep generated from `v` by J_±; its size is 2j+1.
inline std::vector<int> irrep_weights(const Su2Generators& gens, const StateVector& v, double tol = 1e-9) {
    std::vector<int> out;
    auto weight_of = [&](const StateVector& x) {
        const Complex w = x.dot(gens.Jz.apply(x)) / x.squaredNorm();
        const StateVector rem = gens.Jz.apply(x) - w * x;
        if (rem.norm() > tol * x.norm() * std::max(1.0, std::abs(w))) {
            throw std::runtime_error("irrep_weights: vector is not a J_z eigenvector");
        }
        return static_cast<int>(std::lround(w.real()));
    };
    out.push_back(weight_of(v));
    for (const SparseOperator* step : {&gens.Jplus, &gens.Jminus}) {
        StateVector x = v;
        while (true) {
            StateVector y = step->apply(x);
            if (y.norm() <= tol * x.norm()) break;
            out.push_back(weight_of(y));
            x = y / y.norm();
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Deformed algebras and the complete-set claim.

struct DeformedAlgebra {
    int omega = 0;
    SparseOperator Lz;
    SparseOperator L2;
};

inline DeformedAlgebra deformed_generators(const TauOperator& tau_minus) {
    if (tau_minus.theta >= 0) throw std::invalid_argument("deformed_generators: expects theta = -omega < 0");
    const SparseOperator& up = tau_minus.op;
    const SparseOperator down = tau_minus.lowering();
    const SparseOperator ud = up * down;
    const SparseOperator du = down * up;
    SparseOperator lz = ud - du;
    SparseOperator l2 = lz * lz + 0.5 * (ud + du);
    return {-tau_minus.theta, std::move(lz), std::move(l2)};
}

/// r = j mod ω for every kernel node; the number of distinct residues.
inline std::map<int, std::vector<std::pair<int, int>>> residue_classes(const KernelLatticeReport& lat, int omega) {
    if (omega < 1) throw std::invalid_argument("residue_classes: omega must be >= 1");
    std::map<int, std::vector<std::pair<int, int>>> out;
    for (const auto& node : lat.nodes) out[node.j % omega].push_back({node.n, node.j});
    return out;
}

struct NodeSeparation {
    int n = 0;
    int j = 0;
    int dim = 0;
    std::vector<int> separating_thetas;  // θ with τ†_θτ_θ simple on the node
    bool separated = false;
};

struct CompleteSetReport {
    struct Entry {
        int theta = 0;
        ResidualReport with_casimir;
        ResidualReport with_jz;
        ResidualReport with_n;
    };
    std::vector<Entry> commutators;
    std::vector<NodeSeparation> separation;  // nodes of dimension >= 2 only
};

inline CompleteSetReport complete_set_check(const LadderStack& st, const KernelLatticeReport& lat,
                                            int margin = 2) {
    CompleteSetReport rep;
    const Restriction r = Restriction::kernel(margin);
    std::vector<SparseOperator> products;
    for (const TauOperator& tau : st.taus) {
        SparseOperator x = tau.op * tau.lowering();
        // Products vanish on j = 0 nodes; bound the relative error by ‖X‖‖Y‖.
        const double xn = restricted_norm(x, r);
        auto against = [&](const SparseOperator& y) {
            return commutation_residual(x, y, r, xn * restricted_norm(y, r));
        };
        rep.commutators.push_back({tau.theta, against(st.gens.J2), against(st.gens.Jz), against(st.gens.Ntot)});
        products.push_back(std::move(x));
    }
    for (const LatticeNode& node : lat.nodes) {
        if (node.dim < 2) continue;
        NodeSeparation sep{node.n, node.j, node.dim, {}, false};
        for (std::size_t t = 0; t < st.taus.size(); ++t) {
            const Eigen::MatrixXcd xv = products[t].matrix() * node.vectors;
            const Eigen::MatrixXcd block = node.vectors.adjoint() * xv;
            const double leak = (xv - node.vectors * block).norm();
            const double scale = std::max(1.0, block.norm());
            if (leak > 1e-8 * std::max(scale, xv.norm())) continue;  // node not invariant
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (block + block.adjoint()));
            const auto& ev = es.eigenvalues();
            double gap = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 1; i < ev.size(); ++i) gap = std::min(gap, ev(i) - ev(i - 1));
            if (gap > 1e-6 * scale) sep.separating_thetas.push_back(st.taus[t].theta);
        }
        sep.separated = !sep.separating_thetas.empty();
        rep.separation.push_back(std::move(sep));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// The s = 1 demo.

struct DemoOperators {
    SparseOperator Adag;
    SparseOperator A;
    SparseOperator Lplus;
    SparseOperator Lminus;
    SparseOperator Lz;
    SparseOperator L2;
};

/// 1/(2√(j+1)) · 1/√(n+j+3) · √(2j+3)/√(2j+1)
inline double demo_a_factor(int n, int j) {
    return 1.0 / (2.0 * std::sqrt(j + 1.0)) / std::sqrt(n + j + 3.0) * std::sqrt(2.0 * j + 3.0) /
           std::sqrt(2.0 * j + 1.0);
}

/// 1/(2√2 √(j+1)) · √(2j+1)/√(2j+3)
inline double demo_l_factor(int j) {
    return 1.0 / (2.0 * std::sqrt(2.0) * std::sqrt(j + 1.0)) * std::sqrt(2.0 * j + 1.0) / std::sqrt(2.0 * j + 3.0);
}

/// A† takes its scalar factor on the right, as printed. L_+ takes it on the
/// left: the printed right placement does not reproduce L_z and L².
inline DemoOperators demo_s1_operators(const LadderStack& st) {
    if (st.spin() != 1) throw std::invalid_argument("demo_s1_operators: requires s = 1");
    const SparseOperator fa = st.spectrum.function([](int j, SectorKey key) { return demo_a_factor(key.n, j); });
    const SparseOperator fl = st.spectrum.function([](int j, SectorKey) { return demo_l_factor(j); });
    SparseOperator adag = standard_tau_s1(st, 1) * fa;
    SparseOperator a = adag.adjoint();
    SparseOperator lp = fl * standard_tau_s1(st, -1);
    SparseOperator lm = lp.adjoint();
    SparseOperator lz = 0.5 * commutator(lp, lm);
    SparseOperator l2 = lz * lz + lz + lm * lp;
    return {std::move(adag), std::move(a), std::move(lp), std::move(lm), std::move(lz), std::move(l2)};
}

/// L_+ with the printed right-hand factor placement.
inline SparseOperator demo_lplus_printed(const LadderStack& st) {
    const SparseOperator fl = st.spectrum.function([](int j, SectorKey) { return demo_l_factor(j); });
    return standard_tau_s1(st, -1) * fl;
}

/// Largest ‖X v − λ(n, j) v‖ over kernel vectors with n <= n_top.
template <class F>
double max_eigen_deviation(const LadderStack& st, const SparseOperator& x, int n_top, F&& expected) {
    double worst = 0.0;
    for (int n = 0; n <= n_top; ++n) {
        for (const KernelVector& kv : st.spectrum.kernel(n)) {
            const StateVector d = x.apply(kv.vector) - expected(n, kv.j) * kv.vector;
            worst = std::max(worst, d.norm());
        }
    }
    return worst;
}

struct CanonicalState {
    int n = 0;
    int j = 0;
    int jz = 0;
    double alpha = 0.0;  // 1 / norm of the unnormalized vector
    StateVector vector;
};

/// |n, j, j_z⟩ ∝ J_±^{|j_z|} (τ†_{−1})^{(n−j)/2} (τ†_1)^{(n+j)/2} |vac⟩ for all n <= n_max.
inline std::vector<CanonicalState> canonical_basis_s1(const LadderStack& st) {
    if (st.spin() != 1) throw std::invalid_argument("canonical_basis_s1: requires s = 1");
    const SparseOperator up = standard_tau_s1(st, 1);
    const SparseOperator down = standard_tau_s1(st, -1);
    const auto dim = static_cast<Eigen::Index>(st.basis()->size());
    StateVector vac = StateVector::Zero(dim);
    vac(static_cast<Eigen::Index>(*st.basis()->state_index(FockState::vacuum(1)))) = 1.0;
    std::vector<CanonicalState> out;
    for (int n = 0; n <= st.n_max(); ++n) {
        for (int j = n % 2; j <= n; j += 2) {
            StateVector base = vac;
            for (int i = 0; i < (n + j) / 2; ++i) base = up.apply(base);
            for (int i = 0; i < (n - j) / 2; ++i) base = down.apply(base);
            for (int jz = -j; jz <= j; ++jz) {
                StateVector v = base;
                const SparseOperator& step = jz > 0 ? st.gens.Jplus : st.gens.Jminus;
                for (int i = 0; i < std::abs(jz); ++i) v = step.apply(v);
                const double norm = v.norm();
                if (!(norm > 1e-12)) {
                    throw std::runtime_error("canonical_basis_s1: zero vector at (n=" + std::to_string(n) +
                                             ", j=" + std::to_string(j) + ", jz=" + std::to_string(jz) + ")");
                }
                v /= norm;
                detail::fix_phase(v);
                out.push_back({n, j, jz, 1.0 / norm, std::move(v)});
            }
        }
    }
    return out;
}

struct TauBarForms {
    SparseOperator bar_up_dag;    // τ̄†_1 = [ĵ, a†_0] + a†_0
    SparseOperator bar_down_dag;  // τ̄†_{−1} = −[ĵ, a†_0] + a†_0
};

inline TauBarForms tau_bar_forms(const LadderStack& st) {
    if (st.spin() != 1) throw std::invalid_argument("tau_bar_forms: requires s = 1");
    const SparseOperator a0dag = creation_op(st.basis(), 0);
    const SparseOperator c = commutator(st.jhat, a0dag);
    return {c + a0dag, a0dag - c};
}

/// Per-node ratio of τ̄†_θ v to τ†_θ v (standard normalization), with the
/// worst deviation from collinearity.
struct NodeRatio {
    int n = 0;
    int j = 0;
    Complex ratio{0.0, 0.0};
    double collinearity_defect = 0.0;
};

inline std::vector<NodeRatio> tau_bar_ratios(const LadderStack& st, const SparseOperator& bar, const SparseOperator& tau) {
    std::vector<NodeRatio> out;
    for (int n = 0; n < st.n_max(); ++n) {
        for (const KernelVector& kv : st.spectrum.kernel(n)) {
            const StateVector u = bar.apply(kv.vector);
            const StateVector w = tau.apply(kv.vector);
            if (w.norm() < 1e-10 && u.norm() < 1e-10) continue;
            NodeRatio r{n, kv.j, {0.0, 0.0}, 0.0};
            if (w.norm() < 1e-10) {
                r.collinearity_defect = u.norm();
            } else {
                r.ratio = w.dot(u) / w.squaredNorm();
                r.collinearity_defect = (u - r.ratio * w).norm() / std::max(u.norm(), 1e-300);
            }
            out.push_back(r);
        }
    }
    return out;
}

}  // namespace jsladder
