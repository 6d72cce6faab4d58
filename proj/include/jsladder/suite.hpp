#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <future>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "jsladder/casimir_ladders.hpp"
#include "jsladder/fock.hpp"
#include "jsladder/ladder_engine.hpp"
#include "jsladder/report.hpp"
#include "jsladder/schwinger.hpp"
#include "jsladder/sparse_operator.hpp"

namespace jsladder {

inline constexpr double builtin_default_tolerance = 1e-10;
inline constexpr const char* tolerance_env_var = "JSLADDER_TOLERANCE";

/// Default "equal" tolerance: JSLADDER_TOLERANCE when set, else 1e-10.
inline double default_tolerance_from_env() {
    const char* raw = std::getenv(tolerance_env_var);
    if (!raw || !*raw) return builtin_default_tolerance;
    char* end = nullptr;
    const double v = std::strtod(raw, &end);
    if (end == raw || *end != '\0' || !(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(tolerance_env_var) + " must be a positive number, got '" + raw + "'");
    }
    return v;
}

struct SuiteConfig {
    std::vector<int> spins{1, 2};
    int n_max = 4;
    std::map<std::string, double> tolerance_overrides;
    ReportFormat format = ReportFormat::Json;
    int parallelism = 1;
    double default_tolerance = default_tolerance_from_env();
    bool record_timings = false;

    void validate() const {
        if (spins.empty()) throw std::invalid_argument("SuiteConfig: no spins given");
        for (int s : spins) {
            if (s < 1) throw std::invalid_argument("SuiteConfig: spins must be >= 1, got " + std::to_string(s));
        }
        if (n_max < 1) throw std::invalid_argument("SuiteConfig: n_max must be >= 1");
        if (parallelism < 1) throw std::invalid_argument("SuiteConfig: parallelism must be >= 1");
        if (!(default_tolerance > 0.0)) throw std::invalid_argument("SuiteConfig: default tolerance must be positive");
        for (const auto& [name, tol] : tolerance_overrides) {
            if (!(tol > 0.0)) throw std::invalid_argument("SuiteConfig: tolerance override for " + name + " must be positive");
        }
    }
};

struct CheckSpec {
    const char* name;
    const char* anchor;
    const char* description;
};

/// Every check the suite can emit. The recorder refuses names not listed here.
inline const std::vector<CheckSpec>& check_registry() {
    static const std::vector<CheckSpec> registry = {
        {"fock.dimension_count", "fock-basis", "basis size equals C(n_max+2s+1, 2s+1)"},
        {"fock.sector_partition", "fock-basis", "fixed-N sectors partition the truncated basis"},
        {"fock.index_roundtrip", "fock-basis", "state_index inverts the state list"},
        {"op.weyl_commutator", "weyl-commutator", "[a_mu, a_mu^dagger] = I on the interior, every mode"},
        {"op.mode_independence", "weyl-commutator", "[a_{-1}, a_1^dagger] = 0"},
        {"op.truncation_boundary", "truncation-discipline", "[a_0, a_0^dagger] = I visibly fails at margin 0"},
        {"op.number_ladder", "number-ladder", "[N, a_0^dagger] = a_0^dagger"},
        {"op.adjoint_involution", "hermitian-conjugation", "adjoint(adjoint(X)) = X entry-wise"},
        {"op.jacobi", "jacobi-identity", "Jacobi identity on (J_z, J_+, J_-)"},
        {"su2.homomorphism", "jordan-schwinger-map", "commutators of images equal images of commutators"},
        {"su2.identity_image", "jordan-schwinger-map", "image of the identity is N"},
        {"su2.jz_jplus", "su2-relations", "[J_z, J_+] = J_+"},
        {"su2.jz_jminus", "su2-relations", "[J_z, J_-] = -J_-"},
        {"su2.jplus_jminus", "su2-relations", "[J_+, J_-] = 2 J_z"},
        {"su2.n_central", "su2-relations", "N commutes with J_z, J_+, J_-"},
        {"su2.casimir_central", "casimir-definition", "J^2 commutes with J_z, J_+, J_-, N"},
        {"su2.single_particle", "single-particle-irrep", "one-particle states have J^2 = s(s+1)"},
        {"jhat.defining_identity", "jhat-definition", "j(j+1) = J^2"},
        {"jhat.integer_spectrum", "jhat-definition", "j eigenvalues are integers in [0, n s]"},
        {"jhat.reassembly", "spectral-decomposition", "sector eigensystems reassemble J^2"},
        {"kernel.dimension", "jz-kernel", "kernel size equals the weight-0 sector size"},
        {"alpha.tridiagonal", "alpha-matrix", "alpha matrices are tridiagonal"},
        {"alpha.closure_P", "closure-relation", "[J^2, p_eta^dagger] = sum_mu p_mu^dagger alpha_mu_eta on weight 0"},
        {"alpha.closure_M", "closure-relation", "[J^2, m_eta^dagger] = sum_mu m_mu^dagger alpha_mu_eta on weight 0"},
        {"alpha.full_closure", "closure-relation-full", "[J^2, p_k^dagger] with J_z terms on the whole interior"},
        {"cert.determinant", "determinant-certificate", "det(A - theta(theta+2j+1)) is the zero polynomial"},
        {"cert.determinant_negative", "determinant-certificate", "det nonzero for theta = s+1"},
        {"cert.sigma_consistency", "sigma-recurrence", "unused recurrence row vanishes exactly"},
        {"cert.sigma_degree", "sigma-recurrence", "deg sigma_k <= s-k, equality for theta = +-s"},
        {"cert.sigma_closed_form", "sigma-recurrence", "closed form of sigma_{s-1}"},
        {"rlo.number", "rlo-definition", "a_0^dagger is an RLO of N with right function I"},
        {"rlo.discrimination", "rlo-definition", "a wrong right function is rejected"},
        {"rlo.power_number", "power-identity", "[N^3, a_0^dagger] = a_0^dagger((N+1)^3 - N^3)"},
        {"rlo.power_casimir", "power-identity", "[J^4, tau^dagger] = tau^dagger((J^2+P)^2 - J^4)"},
        {"rlo.compose", "rlo-composition", "tau^dagger f(j) stays an RLO of J^2"},
        {"tau.casimir_ladder", "tau-assembly", "[J^2, tau^dagger] = tau^dagger theta(theta+2j+1)"},
        {"tau.jhat_ladder", "jhat-ladder", "[j, tau^dagger] = theta tau^dagger"},
        {"tau.standard_form", "demo-tau-expressions", "tau^dagger_{+-1} match the printed expressions up to scale"},
        {"resolvent.left", "resolvent-ladder", "[R_k, tau^dagger] = (R_k - R_{k-theta}) tau^dagger"},
        {"resolvent.right", "resolvent-ladder", "[R_k, tau^dagger] = tau^dagger (R_{k+theta} - R_k)"},
        {"lattice.scheme", "action-scheme", "every tau image lands on the predicted (n, j) node"},
        {"lattice.node_dims", "action-scheme", "node dimensions sum to the weight-0 sector size"},
        {"lattice.generated", "action-scheme", "tau words from the vacuum span every node"},
        {"lattice.irrep_dims", "su2-irreps", "J_+- orbit of each node has 2j+1 weights"},
        {"lattice.diagram_s1", "demo-diagram", "s=1 nodes for n <= 3 are (0,0),(1,1),(2,0),(2,2),(3,1),(3,3)"},
        {"kernel.raise_lower_annihilates", "kernel-annihilation", "tau_omega kills the vacuum and j < omega"},
        {"kernel.minus_lower_annihilates", "kernel-annihilation", "tau_{-omega} kills the vacuum and j > ns - omega"},
        {"kernel.minus_raise_annihilates", "kernel-annihilation", "tau^dagger_{-omega} kills j < omega"},
        {"kernel.parity", "kernel-parity", "tau^dagger_omega injective iff omega = s mod 2, else kills n = 1"},
        {"kernel.tau0_preserves_j", "tau-zero", "tau^dagger_0 and tau_0 keep j"},
        {"deformed.hermitian", "deformed-algebra", "L_z^omega and L^2_omega are hermitian"},
        {"deformed.casimir_commute", "deformed-algebra", "L_z^omega, L^2_omega commute with J^2 on weight 0"},
        {"deformed.number_commute", "deformed-algebra", "L_z^omega, L^2_omega commute with N on weight 0"},
        {"deformed.residue_classes", "residue-classes", "j mod omega splits nodes into omega classes"},
        {"complete.commutators", "complete-set", "tau^dagger tau commutes with J^2, J_z, N"},
        {"complete.separation", "complete-set", "tau^dagger tau eigenvalues separate degenerate nodes"},
        {"demo.p0_p0dag", "demo-p-commutators", "[p_0, p_0^dagger] = 4"},
        {"demo.p1_p0dag", "demo-p-commutators", "[p_1, p_0^dagger] = 2(N - N_0)"},
        {"demo.p0_p1dag", "demo-p-commutators", "[p_0, p_1^dagger] = 2(N - N_0)"},
        {"demo.p1_p1dag", "demo-p-commutators", "[p_1, p_1^dagger] printed form on weight 0"},
        {"demo.p1_p1dag_full", "demo-p-commutators", "[p_1, p_1^dagger] = 2J^2 - J_z^2 - 2(N - N_0)"},
        {"demo.m1_kills_kernel", "demo-m1-kernel", "m_1^dagger annihilates the J_z kernel"},
        {"demo.right_functions", "demo-right-functions", "right functions are -2j and 2(j+1)"},
        {"demo.canonical_orthonormal", "demo-canonical-basis", "canonical vectors are orthonormal"},
        {"demo.canonical_eigen", "demo-canonical-basis", "canonical vectors diagonalize N, J^2, J_z"},
        {"demo.canonical_kernel_span", "demo-canonical-basis", "j_z = 0 canonical vectors span the J_z kernel"},
        {"demo.inverse_p0", "demo-inverse-expressions", "p_0^dagger = (tau_1 + tau_-1)/(2j+1)"},
        {"demo.inverse_p1", "demo-inverse-expressions", "p_1^dagger from tau_1, tau_-1"},
        {"demo.jhat_p0", "demo-jhat-p-commutators", "[j, p_0^dagger] = (p_0^dagger + 4 p_1^dagger)/(2j+1)"},
        {"demo.jhat_p1", "demo-jhat-p-commutators", "[j, p_1^dagger] = (p_0^dagger J^2 - p_1^dagger)/(2j+1)"},
        {"demo.weyl_pair", "demo-weyl-pair", "[A, A^dagger] = I on weight 0"},
        {"demo.adag_a_eigen", "demo-weyl-pair", "A^dagger A |n, j> = j |n, j>"},
        {"demo.lz_eigen", "demo-deformed-su2", "L_z |n, j> = ((n-j)/2 - (n+j)/4) |n, j>"},
        {"demo.l2_eigen", "demo-deformed-su2", "L^2 |n, j> = (n+j)/4 ((n+j)/4 + 1) |n, j>"},
        {"demo.tau_bar_rlo", "demo-tau-bar", "tau-bar^dagger_{+-1} are RLOs of J^2"},
        {"demo.tau_bar_llo", "demo-tau-bar", "tau-bar_{+-1} are LLOs of J^2"},
        {"demo.tau_bar_relation", "demo-tau-bar", "tau-bar^dagger = tau^dagger (2j+1)^-1 on weight 0"},
        {"demo.tau_bar_collinear", "demo-tau-bar", "tau-bar and tau images are collinear per node"},
        {"demo.double_commutator", "demo-double-commutator", "[j, [j, a_0^dagger]] = a_0^dagger on weight 0"},
        {"stage.error", "suite", "a pipeline stage aborted"},
    };
    return registry;
}

/// Anchors the registry must cover: one per identity the library claims to verify.
inline const std::vector<std::string>& required_anchors() {
    static const std::vector<std::string> anchors = {
        "fock-basis", "weyl-commutator", "number-ladder", "hermitian-conjugation", "truncation-discipline",
        "jordan-schwinger-map", "su2-relations", "casimir-definition", "jhat-definition", "jz-kernel",
        "spectral-decomposition", "single-particle-irrep", "rlo-definition", "power-identity", "rlo-composition",
        "closure-relation", "closure-relation-full", "alpha-matrix", "determinant-certificate", "sigma-recurrence",
        "tau-assembly", "jhat-ladder", "resolvent-ladder", "complete-set", "action-scheme", "kernel-annihilation",
        "kernel-parity", "tau-zero", "deformed-algebra", "residue-classes", "su2-irreps", "demo-p-commutators",
        "demo-m1-kernel", "demo-right-functions", "demo-tau-expressions", "demo-canonical-basis", "demo-diagram",
        "demo-inverse-expressions", "demo-jhat-p-commutators", "demo-weyl-pair", "demo-deformed-su2",
        "demo-tau-bar", "demo-double-commutator",
    };
    return anchors;
}

inline const CheckSpec* find_check_spec(const std::string& name) {
    for (const auto& spec : check_registry()) {
        if (name == spec.name) return &spec;
    }
    return nullptr;
}

namespace detail {

/// Outcome of one measurement: a residual (relative unless `absolute`) or,
/// for exact certificates, just a verdict.
struct Measured {
    std::optional<double> value;
    bool absolute = false;
    std::string detail;
    std::optional<bool> verdict;  // overrides value <= tolerance when set
};

inline Measured rel(const ResidualReport& r, std::string detail = {}) {
    return {r.frobenius_relative, false, std::move(detail), std::nullopt};
}
inline Measured abs_value(double v, std::string detail = {}) { return {v, true, std::move(detail), std::nullopt}; }
inline Measured verdict(bool ok, std::string detail = {}) { return {std::nullopt, false, std::move(detail), ok}; }

inline std::string fmt(double x) {
    std::ostringstream s;
    s.precision(6);
    s << x;
    return s.str();
}

class Recorder {
public:
    // Sentinel: use the configured default tolerance.
    static constexpr double kDefault = -1.0;

    Recorder(const SuiteConfig& cfg, int spin) : cfg_(cfg), spin_(spin) {}

    CheckParams params(std::optional<int> theta = std::nullopt, std::optional<int> k = std::nullopt,
                       std::optional<int> margin = std::nullopt) const {
        return {spin_, theta, k, margin, cfg_.n_max};
    }

    template <class F>
    void check(const std::string& name, CheckParams p, double spec_tol, F&& f, CheckKind kind = CheckKind::Assert) {
        const CheckSpec* spec = find_check_spec(name);
        if (!spec) throw std::logic_error("suite: check '" + name + "' is not registered");
        double tol = spec_tol == kDefault ? cfg_.default_tolerance : spec_tol;
        if (auto it = cfg_.tolerance_overrides.find(name); it != cfg_.tolerance_overrides.end()) tol = it->second;
        CheckResult r;
        r.name = name;
        r.anchor = spec->anchor;
        r.params = p;
        r.tolerance = tol;
        r.kind = kind;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            Measured m = f();
            r.residual = m.value;
            r.absolute = m.absolute;
            r.detail = std::move(m.detail);
            if (m.verdict) {
                r.passed = *m.verdict;
            } else {
                r.passed = m.value && std::isfinite(*m.value) && *m.value <= tol;
            }
        } catch (const std::exception& e) {
            r.passed = false;
            r.detail = std::string("error: ") + e.what();
        }
        if (cfg_.record_timings) {
            r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        }
        checks.push_back(std::move(r));
    }

    void discrepancy(const std::string& anchor, const std::string& note, CheckParams p,
                     std::optional<double> residual = std::nullopt) {
        discrepancies.push_back({anchor, note, p, residual});
    }

    void stage_error(const std::string& stage, const std::exception& e) {
        check("stage.error", params(), kDefault, [&] { return verdict(false, stage + ": " + e.what()); });
    }

    int spin() const { return spin_; }
    int n_max() const { return cfg_.n_max; }

    std::vector<CheckResult> checks;
    std::vector<Discrepancy> discrepancies;

private:
    const SuiteConfig& cfg_;
    int spin_;
};

// Guards a stage so a hard error becomes a failed check instead of a crash.
template <class F>
void stage(Recorder& rec, const std::string& name, F&& f) {
    try {
        f();
    } catch (const std::exception& e) {
        rec.stage_error(name, e);
    }
}

inline Eigen::MatrixXcd random_hermitian(int m, std::mt19937& rng) {
    std::normal_distribution<double> d(0.0, 1.0);
    Eigen::MatrixXcd x(m, m);
    for (int i = 0; i < m; ++i) {
        for (int k = 0; k < m; ++k) {
            const double re = d(rng);
            const double im = d(rng);
            x(i, k) = Complex(re, im);
        }
    }
    return 0.5 * (x + x.adjoint());
}

// ---------------------------------------------------------------------------
// Stages.

inline void fock_stage(Recorder& rec) {
    const int s = rec.spin();
    const int nm = rec.n_max();
    const SectorBasis full = enumerate_sector(s, nm);
    rec.check("fock.dimension_count", rec.params(), Recorder::kDefault, [&] {
        const auto expected = dimension(s, nm);
        return verdict(full.size() == expected,
                       std::to_string(full.size()) + " states, expected " + std::to_string(expected));
    });
    rec.check("fock.sector_partition", rec.params(), Recorder::kDefault, [&] {
        std::set<FockState> seen;
        std::size_t total = 0;
        for (int n = 0; n <= nm; ++n) {
            for (const auto& st : enumerate_sector(s, nm, n)) {
                if (st.total() != n || !seen.insert(st).second) return verdict(false, "sector " + std::to_string(n) + " invalid");
                ++total;
            }
        }
        bool covers = total == full.size();
        for (const auto& st : full) covers = covers && seen.count(st);
        return verdict(covers, std::to_string(total) + " states across sectors");
    });
    rec.check("fock.index_roundtrip", rec.params(), Recorder::kDefault, [&] {
        for (std::size_t i = 0; i < full.size(); ++i) {
            const auto idx = full.state_index(full.state(i));
            if (!idx || *idx != i) return verdict(false, "round trip broken at " + to_string(full.state(i)));
        }
        return verdict(true);
    });
}

inline void operator_stage(Recorder& rec, const Su2Generators& g) {
    const auto& b = g.basis;
    const int s = rec.spin();
    const SparseOperator id = SparseOperator::identity(b);
    rec.check("op.weyl_commutator", rec.params({}, {}, 1), Recorder::kDefault, [&] {
        double worst = 0.0;
        for (int mu = -s; mu <= s; ++mu) {
            worst = std::max(worst,
                             residual(commutator(annihilation_op(b, mu), creation_op(b, mu)), id, 1).frobenius_relative);
        }
        return Measured{worst, false, "max over all modes", std::nullopt};
    });
    rec.check("op.mode_independence", rec.params({}, {}, 1), Recorder::kDefault, [&] {
        return rel(commutation_residual(annihilation_op(b, -1), creation_op(b, 1), Restriction::interior(1)));
    });
    rec.check("op.truncation_boundary", rec.params({}, {}, 0), Recorder::kDefault, [&] {
        const double r = residual(commutator(annihilation_op(b, 0), creation_op(b, 0)), id, 0).frobenius_relative;
        return verdict(r > 1e-3, "margin-0 relative residual " + fmt(r) + " (nonzero expected)");
    });
    rec.check("op.number_ladder", rec.params({}, {}, 1), Recorder::kDefault, [&] {
        const SparseOperator a0 = creation_op(b, 0);
        return rel(residual(commutator(g.Ntot, a0), a0, 1));
    });
    rec.check("op.adjoint_involution", rec.params(), Recorder::kDefault, [&] {
        double worst = 0.0;
        for (const SparseOperator* x : {&g.Jplus, &g.J2}) {
            worst = std::max(worst, residual(x->adjoint().adjoint(), *x, 0).frobenius_absolute);
        }
        const SparseOperator a = creation_op(b, s);
        worst = std::max(worst, residual(a.adjoint().adjoint(), a, 0).frobenius_absolute);
        return abs_value(worst, "entry-wise, exact");
    });
    rec.check("op.jacobi", rec.params({}, {}, 0), 1e-12, [&] {
        const SparseOperator t1 = commutator(g.Jz, commutator(g.Jplus, g.Jminus));
        const SparseOperator t2 = commutator(g.Jplus, commutator(g.Jminus, g.Jz));
        const SparseOperator t3 = commutator(g.Jminus, commutator(g.Jz, g.Jplus));
        const double scale = std::max({t1.frobenius_norm(), t2.frobenius_norm(), t3.frobenius_norm()});
        return rel(residual(t1 + t2, -t3, Restriction::interior(0), scale));
    });
}

inline void su2_stage(Recorder& rec, const Su2Generators& g, const CasimirSpectrum& cs) {
    const auto& b = g.basis;
    const int s = rec.spin();
    const int m = 2 * s + 1;
    const SparseOperator id = SparseOperator::identity(b);
    rec.check("su2.homomorphism", rec.params({}, {}, 0), 1e-12, [&] {
        std::mt19937 rng(20240611u + static_cast<unsigned>(s));
        double worst = 0.0;
        for (int trial = 0; trial < 3; ++trial) {
            const Eigen::MatrixXcd x = random_hermitian(m, rng);
            const Eigen::MatrixXcd y = random_hermitian(m, rng);
            const Eigen::MatrixXcd xy = x * y - y * x;
            worst = std::max(worst, residual(commutator(jordan_schwinger(b, x), jordan_schwinger(b, y)),
                                             jordan_schwinger(b, xy), 0)
                                        .frobenius_relative);
        }
        return Measured{worst, false, "3 random hermitian pairs", std::nullopt};
    });
    rec.check("su2.identity_image", rec.params({}, {}, 0), 1e-12, [&] {
        return rel(residual(jordan_schwinger(b, Eigen::MatrixXcd::Identity(m, m)), total_number_op(b), 0));
    });
    rec.check("su2.jz_jplus", rec.params({}, {}, 0), 1e-12,
              [&] { return rel(residual(commutator(g.Jz, g.Jplus), g.Jplus, 0)); });
    rec.check("su2.jz_jminus", rec.params({}, {}, 0), 1e-12,
              [&] { return rel(residual(commutator(g.Jz, g.Jminus), -g.Jminus, 0)); });
    rec.check("su2.jplus_jminus", rec.params({}, {}, 0), 1e-12,
              [&] { return rel(residual(commutator(g.Jplus, g.Jminus), 2.0 * g.Jz, 0)); });
    const Restriction all = Restriction::interior(0);
    rec.check("su2.n_central", rec.params({}, {}, 0), 1e-12, [&] {
        double worst = 0.0;
        for (const SparseOperator* x : {&g.Jz, &g.Jplus, &g.Jminus}) {
            worst = std::max(worst, commutation_residual(g.Ntot, *x, all).frobenius_relative);
        }
        return Measured{worst, false, "max over J_z, J_+, J_-", std::nullopt};
    });
    rec.check("su2.casimir_central", rec.params({}, {}, 0), 1e-12, [&] {
        double worst = 0.0;
        for (const SparseOperator* x : {&g.Jz, &g.Jplus, &g.Jminus, &g.Ntot}) {
            worst = std::max(worst, commutation_residual(g.J2, *x, all).frobenius_relative);
        }
        return Measured{worst, false, "max over J_z, J_+, J_-, N", std::nullopt};
    });
    rec.check("su2.single_particle", rec.params(), 1e-12, [&] {
        double worst = 0.0;
        const double c = static_cast<double>(s) * (s + 1);
        for (const FockState& st : enumerate_sector(s, b->n_max(), 1)) {
            const StateVector v = basis_vector(*b, st);
            worst = std::max(worst, (g.J2.apply(v) - c * v).norm());
        }
        return abs_value(worst, "max |J^2 v - s(s+1) v| over one-particle states");
    });
    rec.check("jhat.defining_identity", rec.params({}, {}, 0), 1e-10, [&] {
        const SparseOperator j = cs.j_hat();
        return rel(residual(j * (j + id), g.J2, 0));
    });
    rec.check("jhat.integer_spectrum", rec.params(), 1e-6, [&] {
        double worst = 0.0;
        bool in_range = true;
        for (const auto& sector : cs.decomposition().sectors()) {
            for (Eigen::Index i = 0; i < sector.eigenvalues.size(); ++i) {
                const double x = sector.eigenvalues(i);
                const double j = 0.5 * (std::sqrt(1.0 + 4.0 * std::max(x, 0.0)) - 1.0);
                worst = std::max(worst, std::abs(j - std::round(j)));
                if (std::round(j) < 0 || std::round(j) > sector.key.n * s) in_range = false;
            }
        }
        Measured out = abs_value(worst, in_range ? "all labels in [0, n s]" : "label outside [0, n s]");
        if (!in_range) out.verdict = false;
        return out;
    });
    rec.check("jhat.reassembly", rec.params({}, {}, 0), 1e-10,
              [&] { return rel(residual(cs.decomposition().reassemble(), g.J2, 0)); });
    rec.check("kernel.dimension", rec.params(), Recorder::kDefault, [&] {
        for (int n = 0; n <= b->n_max(); ++n) {
            const auto expected = enumerate_sector(s, b->n_max(), n, 0).size();
            if (cs.kernel(n).size() != expected) {
                return verdict(false, "n=" + std::to_string(n) + ": " + std::to_string(cs.kernel(n).size()) +
                                          " kernel vectors, expected " + std::to_string(expected));
            }
        }
        return verdict(true);
    });
}

inline void alpha_stage(Recorder& rec, const LadderStack& st) {
    const int s = st.spin();
    for (Family f : {Family::P, Family::M}) {
        const AlphaMatrix a = build_alpha(s, f);
        rec.check("alpha.tridiagonal", rec.params(), Recorder::kDefault,
                  [&] { return verdict(a.is_tridiagonal(), to_string(f) + " family"); });
        const std::string name = f == Family::P ? "alpha.closure_P" : "alpha.closure_M";
        for (std::size_t c = 0; c < a.size(); ++c) {
            const int eta = a.indices[c];
            rec.check(name, rec.params({}, eta, 1), 1e-8, [&] {
                const SparseOperator lhs = commutator(st.gens.J2, st.family.ops(f)[c]);
                SparseOperator rhs = SparseOperator::zero(st.basis());
                for (std::size_t r = 0; r < a.size(); ++r) {
                    if (!a.entries[r][c].is_zero()) rhs = rhs + st.family.ops(f)[r] * st.of_jhat(a.entries[r][c]);
                }
                const double floor = restricted_norm(lhs, Restriction::interior(1));
                return rel(residual(lhs, rhs, Restriction::kernel(1), floor));
            });
        }
    }
    for (int k = 0; k <= s; ++k) {
        rec.check("alpha.full_closure", rec.params({}, k, 1), 1e-8,
                  [&] { return rel(full_closure_residual(st, k, Restriction::interior(1), ClosureForm::Measured)); });
        if (k >= 1) {
            const double printed =
                full_closure_residual(st, k, Restriction::interior(1), ClosureForm::Printed).frobenius_relative;
            if (printed > 1e-8) {
                rec.discrepancy("closure-relation-full",
                                "printed J_z term 2k(m_k + m_{k-1})J_z does not hold off the J_z kernel; measured "
                                "coefficient is p_{k-1} - 2k m_k - (2k-1) m_{k-1}",
                                rec.params({}, k, 1), printed);
            }
        }
    }
    if (s >= 2) {
        rec.discrepancy("alpha-matrix",
                        "printed diagonal of P reads s(s+1)-4 at k=1; the closure relation gives (s+2)(s-1) = "
                        "s(s+1)-2, verified numerically",
                        rec.params({}, 1));
    }
}

inline void certificate_stage(Recorder& rec) {
    const int s = rec.spin();
    const AlphaMatrix pa = build_alpha(s, Family::P);
    const AlphaMatrix ma = build_alpha(s, Family::M);
    for (int theta = -s; theta <= s; ++theta) {
        const AlphaMatrix& a = family_of(s, theta) == Family::P ? pa : ma;
        rec.check("cert.determinant", rec.params(theta), Recorder::kDefault, [&] {
            const JPoly det = shifted_determinant(a, theta);
            return verdict(det.is_zero(), to_string(a.family) + " family, det = " + det.to_string());
        });
        rec.check("cert.sigma_consistency", rec.params(theta), Recorder::kDefault, [&] {
            const SigmaVector sv = solve_sigma(a, theta);
            return verdict(sv.consistency.is_zero(), "consistency row = " + sv.consistency.to_string());
        });
        rec.check("cert.sigma_degree", rec.params(theta), Recorder::kDefault, [&] {
            const SigmaVector sv = solve_sigma(a, theta);
            for (int k = sv.first_index; k <= s; ++k) {
                const int deg = sv.sigma(k).degree();
                if (deg > s - k) return verdict(false, "deg sigma_" + std::to_string(k) + " = " + std::to_string(deg));
                if (std::abs(theta) == s && deg != s - k) {
                    return verdict(false, "deg sigma_" + std::to_string(k) + " = " + std::to_string(deg) +
                                              " below s-k at theta = +-s");
                }
            }
            return verdict(true);
        });
        if (s >= 2) {
            rec.check("cert.sigma_closed_form", rec.params(theta), Recorder::kDefault, [&] {
                const SigmaVector sv = solve_sigma(a, theta);
                const JPoly expected = JPoly{Rational(theta * theta + theta + s * s - s, 2 * s), Rational(theta, s)};
                return verdict(sv.sigma(s - 1) == expected,
                               "sigma_{s-1} = " + sv.sigma(s - 1).to_string() + ", closed form " + expected.to_string());
            });
        }
    }
    if (s == 1) {
        rec.discrepancy("sigma-recurrence",
                        "closed form sigma_{s-1} = j theta/s + (theta^2+theta+s^2-s)/(2s) is twice the recurrence "
                        "value at s=1 (the p_0 = 2 a_0 normalization)",
                        rec.params(1));
    }
    rec.check("cert.determinant_negative", rec.params(s + 1), Recorder::kDefault, [&] {
        const JPoly det = shifted_determinant(family_of(s, s + 1) == Family::P ? pa : ma, s + 1);
        return verdict(!det.is_zero(), "det = " + det.to_string());
    });
}

inline void tau_stage(Recorder& rec, const LadderStack& st) {
    const int s = st.spin();
    const auto& g = st.gens;
    const auto& b = st.basis();
    const SparseOperator id = SparseOperator::identity(b);
    const SparseOperator a0 = creation_op(b, 0);
    rec.check("rlo.number", rec.params({}, {}, 1), Recorder::kDefault,
              [&] { return rel(check_rlo(g.Ntot, a0, id, Restriction::interior(1))); });
    rec.check("rlo.discrimination", rec.params({}, {}, 1), Recorder::kDefault, [&] {
        const double r = check_rlo(g.Ntot, a0, 2.0 * id, Restriction::interior(1)).frobenius_relative;
        return verdict(r > 0.1, "wrong right function gives relative residual " + fmt(r));
    });
    rec.check("rlo.power_number", rec.params({}, 3, 1), Recorder::kDefault,
              [&] { return rel(check_power_identity(g.Ntot, a0, id, 3, Restriction::interior(1))); });
    for (const TauOperator& tau : st.taus) {
        const SparseOperator rf = st.of_jhat(tau.right_function);
        const Restriction r = Restriction::kernel(1);
        rec.check("tau.casimir_ladder", rec.params(tau.theta, {}, 1), 1e-8, [&] {
            return rel(check_rlo(g.J2, tau.op, rf, r, 1e-8,
                                 restricted_norm(commutator(g.J2, tau.op), Restriction::interior(1))));
        });
        rec.check("tau.jhat_ladder", rec.params(tau.theta, {}, 1), 1e-8, [&] {
            const SparseOperator c = commutator(st.jhat, tau.op);
            return rel(residual(c, static_cast<double>(tau.theta) * tau.op, r,
                                restricted_norm(c, Restriction::interior(1))));
        });
    }
    const TauOperator& top = st.tau(s);
    const SparseOperator top_rf = st.of_jhat(top.right_function);
    rec.check("rlo.power_casimir", rec.params(s, 2, 1), 1e-8,
              [&] { return rel(check_power_identity(g.J2, top.op, top_rf, 2, Restriction::kernel(1))); });
    rec.check("rlo.compose", rec.params(s, {}, 1), 1e-8, [&] {
        const SparseOperator a = resolvent(st.spectrum, 0) + g.Ntot;
        return rel(check_rlo_compose(g.J2, top.op, top_rf, a, Restriction::kernel(1)));
    });
    if (s == 1) {
        for (int theta : {1, -1}) {
            rec.check("tau.standard_form", rec.params(theta, {}, 0), 1e-10, [&] {
                const ScaleMatch m = global_scale(standard_tau_s1(st, theta), st.tau(theta).op, Restriction::interior(0));
                return rel(m.residual, "global scale " + fmt(m.scale.real()) +
                                           (m.scale.imag() != 0.0 ? " + " + fmt(m.scale.imag()) + "i" : ""));
            });
        }
    }
}

inline void resolvent_stage(Recorder& rec, const LadderStack& st) {
    double printed_worst = 0.0;
    for (const TauOperator& tau : st.taus) {
        for (int k = 0; k <= 2; ++k) {
            rec.check("resolvent.left", rec.params(tau.theta, k, 1), 1e-8,
                      [&] { return rel(resolvent_commutator_check(tau, st.spectrum, k, Side::Left)); });
            rec.check("resolvent.right", rec.params(tau.theta, k, 1), 1e-8,
                      [&] { return rel(resolvent_commutator_check(tau, st.spectrum, k, Side::Right)); });
            if (tau.theta != 0) {
                printed_worst = std::max(printed_worst,
                                         resolvent_printed_right_residual(tau, st.spectrum, k).frobenius_relative);
            }
        }
    }
    if (printed_worst > 1e-8) {
        rec.discrepancy("resolvent-ladder",
                        "printed right form tau (R_k - R_{k-theta}) fails; the right factor must be R_{k+theta} - R_k",
                        rec.params({}, {}, 1), printed_worst);
    }
}

inline void lattice_stage(Recorder& rec, const LadderStack& st) {
    const int s = st.spin();
    const int nm = st.n_max();
    std::optional<KernelLatticeReport> lat;
    rec.check("lattice.scheme", rec.params(), Recorder::kDefault, [&] {
        lat = lattice_report(st);
        return verdict(true, std::to_string(lat->nodes.size()) + " nodes, " + std::to_string(lat->arrows.size()) +
                                 " arrows");
    });
    if (!lat) return;
    rec.check("lattice.node_dims", rec.params(), Recorder::kDefault, [&] {
        for (int n = 0; n <= nm; ++n) {
            int sum = 0;
            for (const auto& node : lat->nodes) sum += node.n == n ? node.dim : 0;
            const auto expected = enumerate_sector(s, nm, n, 0).size();
            if (static_cast<std::size_t>(sum) != expected) {
                return verdict(false, "n=" + std::to_string(n) + ": node dims sum to " + std::to_string(sum));
            }
        }
        return verdict(true);
    });
    rec.check("lattice.generated", rec.params(), Recorder::kDefault, [&] {
        for (const auto& node : lat->nodes) {
            if (node.generated_dim != node.dim) {
                return verdict(false, "node (" + std::to_string(node.n) + "," + std::to_string(node.j) +
                                          "): generated " + std::to_string(node.generated_dim) + " of " +
                                          std::to_string(node.dim));
            }
        }
        return verdict(true);
    });
    rec.check("lattice.irrep_dims", rec.params(), Recorder::kDefault, [&] {
        for (const auto& node : lat->nodes) {
            for (Eigen::Index c = 0; c < node.vectors.cols(); ++c) {
                const auto w = irrep_weights(st.gens, node.vectors.col(c));
                std::vector<int> expected;
                for (int x = -node.j; x <= node.j; ++x) expected.push_back(x);
                if (w != expected) {
                    return verdict(false, "node (" + std::to_string(node.n) + "," + std::to_string(node.j) +
                                              "): orbit of size " + std::to_string(w.size()));
                }
            }
        }
        return verdict(true);
    });
    if (s == 1) {
        rec.check("lattice.diagram_s1", rec.params(), Recorder::kDefault, [&] {
            const std::vector<std::pair<int, int>> expected = {{0, 0}, {1, 1}, {2, 0}, {2, 2}, {3, 1}, {3, 3}};
            std::vector<std::pair<int, int>> got;
            for (const auto& node : lat->nodes) {
                if (node.n > 3) continue;
                if (node.dim != 1) return verdict(false, "node dimension above 1");
                got.push_back({node.n, node.j});
            }
            const auto want = std::vector<std::pair<int, int>>(
                expected.begin(), expected.begin() + std::count_if(expected.begin(), expected.end(),
                                                                   [&](auto p) { return p.first <= nm; }));
            return verdict(got == want, std::to_string(got.size()) + " nodes with n <= 3");
        });
    }

    auto node_name = [](const LatticeNode& node) {
        return "(" + std::to_string(node.n) + "," + std::to_string(node.j) + ")";
    };
    for (int w = 1; w <= s; ++w) {
        rec.check("kernel.raise_lower_annihilates", rec.params(w), Recorder::kDefault, [&] {
            for (const auto& node : lat->nodes) {
                if ((node.n == 0 || node.j < w) && !node.action(w).lower_annihilates) {
                    return verdict(false, "tau_" + std::to_string(w) + " does not annihilate " + node_name(node));
                }
            }
            return verdict(true);
        });
        rec.check("kernel.minus_lower_annihilates", rec.params(-w), Recorder::kDefault, [&] {
            for (const auto& node : lat->nodes) {
                if ((node.n == 0 || node.j > node.n * s - w) && !node.action(-w).lower_annihilates) {
                    return verdict(false, "tau_-" + std::to_string(w) + " does not annihilate " + node_name(node));
                }
            }
            return verdict(true);
        });
        rec.check("kernel.minus_raise_annihilates", rec.params(-w), Recorder::kDefault, [&] {
            for (const auto& node : lat->nodes) {
                if (node.n < nm && node.j < w && !node.action(-w).raise_annihilates) {
                    return verdict(false, "tau^dagger_-" + std::to_string(w) + " does not annihilate " + node_name(node));
                }
            }
            return verdict(true);
        });
        rec.check("kernel.parity", rec.params(w), Recorder::kDefault, [&] {
            const bool same = (w - s) % 2 == 0;
            for (const auto& node : lat->nodes) {
                if (node.n >= nm) continue;
                const auto& act = node.action(w);
                if (same && !act.raise_injective) {
                    return verdict(false, "tau^dagger_" + std::to_string(w) + " has kernel at " + node_name(node));
                }
                if (!same && node.n == 1 && !act.raise_annihilates) {
                    return verdict(false, "tau^dagger_" + std::to_string(w) + " does not annihilate " + node_name(node));
                }
            }
            return verdict(true, same ? "same parity: injective" : "opposite parity: one-particle states killed");
        });
    }
    rec.check("kernel.tau0_preserves_j", rec.params(0), Recorder::kDefault, [&] {
        int count = 0;
        for (const auto& a : lat->arrows) {
            if (a.theta != 0) continue;
            ++count;
            if (a.j_to != a.j_from) return verdict(false, "tau_0 arrow changes j");
        }
        return verdict(true, std::to_string(count) + " theta=0 arrows");
    });

    for (int w = 1; w <= s; ++w) {
        const DeformedAlgebra d = deformed_generators(st.tau(-w));
        rec.check("deformed.hermitian", rec.params(-w, {}, 0), 1e-10, [&] {
            return Measured{std::max(residual(d.Lz, d.Lz.adjoint(), 0).frobenius_relative,
                                     residual(d.L2, d.L2.adjoint(), 0).frobenius_relative),
                            false, "max over L_z, L^2", std::nullopt};
        });
        const Restriction r = Restriction::kernel(1);
        auto commute = [&](const SparseOperator& x, const SparseOperator& y) {
            return commutation_residual(x, y, r, restricted_norm(x, r) * restricted_norm(y, r)).frobenius_relative;
        };
        rec.check("deformed.casimir_commute", rec.params(-w, {}, 1), 1e-8, [&] {
            return Measured{std::max(commute(d.Lz, st.gens.J2), commute(d.L2, st.gens.J2)), false, "", std::nullopt};
        });
        rec.check("deformed.number_commute", rec.params(-w, {}, 1), 1e-8, [&] {
            return Measured{std::max(commute(d.Lz, st.gens.Ntot), commute(d.L2, st.gens.Ntot)), false, "",
                            std::nullopt};
        });
        rec.check(
            "deformed.residue_classes", rec.params(-w), Recorder::kDefault,
            [&] {
                const auto classes = residue_classes(*lat, w);
                return verdict(static_cast<int>(classes.size()) == w,
                               std::to_string(classes.size()) + " classes of j mod " + std::to_string(w));
            },
            CheckKind::Report);
    }

    const CompleteSetReport cs = complete_set_check(st, *lat);
    for (const auto& e : cs.commutators) {
        rec.check("complete.commutators", rec.params(e.theta, {}, 2), 1e-8, [&] {
            return Measured{std::max({e.with_casimir.frobenius_relative, e.with_jz.frobenius_relative,
                                      e.with_n.frobenius_relative}),
                            false, "max over J^2, J_z, N", std::nullopt};
        });
    }
    for (const auto& sep : cs.separation) {
        rec.check(
            "complete.separation", rec.params(), Recorder::kDefault,
            [&] {
                std::string thetas;
                for (int t : sep.separating_thetas) thetas += (thetas.empty() ? "" : " ") + std::to_string(t);
                return verdict(sep.separated, "node (" + std::to_string(sep.n) + "," + std::to_string(sep.j) +
                                                  ") dim " + std::to_string(sep.dim) + ", separated by theta {" +
                                                  thetas + "}");
            },
            CheckKind::Report);
    }
}

inline void demo_stage(Recorder& rec, const LadderStack& st) {
    const auto& g = st.gens;
    const auto& b = st.basis();
    const auto& fam = st.family;
    const int nm = st.n_max();
    const SparseOperator id = SparseOperator::identity(b);
    const SparseOperator n0 = number_op(b, 0);
    const SparseOperator p0 = fam.p(0);
    const SparseOperator p1 = fam.p(1);
    const Restriction in1 = Restriction::interior(1);
    const Restriction k1 = Restriction::kernel(1);

    rec.check("demo.p0_p0dag", rec.params({}, {}, 1), Recorder::kDefault,
              [&] { return rel(residual(commutator(p0.adjoint(), p0), 4.0 * id, in1)); });
    rec.check("demo.p1_p0dag", rec.params({}, {}, 1), Recorder::kDefault,
              [&] { return rel(residual(commutator(p1.adjoint(), p0), 2.0 * (g.Ntot - n0), in1)); });
    rec.check("demo.p0_p1dag", rec.params({}, {}, 1), Recorder::kDefault,
              [&] { return rel(residual(commutator(p0.adjoint(), p1), 2.0 * (g.Ntot - n0), in1)); });
    const SparseOperator printed_p11 =
        2.0 * g.J2 - g.Jz * (2.0 * g.Jz + id) + (g.Ntot - n0) * (g.Jz - 2.0 * id);
    const SparseOperator p11 = commutator(p1.adjoint(), p1);
    rec.check("demo.p1_p1dag", rec.params({}, {}, 1), Recorder::kDefault,
              [&] { return rel(residual(p11, printed_p11, k1)); });
    rec.check("demo.p1_p1dag_full", rec.params({}, {}, 1), Recorder::kDefault,
              [&] { return rel(residual(p11, 2.0 * g.J2 - g.Jz * g.Jz - 2.0 * (g.Ntot - n0), in1)); });
    {
        const double full = residual(p11, printed_p11, in1).frobenius_relative;
        if (full > 1e-8) {
            rec.discrepancy("demo-p-commutators",
                            "printed [p_1, p_1^dagger] holds on weight-0 columns only; on the whole interior it is "
                            "2J^2 - J_z^2 - 2(N - N_0)",
                            rec.params({}, {}, 1), full);
        }
    }
    rec.check("demo.m1_kills_kernel", rec.params({}, {}, 1), Recorder::kDefault, [&] {
        const double on_kernel = restricted_norm(fam.m(1), k1);
        const double overall = restricted_norm(fam.m(1), in1);
        return abs_value(on_kernel / overall, "‖m_1 on weight 0‖ / ‖m_1‖");
    });
    rec.check("demo.right_functions", rec.params(), Recorder::kDefault, [&] {
        const auto rf = right_functions(1);
        const JPoly minus = JPoly{Rational(0), Rational(-2)};
        const JPoly plus = JPoly{Rational(2), Rational(2)};
        bool ok = false;
        for (const auto& r : rf) {
            if (r.theta == -1) ok = r.poly == minus;
        }
        for (const auto& r : rf) {
            if (r.theta == 1) ok = ok && r.poly == plus;
        }
        return verdict(ok, "theta=-1: " + rf[0].poly.to_string() + ", theta=1: " + rf[2].poly.to_string());
    });

    const SparseOperator up = standard_tau_s1(st, 1);
    const SparseOperator down = standard_tau_s1(st, -1);
    {
        const SparseOperator c = commutator(up, down);
        const double r = residual(commutator(st.jhat, c), 2.0 * c, k1).frobenius_relative;
        if (r > 1e-8) {
            rec.discrepancy("demo-tau-expressions",
                            "[j, [tau_1, tau_-1]] = 2[tau_1, tau_-1] does not hold on weight 0; the commutator "
                            "keeps j (it commutes with j-hat there)",
                            rec.params({}, {}, 1), r);
        }
    }

    const auto canon = canonical_basis_s1(st);
    rec.check("demo.canonical_orthonormal", rec.params(), 1e-8, [&] {
        Eigen::MatrixXcd m(static_cast<Eigen::Index>(b->size()), static_cast<Eigen::Index>(canon.size()));
        for (std::size_t i = 0; i < canon.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = canon[i].vector;
        const Eigen::MatrixXcd gram = m.adjoint() * m;
        return abs_value((gram - Eigen::MatrixXcd::Identity(gram.rows(), gram.cols())).norm(),
                         std::to_string(canon.size()) + " vectors");
    });
    rec.check("demo.canonical_eigen", rec.params(), 1e-8, [&] {
        double worst = 0.0;
        for (const auto& c : canon) {
            worst = std::max(worst, (g.Ntot.apply(c.vector) - static_cast<double>(c.n) * c.vector).norm());
            worst = std::max(worst, (g.J2.apply(c.vector) - static_cast<double>(c.j) * (c.j + 1) * c.vector).norm());
            worst = std::max(worst, (g.Jz.apply(c.vector) - static_cast<double>(c.jz) * c.vector).norm());
        }
        return abs_value(worst, "max eigen-equation defect over N, J^2, J_z");
    });
    rec.check("demo.canonical_kernel_span", rec.params(), 1e-8, [&] {
        double worst = 0.0;
        for (int n = 0; n <= nm; ++n) {
            for (const KernelVector& kv : st.spectrum.kernel(n)) {
                StateVector proj = StateVector::Zero(kv.vector.size());
                for (const auto& c : canon) {
                    if (c.n == n && c.jz == 0) proj += c.vector * c.vector.dot(kv.vector);
                }
                worst = std::max(worst, (kv.vector - proj).norm());
            }
        }
        return abs_value(worst, "kernel vectors outside the canonical span");
    });

    const SparseOperator inv = st.spectrum.function([](int j, SectorKey) { return 1.0 / (2.0 * j + 1.0); });
    rec.check("demo.inverse_p0", rec.params({}, {}, 1), Recorder::kDefault,
              [&] { return rel(residual(p0, (up + down) * inv, in1)); });
    rec.check("demo.inverse_p1", rec.params({}, {}, 1), Recorder::kDefault,
              [&] { return rel(residual(p1, 0.25 * ((up - down) - (up + down) * inv), in1)); });
    rec.check("demo.jhat_p0", rec.params({}, {}, 1), 1e-8,
              [&] { return rel(residual(commutator(st.jhat, p0), (p0 + 4.0 * p1) * inv, k1)); });
    rec.check("demo.jhat_p1", rec.params({}, {}, 1), 1e-8,
              [&] { return rel(residual(commutator(st.jhat, p1), (p0 * g.J2 - p1) * inv, k1)); });

    const DemoOperators d = demo_s1_operators(st);
    rec.check("demo.weyl_pair", rec.params({}, {}, 1), 1e-8,
              [&] { return rel(residual(commutator(d.A, d.Adag), id, k1)); });
    rec.check("demo.adag_a_eigen", rec.params({}, {}, 1), 1e-8, [&] {
        return abs_value(max_eigen_deviation(st, d.Adag * d.A, nm - 1, [](int, int j) { return double(j); }));
    });
    auto lz_expected = [](int n, int j) { return (n - j) / 2.0 - (n + j) / 4.0; };
    auto l2_expected = [](int n, int j) {
        const double x = (n + j) / 4.0;
        return x * (x + 1.0);
    };
    rec.check("demo.lz_eigen", rec.params({}, {}, 1), 1e-8,
              [&] { return abs_value(max_eigen_deviation(st, d.Lz, nm - 1, lz_expected)); });
    rec.check("demo.l2_eigen", rec.params({}, {}, 1), 1e-8,
              [&] { return abs_value(max_eigen_deviation(st, d.L2, nm - 1, l2_expected)); });
    {
        const SparseOperator lp = demo_lplus_printed(st);
        const SparseOperator lz = 0.5 * commutator(lp, lp.adjoint());
        const double dev = max_eigen_deviation(st, lz, nm - 1, lz_expected);
        if (dev > 1e-8) {
            rec.discrepancy("demo-deformed-su2",
                            "L_+ with its scalar factor on the right does not give the stated L_z spectrum; the "
                            "same factor on the left does",
                            rec.params({}, {}, 1), dev);
        }
    }

    const TauBarForms bar = tau_bar_forms(st);
    const SparseOperator plus_rf = st.of_jhat(casimir_shift(1));
    const SparseOperator minus_rf = st.of_jhat(casimir_shift(-1));
    rec.check("demo.tau_bar_rlo", rec.params(1, {}, 1), 1e-8,
              [&] { return rel(check_rlo(g.J2, bar.bar_up_dag, plus_rf, k1)); });
    rec.check("demo.tau_bar_rlo", rec.params(-1, {}, 1), 1e-8,
              [&] { return rel(check_rlo(g.J2, bar.bar_down_dag, minus_rf, k1)); });
    rec.check("demo.tau_bar_llo", rec.params(1, {}, 1), 1e-8,
              [&] { return rel(check_llo(g.J2, bar.bar_up_dag.adjoint(), plus_rf, k1)); });
    rec.check("demo.tau_bar_llo", rec.params(-1, {}, 1), 1e-8,
              [&] { return rel(check_llo(g.J2, bar.bar_down_dag.adjoint(), minus_rf, k1)); });
    rec.check("demo.tau_bar_relation", rec.params(1, {}, 1), 1e-8,
              [&] { return rel(residual(bar.bar_up_dag, up * inv, k1)); });
    rec.check("demo.tau_bar_relation", rec.params(-1, {}, 1), 1e-8,
              [&] { return rel(residual(bar.bar_down_dag, down * inv, k1)); });
    for (int theta : {1, -1}) {
        rec.check(
            "demo.tau_bar_collinear", rec.params(theta, {}, 1), 1e-8,
            [&] {
                double worst = 0.0;
                const auto ratios = tau_bar_ratios(st, theta == 1 ? bar.bar_up_dag : bar.bar_down_dag,
                                                   theta == 1 ? up : down);
                for (const auto& r : ratios) worst = std::max(worst, r.collinearity_defect);
                return abs_value(worst, std::to_string(ratios.size()) + " nodes");
            },
            CheckKind::Report);
    }
    rec.check("demo.double_commutator", rec.params({}, {}, 1), 1e-8, [&] {
        const SparseOperator a0 = creation_op(b, 0);
        return rel(residual(commutator(st.jhat, commutator(st.jhat, a0)), a0, k1));
    });
}

struct SpinOutcome {
    std::vector<CheckResult> checks;
    std::vector<Discrepancy> discrepancies;
};

inline SpinOutcome run_spin(const SuiteConfig& cfg, int s) {
    Recorder rec(cfg, s);
    stage(rec, "fock", [&] { fock_stage(rec); });
    std::optional<LadderStack> st;
    stage(rec, "generators", [&] {
        BasisPtr basis = make_basis(s, cfg.n_max);
        Su2Generators gens = su2_generators(basis);
        CasimirSpectrum cs(gens);
        operator_stage(rec, gens);
        su2_stage(rec, gens, cs);
    });
    stage(rec, "certificates", [&] { certificate_stage(rec); });
    stage(rec, "ladders", [&] { st.emplace(build_stack(s, cfg.n_max)); });
    if (st) {
        stage(rec, "alpha", [&] { alpha_stage(rec, *st); });
        stage(rec, "tau", [&] { tau_stage(rec, *st); });
        stage(rec, "resolvent", [&] { resolvent_stage(rec, *st); });
        stage(rec, "lattice", [&] { lattice_stage(rec, *st); });
        if (s == 1) stage(rec, "demo", [&] { demo_stage(rec, *st); });
    }
    return {std::move(rec.checks), std::move(rec.discrepancies)};
}

}  // namespace detail

/// Run every check for every configured spin. Per-spin pipelines may run
/// concurrently; results are merged in config order, so the report does not
/// depend on the parallelism hint.
inline VerificationReport run_suite(const SuiteConfig& cfg) {
    cfg.validate();
    std::vector<detail::SpinOutcome> outcomes(cfg.spins.size());
    if (cfg.parallelism > 1 && cfg.spins.size() > 1) {
        std::vector<std::future<detail::SpinOutcome>> futures;
        std::size_t next = 0;
        while (next < cfg.spins.size()) {
            futures.clear();
            const std::size_t batch_start = next;
            for (int w = 0; w < cfg.parallelism && next < cfg.spins.size(); ++w, ++next) {
                const int s = cfg.spins[next];
                futures.push_back(std::async(std::launch::async, [&cfg, s] { return detail::run_spin(cfg, s); }));
            }
            for (std::size_t i = 0; i < futures.size(); ++i) outcomes[batch_start + i] = futures[i].get();
        }
    } else {
        for (std::size_t i = 0; i < cfg.spins.size(); ++i) outcomes[i] = detail::run_spin(cfg, cfg.spins[i]);
    }
    VerificationReport rep;
    for (auto& o : outcomes) {
        for (auto& c : o.checks) rep.checks.push_back(std::move(c));
        for (auto& d : o.discrepancies) rep.discrepancies.push_back(std::move(d));
    }
    return rep;
}

}  // namespace jsladder
