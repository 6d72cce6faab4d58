#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "jsladder/casimir_ladders.hpp"
#include "jsladder/fock.hpp"
#include "jsladder/ladder_engine.hpp"
#include "jsladder/schwinger.hpp"

// Machine-readable dumps backing the CLI subcommands.

namespace jsladder {

namespace detail {

inline std::string csv_double(double x) {
    std::ostringstream s;
    s.precision(17);
    s << x;
    return s.str();
}

// Real when the imaginary part is negligible, else [re, im].
inline nlohmann::ordered_json amplitude_json(Complex z) {
    if (std::abs(z.imag()) <= 1e-14 * std::max(1.0, std::abs(z))) return z.real();
    return nlohmann::ordered_json::array({z.real(), z.imag()});
}

// jpoly_to_json yields plain json; coefficients are only arrays and scalars.
inline nlohmann::ordered_json jpoly_ordered(const JPoly& p) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& pair : jpoly_to_json(p)) {
        nlohmann::ordered_json c = nlohmann::ordered_json::array();
        for (const auto& x : pair) {
            if (x.is_string()) {
                c.push_back(x.get<std::string>());
            } else {
                c.push_back(x.get<std::int64_t>());
            }
        }
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace detail

/// Basis as a JSON array of occupation vectors, in internal order.
inline nlohmann::ordered_json basis_to_json(const SectorBasis& basis) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& st : basis) out.push_back(st.occupations());
    return out;
}

/// One CSV row per distinct j label in each (N, weight) sector.
inline std::string spectrum_csv(const CasimirSpectrum& cs, std::optional<SectorKey> only = std::nullopt) {
    std::string out = "sector,eigenvalue,j,multiplicity\n";
    bool found = !only;
    for (const auto& sector : cs.decomposition().sectors()) {
        if (only && sector.key != *only) continue;
        found = true;
        // Labels were snapped by CasimirSpectrum, so the exact j(j+1) is printed.
        std::map<int, int> by_j;
        for (Eigen::Index i = 0; i < sector.eigenvalues.size(); ++i) {
            const double x = sector.eigenvalues(i);
            ++by_j[static_cast<int>(std::lround(0.5 * (std::sqrt(1.0 + 4.0 * std::max(x, 0.0)) - 1.0)))];
        }
        for (const auto& [j, mult] : by_j) {
            out += std::to_string(sector.key.n) + ":" + std::to_string(sector.key.weight) + "," +
                   detail::csv_double(static_cast<double>(j) * (j + 1)) + "," + std::to_string(j) + "," +
                   std::to_string(mult) + "\n";
        }
    }
    if (!found) {
        throw std::invalid_argument("spectrum: no sector " + to_string(*only) + " in the truncated space");
    }
    return out;
}

inline nlohmann::ordered_json alpha_to_json(const AlphaMatrix& a) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : a.entries) {
        nlohmann::ordered_json r = nlohmann::ordered_json::array();
        for (const auto& e : row) r.push_back(detail::jpoly_ordered(e));
        rows.push_back(std::move(r));
    }
    nlohmann::ordered_json out;
    out["family"] = to_string(a.family);
    out["indices"] = a.indices;
    out["entries"] = std::move(rows);
    return out;
}

/// σ table and right functions for spin s; coefficients as [num, den] pairs.
inline nlohmann::ordered_json ladders_to_json(int s) {
    const AlphaMatrix p = build_alpha(s, Family::P);
    const AlphaMatrix m = build_alpha(s, Family::M);
    nlohmann::ordered_json rf = nlohmann::ordered_json::array();
    for (const auto& f : right_functions(s)) {
        nlohmann::ordered_json j;
        j["theta"] = f.theta;
        j["family"] = to_string(f.family);
        j["poly"] = detail::jpoly_ordered(f.poly);
        j["text"] = f.poly.to_string();
        rf.push_back(std::move(j));
    }
    nlohmann::ordered_json sig = nlohmann::ordered_json::array();
    for (int theta = -s; theta <= s; ++theta) {
        const SigmaVector sv = solve_sigma(family_of(s, theta) == Family::P ? p : m, theta);
        nlohmann::ordered_json j;
        j["theta"] = theta;
        j["family"] = to_string(sv.family);
        j["first_index"] = sv.first_index;
        nlohmann::ordered_json polys = nlohmann::ordered_json::array();
        nlohmann::ordered_json text = nlohmann::ordered_json::array();
        for (const auto& x : sv.sigmas) {
            polys.push_back(detail::jpoly_ordered(x));
            text.push_back(x.to_string());
        }
        j["sigma"] = std::move(polys);
        j["text"] = std::move(text);
        sig.push_back(std::move(j));
    }
    nlohmann::ordered_json out;
    out["spin"] = s;
    out["alpha"] = nlohmann::ordered_json::array({alpha_to_json(p), alpha_to_json(m)});
    out["right_functions"] = std::move(rf);
    out["sigma"] = std::move(sig);
    return out;
}

inline nlohmann::ordered_json lattice_to_json(const KernelLatticeReport& lat) {
    auto opt = [](const std::optional<double>& v) {
        return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
    };
    nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
    for (const auto& node : lat.nodes) {
        nlohmann::ordered_json actions = nlohmann::ordered_json::array();
        for (const auto& a : node.actions) {
            nlohmann::ordered_json x;
            x["theta"] = a.theta;
            x["raise_norm"] = opt(a.raise_norm);
            x["raise_min_singular"] = opt(a.raise_min_singular);
            x["lower_norm"] = opt(a.lower_norm);
            x["raise_annihilates"] = a.raise_annihilates;
            x["raise_injective"] = a.raise_injective;
            x["lower_annihilates"] = a.lower_annihilates;
            actions.push_back(std::move(x));
        }
        nlohmann::ordered_json j;
        j["n"] = node.n;
        j["j"] = node.j;
        j["dim"] = node.dim;
        j["generated_dim"] = node.generated_dim;
        j["reachable_by"] = node.reachable_by;
        j["actions"] = std::move(actions);
        nodes.push_back(std::move(j));
    }
    nlohmann::ordered_json arrows = nlohmann::ordered_json::array();
    for (const auto& a : lat.arrows) {
        nlohmann::ordered_json j;
        j["theta"] = a.theta;
        j["raising"] = a.raising;
        j["from"] = {a.n_from, a.j_from};
        j["to"] = {a.n_to, a.j_to};
        j["amplitude"] = a.amplitude;
        arrows.push_back(std::move(j));
    }
    nlohmann::ordered_json out;
    out["spin"] = lat.spin;
    out["n_max"] = lat.n_max;
    out["tolerance"] = lat.tolerance;
    out["nodes"] = std::move(nodes);
    out["arrows"] = std::move(arrows);
    return out;
}

/// s=1 canonical vectors as (occupation vector, amplitude) pairs over the nonzero coordinates.
inline nlohmann::ordered_json canonical_to_json(const LadderStack& st, double drop = 1e-12) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    const auto& basis = *st.basis();
    for (const auto& c : canonical_basis_s1(st)) {
        nlohmann::ordered_json comps = nlohmann::ordered_json::array();
        for (Eigen::Index i = 0; i < c.vector.size(); ++i) {
            if (std::abs(c.vector(i)) <= drop) continue;
            comps.push_back({basis.state(static_cast<std::size_t>(i)).occupations(), detail::amplitude_json(c.vector(i))});
        }
        nlohmann::ordered_json j;
        j["n"] = c.n;
        j["j"] = c.j;
        j["jz"] = c.jz;
        j["alpha"] = c.alpha;
        j["components"] = std::move(comps);
        out.push_back(std::move(j));
    }
    return out;
}

/// Named operators for dump-op: Jz, Jplus, Jminus, J2, N, jhat, a<mu>, adag<mu>,
/// p<k>, m<k>, tau<theta> (the raising τ†_θ).
inline SparseOperator named_operator(const LadderStack& st, const std::string& name) {
    const auto& g = st.gens;
    auto int_suffix = [&](std::size_t prefix) -> int {
        const std::string rest = name.substr(prefix);
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(rest, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (rest.empty() || used != rest.size()) throw std::invalid_argument("bad operator index in '" + name + "'");
        return v;
    };
    if (name == "Jz") return g.Jz;
    if (name == "Jplus") return g.Jplus;
    if (name == "Jminus") return g.Jminus;
    if (name == "J2") return g.J2;
    if (name == "N") return g.Ntot;
    if (name == "jhat") return st.jhat;
    if (name.rfind("adag", 0) == 0) return creation_op(st.basis(), int_suffix(4));
    if (name.rfind("tau", 0) == 0) return st.tau(int_suffix(3)).op;
    if (name.rfind("a", 0) == 0) return annihilation_op(st.basis(), int_suffix(1));
    if (name.rfind("p", 0) == 0) return st.family.p(int_suffix(1));
    if (name.rfind("m", 0) == 0) return st.family.m(int_suffix(1));
    throw std::invalid_argument("unknown operator '" + name +
                                "' (expected Jz, Jplus, Jminus, J2, N, jhat, a<mu>, adag<mu>, p<k>, m<k>, tau<theta>)");
}

}  // namespace jsladder
