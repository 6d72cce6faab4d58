#pragma once

#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

namespace jsladder {

enum class CheckKind { Assert, Report };

inline std::string to_string(CheckKind k) { return k == CheckKind::Assert ? "assert" : "report"; }

inline CheckKind check_kind_from_string(const std::string& s) {
    if (s == "assert") return CheckKind::Assert;
    if (s == "report") return CheckKind::Report;
    throw std::invalid_argument("unknown check kind: " + s);
}

struct CheckParams {
    std::optional<int> spin;
    std::optional<int> theta;
    std::optional<int> k;
    std::optional<int> margin;
    std::optional<int> n_max;

    bool operator==(const CheckParams&) const = default;
};

/// One verified identity. `residual` is the relative Frobenius residual
/// (absolute when `absolute` is set); exact certificates carry no residual.
struct CheckResult {
    std::string name;
    std::string anchor;
    CheckParams params;
    std::optional<double> residual;
    bool absolute = false;
    double tolerance = 0.0;
    bool passed = false;
    CheckKind kind = CheckKind::Assert;
    std::string detail;
    std::optional<double> wall_ms;

    bool operator==(const CheckResult&) const = default;
};

/// A printed claim that does not hold as written, with the measured evidence.
struct Discrepancy {
    std::string anchor;
    std::string note;
    CheckParams params;
    std::optional<double> residual;

    bool operator==(const Discrepancy&) const = default;
};

struct VerificationReport {
    std::vector<CheckResult> checks;
    std::vector<Discrepancy> discrepancies;

    bool passed() const {
        for (const auto& c : checks) {
            if (!c.passed) return false;
        }
        return true;
    }

    std::size_t failed_count() const {
        std::size_t n = 0;
        for (const auto& c : checks) n += c.passed ? 0 : 1;
        return n;
    }

    bool operator==(const VerificationReport&) const = default;
};

namespace detail {

template <class T>
void put_optional(nlohmann::ordered_json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

template <class T>
std::optional<T> get_optional(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<T>();
}

inline nlohmann::ordered_json params_to_json(const CheckParams& p) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    put_optional(j, "spin", p.spin);
    put_optional(j, "theta", p.theta);
    put_optional(j, "k", p.k);
    put_optional(j, "margin", p.margin);
    put_optional(j, "n_max", p.n_max);
    return j;
}

inline CheckParams params_from_json(const nlohmann::json& j) {
    return {get_optional<int>(j, "spin"), get_optional<int>(j, "theta"), get_optional<int>(j, "k"),
            get_optional<int>(j, "margin"), get_optional<int>(j, "n_max")};
}

inline std::string format_double(double x) {
    std::ostringstream s;
    s.precision(17);
    s << x;
    return s.str();
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

template <class T>
std::string csv_optional(const std::optional<T>& v) {
    if (!v) return "";
    if constexpr (std::is_floating_point_v<T>) {
        return format_double(*v);
    } else {
        return std::to_string(*v);
    }
}

}  // namespace detail

inline nlohmann::ordered_json report_to_json(const VerificationReport& r) {
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const auto& c : r.checks) {
        nlohmann::ordered_json j;
        j["name"] = c.name;
        j["anchor"] = c.anchor;
        j["params"] = detail::params_to_json(c.params);
        j["residual"] = c.residual ? nlohmann::ordered_json(*c.residual) : nlohmann::ordered_json(nullptr);
        j["absolute"] = c.absolute;
        j["tolerance"] = c.tolerance;
        j["passed"] = c.passed;
        j["kind"] = to_string(c.kind);
        j["detail"] = c.detail;
        if (c.wall_ms) j["wall_ms"] = *c.wall_ms;
        checks.push_back(std::move(j));
    }
    nlohmann::ordered_json disc = nlohmann::ordered_json::array();
    for (const auto& d : r.discrepancies) {
        nlohmann::ordered_json j;
        j["anchor"] = d.anchor;
        j["note"] = d.note;
        j["params"] = detail::params_to_json(d.params);
        j["residual"] = d.residual ? nlohmann::ordered_json(*d.residual) : nlohmann::ordered_json(nullptr);
        disc.push_back(std::move(j));
    }
    nlohmann::ordered_json out;
    out["passed"] = r.passed();
    out["check_count"] = r.checks.size();
    out["failed_count"] = r.failed_count();
    out["checks"] = std::move(checks);
    out["discrepancies"] = std::move(disc);
    return out;
}

inline VerificationReport report_from_json(const nlohmann::json& j) {
    VerificationReport r;
    for (const auto& c : j.at("checks")) {
        CheckResult x;
        x.name = c.at("name").get<std::string>();
        x.anchor = c.at("anchor").get<std::string>();
        x.params = detail::params_from_json(c.at("params"));
        x.residual = detail::get_optional<double>(c, "residual");
        x.absolute = c.at("absolute").get<bool>();
        x.tolerance = c.at("tolerance").get<double>();
        x.passed = c.at("passed").get<bool>();
        x.kind = check_kind_from_string(c.at("kind").get<std::string>());
        x.detail = c.at("detail").get<std::string>();
        x.wall_ms = detail::get_optional<double>(c, "wall_ms");
        r.checks.push_back(std::move(x));
    }
    for (const auto& d : j.at("discrepancies")) {
        r.discrepancies.push_back({d.at("anchor").get<std::string>(), d.at("note").get<std::string>(),
                                   detail::params_from_json(d.at("params")),
                                   detail::get_optional<double>(d, "residual")});
    }
    return r;
}

inline std::string report_to_csv(const VerificationReport& r) {
    std::string out = "check,anchor,spin,theta,k,margin,n_max,residual,absolute,tolerance,passed,kind\n";
    for (const auto& c : r.checks) {
        out += detail::csv_field(c.name) + "," + detail::csv_field(c.anchor) + "," +
               detail::csv_optional(c.params.spin) + "," + detail::csv_optional(c.params.theta) + "," +
               detail::csv_optional(c.params.k) + "," + detail::csv_optional(c.params.margin) + "," +
               detail::csv_optional(c.params.n_max) + "," + detail::csv_optional(c.residual) + "," +
               (c.absolute ? "true" : "false") + "," + detail::format_double(c.tolerance) + "," +
               (c.passed ? "true" : "false") + "," + to_string(c.kind) + "\n";
    }
    return out;
}

enum class ReportFormat { Json, Csv };

inline ReportFormat report_format_from_string(const std::string& s) {
    if (s == "json") return ReportFormat::Json;
    if (s == "csv") return ReportFormat::Csv;
    throw std::invalid_argument("unknown report format: " + s + " (expected json or csv)");
}

inline std::string render_report(const VerificationReport& r, ReportFormat f) {
    if (f == ReportFormat::Csv) return report_to_csv(r);
    return report_to_json(r).dump(2) + "\n";
}

/// Write the report; I/O failures name the path.
inline void export_report(const VerificationReport& r, const std::string& path, ReportFormat f) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("export_report: cannot open '" + path + "' for writing");
    out << render_report(r, f);
    out.flush();
    if (!out) throw std::runtime_error("export_report: write to '" + path + "' failed");
}

}  // namespace jsladder
