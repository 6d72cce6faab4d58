#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jsladder/jsladder.hpp"

namespace {

struct Common {
    std::vector<int> spins;
    int n_max = 4;
    std::optional<double> tolerance;
    std::string out;
    std::string format = "json";
};

void add_common(CLI::App* cmd, Common& c, bool many_spins) {
    if (many_spins) {
        cmd->add_option("--spin", c.spins, "spin(s) s >= 1; repeat or comma-separate")->delimiter(',');
    } else {
        cmd->add_option("--spin", c.spins, "spin s >= 1")->expected(1);
    }
    cmd->add_option("--nmax", c.n_max, "particle-number cutoff")->check(CLI::NonNegativeNumber);
    cmd->add_option("--tolerance", c.tolerance, "default tolerance for equality checks")->check(CLI::PositiveNumber);
    cmd->add_option("--out", c.out, "output path (stdout when omitted)");
}

int single_spin(const Common& c, int fallback = 1) {
    const int s = c.spins.empty() ? fallback : c.spins.front();
    if (s < 1) throw std::invalid_argument("--spin must be >= 1");
    return s;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << text;
    if (!f.flush()) throw std::runtime_error("write to '" + path + "' failed");
}

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

std::optional<jsladder::SectorKey> parse_sector(const std::string& s) {
    if (s.empty()) return std::nullopt;
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("--sector expects n,w");
    try {
        return jsladder::SectorKey{std::stoi(s.substr(0, comma)), std::stoi(s.substr(comma + 1))};
    } catch (const std::logic_error&) {
        throw std::invalid_argument("--sector expects two integers n,w, got '" + s + "'");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Jordan-Schwinger su(2) ladder operator toolkit"};
    app.require_subcommand(1);

    Common verify_opts;
    int jobs = 1;
    bool timings = false;
    std::vector<std::string> overrides;
    auto* verify = app.add_subcommand("verify", "run the verification suite and emit a report");
    add_common(verify, verify_opts, true);
    verify->add_option("--format", verify_opts.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    verify->add_option("--jobs", jobs, "parallelism hint")->check(CLI::PositiveNumber);
    verify->add_option("--override", overrides, "per-check tolerance, name=value (repeatable)");
    verify->add_flag("--timings", timings, "record wall time per check (breaks byte-identical output)");

    Common spec_opts;
    std::string sector;
    auto* spectrum = app.add_subcommand("spectrum", "J^2 spectrum per (N, weight) sector as CSV");
    add_common(spectrum, spec_opts, false);
    spectrum->add_option("--sector", sector, "restrict to one sector, n,w");

    Common ladder_opts;
    auto* ladders = app.add_subcommand("ladders", "alpha matrices, sigma table and right functions as JSON");
    add_common(ladders, ladder_opts, false);

    Common kernel_opts;
    auto* kernel = app.add_subcommand("kernel", "J_z kernel lattice report as JSON");
    add_common(kernel, kernel_opts, false);

    Common basis_opts;
    bool canonical = false;
    auto* basis = app.add_subcommand("basis", "Fock basis (or s=1 canonical basis) as JSON");
    add_common(basis, basis_opts, false);
    basis->add_flag("--canonical", canonical, "emit the s=1 canonical |n, j, j_z> vectors");

    Common op_opts;
    std::string op_name;
    auto* dump_op = app.add_subcommand("dump-op", "one operator as coordinate-triplet JSON");
    add_common(dump_op, op_opts, false);
    dump_op->add_option("--op", op_name, "Jz, Jplus, Jminus, J2, N, jhat, a<mu>, adag<mu>, p<k>, m<k>, tau<theta>")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*verify) {
            jsladder::SuiteConfig cfg;
            if (!verify_opts.spins.empty()) cfg.spins = verify_opts.spins;
            cfg.n_max = verify_opts.n_max;
            if (verify_opts.tolerance) cfg.default_tolerance = *verify_opts.tolerance;
            cfg.format = jsladder::report_format_from_string(verify_opts.format);
            cfg.parallelism = jobs;
            cfg.record_timings = timings;
            for (const auto& o : overrides) {
                const auto eq = o.find('=');
                if (eq == std::string::npos) throw std::invalid_argument("--override expects name=value, got '" + o + "'");
                const std::string name = o.substr(0, eq);
                if (!jsladder::find_check_spec(name)) throw std::invalid_argument("--override: unknown check '" + name + "'");
                cfg.tolerance_overrides[name] = std::stod(o.substr(eq + 1));
            }
            const auto report = jsladder::run_suite(cfg);
            if (verify_opts.out.empty()) {
                std::cout << jsladder::render_report(report, cfg.format);
            } else {
                jsladder::export_report(report, verify_opts.out, cfg.format);
            }
            for (const auto& c : report.checks) {
                if (!c.passed) std::cerr << "FAIL " << c.name << " (" << c.anchor << "): " << c.detail << "\n";
            }
            std::cerr << report.checks.size() - report.failed_count() << "/" << report.checks.size()
                      << " checks passed, " << report.discrepancies.size() << " discrepancies logged\n";
            return static_cast<int>(std::min<std::size_t>(report.failed_count(), 255));
        }
        if (*spectrum) {
            const auto key = parse_sector(sector);
            auto gens = jsladder::su2_generators(jsladder::make_basis(single_spin(spec_opts), spec_opts.n_max));
            emit(jsladder::spectrum_csv(jsladder::CasimirSpectrum(gens), key), spec_opts.out);
            return 0;
        }
        if (*ladders) {
            emit(dump(jsladder::ladders_to_json(single_spin(ladder_opts))), ladder_opts.out);
            return 0;
        }
        if (*kernel) {
            const auto st = jsladder::build_stack(single_spin(kernel_opts), kernel_opts.n_max,
                                                  kernel_opts.tolerance.value_or(jsladder::default_ladder_tolerance));
            emit(dump(jsladder::lattice_to_json(jsladder::lattice_report(st))), kernel_opts.out);
            return 0;
        }
        if (*basis) {
            const int s = single_spin(basis_opts);
            if (canonical) {
                if (s != 1) throw std::invalid_argument("--canonical requires --spin 1");
                emit(dump(jsladder::canonical_to_json(jsladder::build_stack(1, basis_opts.n_max))), basis_opts.out);
            } else {
                emit(dump(jsladder::basis_to_json(jsladder::enumerate_sector(s, basis_opts.n_max))), basis_opts.out);
            }
            return 0;
        }
        if (*dump_op) {
            const auto st = jsladder::build_stack(single_spin(op_opts), op_opts.n_max);
            emit(jsladder::operator_to_json(jsladder::named_operator(st, op_name)).dump() + "\n", op_opts.out);
            return 0;
        }
    } catch (const jsladder::CertificationError& e) {
        std::cerr << "certification failed: " << e.what() << " (witness " << e.witness().to_string() << ")\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
