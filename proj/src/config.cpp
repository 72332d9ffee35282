#include "bslab/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bslab/errors.hpp"

namespace bslab {

Grid RunConfig::make_grid() const {
    return Grid::build(domain.dim, domain.extent, domain.res);
}

int RunConfig::full_basis_count() const {
    int n = 1;
    for (int a = 0; a < domain.dim; ++a) n *= domain.res[a];
    return n;
}

int RunConfig::effective_K() const { return spectra.K == 0 ? full_basis_count() : spectra.K; }

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& s, int line) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) fail(line, "trailing characters in number '" + s + "'");
        return v;
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        fail(line, "expected a number, got '" + s + "'");
    }
}

long parse_int(const std::string& s, int line) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) fail(line, "trailing characters in integer '" + s + "'");
        return v;
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        fail(line, "expected an integer, got '" + s + "'");
    }
}

std::vector<double> parse_doubles(const std::string& s, int line) {
    std::vector<double> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(parse_double(tok, line));
    return out;
}

std::vector<int> parse_ints(const std::string& s, int line) {
    std::vector<int> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(static_cast<int>(parse_int(tok, line)));
    return out;
}

bool parse_bool(const std::string& s, int line) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    fail(line, "expected a boolean, got '" + s + "'");
}

PotentialKind parse_kind(const std::string& s, int line) {
    if (s == "constant") return PotentialKind::constant;
    if (s == "gaussian_bump") return PotentialKind::gaussian_bump;
    if (s == "cosine_separable") return PotentialKind::cosine_separable;
    if (s == "inverse_power") return PotentialKind::inverse_power;
    if (s == "grid_samples") return PotentialKind::grid_samples;
    fail(line, "unknown potential kind '" + s + "'");
}

TraceScheme parse_scheme(const std::string& s, int line) {
    if (s == "flux1") return TraceScheme::flux1;
    if (s == "onesided2") return TraceScheme::onesided2;
    fail(line, "unknown trace scheme '" + s + "'");
}

PerturbMode parse_mode(const std::string& s, int line) {
    if (s == "eigen_shift_decaying") return PerturbMode::eigen_shift_decaying;
    if (s == "eigen_shift_constant") return PerturbMode::eigen_shift_constant;
    if (s == "trace_noise_l2") return PerturbMode::trace_noise_l2;
    if (s == "trace_noise_constant") return PerturbMode::trace_noise_constant;
    if (s == "drop_leading_j") return PerturbMode::drop_leading_j;
    fail(line, "unknown perturbation mode '" + s + "'");
}

SweepRoute parse_route(const std::string& s, int line) {
    if (s == "direct") return SweepRoute::direct;
    if (s == "series") return SweepRoute::series;
    if (s == "both") return SweepRoute::both;
    fail(line, "unknown route '" + s + "'");
}

void set_potential_key(PotentialSpec& p, const std::string& key, const std::string& value,
                       int line, int dim) {
    auto fill3d = [&](std::array<double, kMaxDim>& dst) {
        const auto v = parse_doubles(value, line);
        if (static_cast<int>(v.size()) != dim) fail(line, "expected " + std::to_string(dim) + " values");
        for (int a = 0; a < dim; ++a) dst[a] = v[a];
    };
    if (key == "kind") {
        p.kind = parse_kind(value, line);
    } else if (key == "amplitude") {
        p.amplitude = parse_double(value, line);
    } else if (key == "center") {
        fill3d(p.center);
    } else if (key == "width") {
        p.width = parse_double(value, line);
    } else if (key == "exponent") {
        p.exponent = parse_double(value, line);
    } else if (key == "mode") {
        const auto v = parse_ints(value, line);
        if (static_cast<int>(v.size()) != dim) fail(line, "expected " + std::to_string(dim) + " mode integers");
        for (int a = 0; a < dim; ++a) p.mode[a] = v[a];
    } else if (key == "lower_bound_c") {
        p.lower_bound_c = parse_double(value, line);
        if (p.lower_bound_c < 0.0) fail(line, "lower_bound_c must be >= 0");
    } else if (key == "values_file") {
        std::ifstream in(value);
        if (!in) fail(line, "cannot open values file '" + value + "'");
        p.samples.clear();
        double v;
        while (in >> v) p.samples.push_back(v);
    } else {
        fail(line, "unknown potential key '" + key + "'");
    }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    cfg.isozaki.tau_list.clear();
    cfg.verify = VerifyConfig{};

    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    bool saw_perturbation = false;

    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        const auto hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;

        if (s.front() == '[') {
            if (s.back() != ']') fail(line, "malformed section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section != "domain" && section != "potential1" && section != "potential2" &&
                section != "spectra" && section != "isozaki" && section != "perturbation" &&
                section != "verify" && section != "output" && section != "run")
                fail(line, "unknown section [" + section + "]");
            if (section == "perturbation") saw_perturbation = true;
            continue;
        }

        const auto eq = s.find('=');
        if (eq == std::string::npos) fail(line, "expected key = value");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty()) fail(line, "empty key");

        if (section == "domain") {
            if (key == "dim") cfg.domain.dim = static_cast<int>(parse_int(value, line));
            else if (key == "extent") cfg.domain.extent = parse_doubles(value, line);
            else if (key == "res") cfg.domain.res = parse_ints(value, line);
            else fail(line, "unknown domain key '" + key + "'");
        } else if (section == "potential1") {
            set_potential_key(cfg.q1, key, value, line, cfg.domain.dim);
        } else if (section == "potential2") {
            set_potential_key(cfg.q2, key, value, line, cfg.domain.dim);
        } else if (section == "spectra") {
            if (key == "k") cfg.spectra.K = value == "full" ? 0 : static_cast<int>(parse_int(value, line));
            else if (key == "tol") cfg.spectra.tol = parse_double(value, line);
            else if (key == "trace_scheme") cfg.spectra.scheme = parse_scheme(value, line);
            else fail(line, "unknown spectra key '" + key + "'");
        } else if (section == "isozaki") {
            if (key == "xi_list") {
                cfg.isozaki.xi_list.clear();
                std::istringstream groups(value);
                std::string group;
                while (std::getline(groups, group, ';')) {
                    group = trim(group);
                    if (group.empty()) continue;
                    auto v = parse_doubles(group, line);
                    if (static_cast<int>(v.size()) != cfg.domain.dim)
                        fail(line, "each xi needs " + std::to_string(cfg.domain.dim) + " components");
                    cfg.isozaki.xi_list.push_back(std::move(v));
                }
            } else if (key == "fgrid_xi_max") {
                cfg.isozaki.fgrid_xi_max = parse_double(value, line);
            } else if (key == "tau_list") {
                cfg.isozaki.tau_list = parse_doubles(value, line);
            } else if (key == "route") {
                cfg.isozaki.route = parse_route(value, line);
            } else if (key == "force_tau") {
                cfg.isozaki.force_tau = parse_bool(value, line);
            } else {
                fail(line, "unknown isozaki key '" + key + "'");
            }
        } else if (section == "perturbation") {
            if (!cfg.perturbation) cfg.perturbation = PerturbationConfig{};
            if (key == "mode") cfg.perturbation->mode = parse_mode(value, line);
            else if (key == "magnitude") cfg.perturbation->magnitude = parse_double(value, line);
            else fail(line, "unknown perturbation key '" + key + "'");
        } else if (section == "verify") {
            if (key == "lambda_list") cfg.verify.lambda_list = parse_doubles(value, line);
            else if (key == "samples") cfg.verify.samples = static_cast<int>(parse_int(value, line));
            else fail(line, "unknown verify key '" + key + "'");
        } else if (section == "output") {
            if (key == "dir") cfg.output_dir = value;
            else fail(line, "unknown output key '" + key + "'");
        } else if (section == "run" || section.empty()) {
            if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(value, line));
            else if (key == "threads") cfg.threads = static_cast<int>(parse_int(value, line));
            else fail(line, "unknown run key '" + key + "'");
        }
    }
    if (saw_perturbation && !cfg.perturbation) cfg.perturbation = PerturbationConfig{};

    // structural validation (same checks the grid/build path applies, but
    // reported as config errors with context)
    if (cfg.domain.dim < 1 || cfg.domain.dim > kMaxDim) throw ConfigError("domain.dim must be 1, 2 or 3");
    if (static_cast<int>(cfg.domain.extent.size()) != cfg.domain.dim ||
        static_cast<int>(cfg.domain.res.size()) != cfg.domain.dim)
        throw ConfigError("domain.extent/res must have dim entries");
    for (int a = 0; a < cfg.domain.dim; ++a) {
        if (!(cfg.domain.extent[a] > 0.0)) throw ConfigError("domain.extent must be positive");
        if (cfg.domain.res[a] < 3) throw ConfigError("domain.res must be >= 3 on every axis");
    }
    if (!(cfg.spectra.tol > 0.0)) throw ConfigError("spectra.tol must be positive");
    if (cfg.spectra.K < 0) throw ConfigError("spectra.k must be >= 0 (0 = full)");
    if (cfg.spectra.K > cfg.full_basis_count())
        throw ConfigError("spectra.k exceeds the interior node count");
    if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
    for (std::size_t i = 1; i < cfg.isozaki.tau_list.size(); ++i)
        if (!(cfg.isozaki.tau_list[i] > cfg.isozaki.tau_list[i - 1]))
            throw ConfigError("isozaki.tau_list must be strictly ascending");
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config(os.str());
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_potential(std::ostringstream& os, const char* name, const PotentialSpec& p, int dim) {
    os << '[' << name << "]\n";
    const char* kind = "constant";
    switch (p.kind) {
        case PotentialKind::constant: kind = "constant"; break;
        case PotentialKind::gaussian_bump: kind = "gaussian_bump"; break;
        case PotentialKind::cosine_separable: kind = "cosine_separable"; break;
        case PotentialKind::inverse_power: kind = "inverse_power"; break;
        case PotentialKind::grid_samples: kind = "grid_samples"; break;
    }
    os << "kind = " << kind << '\n';
    os << "amplitude = " << fmt(p.amplitude) << '\n';
    if (p.kind == PotentialKind::gaussian_bump || p.kind == PotentialKind::inverse_power) {
        os << "center =";
        for (int a = 0; a < dim; ++a) os << ' ' << fmt(p.center[a]);
        os << '\n';
    }
    if (p.kind == PotentialKind::gaussian_bump) os << "width = " << fmt(p.width) << '\n';
    if (p.kind == PotentialKind::inverse_power) os << "exponent = " << fmt(p.exponent) << '\n';
    if (p.kind == PotentialKind::cosine_separable) {
        os << "mode =";
        for (int a = 0; a < dim; ++a) os << ' ' << p.mode[a];
        os << '\n';
    }
    if (p.lower_bound_c != 0.0) os << "lower_bound_c = " << fmt(p.lower_bound_c) << '\n';
}

}  // namespace

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream os;
    os << "[run]\nseed = " << cfg.seed << "\nthreads = " << cfg.threads << '\n';
    os << "\n[domain]\ndim = " << cfg.domain.dim << "\nextent =";
    for (double e : cfg.domain.extent) os << ' ' << fmt(e);
    os << "\nres =";
    for (int r : cfg.domain.res) os << ' ' << r;
    os << '\n';
    os << '\n';
    write_potential(os, "potential1", cfg.q1, cfg.domain.dim);
    os << '\n';
    write_potential(os, "potential2", cfg.q2, cfg.domain.dim);
    os << "\n[spectra]\nk = ";
    if (cfg.spectra.K == 0) os << "full";
    else os << cfg.spectra.K;
    os << "\ntol = " << fmt(cfg.spectra.tol) << "\ntrace_scheme = " << to_string(cfg.spectra.scheme)
       << '\n';
    os << "\n[isozaki]\n";
    if (!cfg.isozaki.xi_list.empty()) {
        os << "xi_list = ";
        for (std::size_t i = 0; i < cfg.isozaki.xi_list.size(); ++i) {
            if (i) os << " ; ";
            for (std::size_t a = 0; a < cfg.isozaki.xi_list[i].size(); ++a) {
                if (a) os << ' ';
                os << fmt(cfg.isozaki.xi_list[i][a]);
            }
        }
        os << '\n';
    }
    if (cfg.isozaki.fgrid_xi_max) os << "fgrid_xi_max = " << fmt(*cfg.isozaki.fgrid_xi_max) << '\n';
    if (!cfg.isozaki.tau_list.empty()) {
        os << "tau_list =";
        for (double t : cfg.isozaki.tau_list) os << ' ' << fmt(t);
        os << '\n';
    }
    os << "route = "
       << (cfg.isozaki.route == SweepRoute::direct
               ? "direct"
               : cfg.isozaki.route == SweepRoute::series ? "series" : "both")
       << '\n';
    if (cfg.isozaki.force_tau) os << "force_tau = true\n";
    if (cfg.perturbation) {
        os << "\n[perturbation]\nmode = " << to_string(cfg.perturbation->mode)
           << "\nmagnitude = " << fmt(cfg.perturbation->magnitude) << '\n';
    }
    os << "\n[verify]\nlambda_list =";
    for (double l : cfg.verify.lambda_list) os << ' ' << fmt(l);
    os << "\nsamples = " << cfg.verify.samples << '\n';
    os << "\n[output]\ndir = " << cfg.output_dir << '\n';
    return os.str();
}

}  // namespace bslab
