#include "dicke/model.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace dicke::model {

ModelParams ModelParams::create(double delta_c, double kappa, double delta,
                                double g0, double g1, double omega, int n_atoms) {
    if (!(kappa >= 0.0)) throw std::domain_error("ModelParams: kappa must be >= 0");
    if (!(delta_c > 0.0)) throw std::domain_error("ModelParams: delta_c must be > 0");
    if (!(delta > 0.0)) throw std::domain_error("ModelParams: delta must be > 0");
    if (n_atoms < 1) throw std::domain_error("ModelParams: n_atoms must be >= 1");
    if (g0 < 0.0 || g1 < 0.0) throw std::domain_error("ModelParams: couplings must be >= 0");
    if (omega < 0.0) throw std::domain_error("ModelParams: omega must be >= 0");
    return ModelParams{delta_c, kappa, delta, g0, g1, omega, n_atoms};
}

double critical_coupling(const ModelParams& p) {
    if (!(p.delta_c > 0.0)) throw std::domain_error("critical_coupling: delta_c must be > 0");
    const double d2k2 = p.delta_c * p.delta_c + p.kappa * p.kappa;
    return std::sqrt(p.delta * d2k2 / (4.0 * p.delta_c));
}

double resonance_frequency(const ModelParams& p) {
    const double gc = critical_coupling(p);
    if (p.g0 > gc)
        throw std::domain_error("resonance_frequency: g0 > g_c (static superradiance)");
    const double r = p.g0 / gc;
    return p.delta * std::sqrt(std::max(0.0, 1.0 - r * r));
}

double damping_gamma0(const ModelParams& p) {
    const double d2k2 = p.delta_c * p.delta_c + p.kappa * p.kappa;
    return 4.0 * p.kappa * p.delta_c * p.delta * p.g0 * p.g0 / (d2k2 * d2k2);
}

double threshold_g1c(const ModelParams& p) {
    const double wres = resonance_frequency(p);
    const double d2k2 = p.delta_c * p.delta_c + p.kappa * p.kappa;
    return 2.0 * p.kappa * wres * p.g0 / d2k2;
}

double detuned_threshold(const ModelParams& p, double omega) {
    if (p.g0 == 0.0)
        throw std::domain_error("detuned_threshold: g0 = 0 (detuning term diverges)");
    const double wres = resonance_frequency(p);
    const double d2k2 = p.delta_c * p.delta_c + p.kappa * p.kappa;
    const double damped = 4.0 * p.kappa * p.kappa * wres * wres * p.g0 * p.g0 / (d2k2 * d2k2);
    const double detune = (1.0 - omega / (2.0 * wres));
    const double wres2 = wres * wres;
    const double detuning_term = d2k2 * d2k2 * wres2 * wres2 /
                                 (4.0 * p.delta_c * p.delta_c * p.delta * p.delta * p.g0 * p.g0) *
                                 detune * detune;
    return std::sqrt(damped + detuning_term);
}

double coupling_g(const ModelParams& p, double t) {
    return p.g0 + p.g1 * std::cos(p.omega * t);
}

double coupling_g_dot(const ModelParams& p, double t) {
    return -p.g1 * p.omega * std::sin(p.omega * t);
}

double cavity_elimination_ratio(const ModelParams& p) {
    const double cav = std::hypot(p.delta_c, p.kappa);
    const double slow = std::max({p.delta, p.omega, p.g0 + p.g1});
    return slow > 0.0 ? cav / slow : std::numeric_limits<double>::infinity();
}

DerivedScalars derived_scalars(const ModelParams& p) {
    DerivedScalars d{};
    d.g_c = critical_coupling(p);
    d.gamma0 = damping_gamma0(p);
    if (p.g0 <= d.g_c) {
        d.omega_res = resonance_frequency(p);
        d.g1_c = threshold_g1c(p);
    } else {
        d.omega_res = std::numeric_limits<double>::quiet_NaN();
        d.g1_c = std::numeric_limits<double>::quiet_NaN();
    }
    return d;
}

std::vector<std::string> regime_warnings(const ModelParams& p) {
    std::vector<std::string> w;
    const double gc = critical_coupling(p);
    if (p.g0 + p.g1 >= gc) {
        std::ostringstream os;
        os << "drive not subcritical: g0 + g1 = " << (p.g0 + p.g1) << " >= g_c = " << gc;
        w.push_back(os.str());
    }
    const double ratio = cavity_elimination_ratio(p);
    if (ratio < 5.0) {
        std::ostringstream os;
        os << "fast-cavity ratio |delta_c - i kappa| / max(delta, omega, g) = " << ratio
           << " is small; atom-only elimination may be inaccurate";
        w.push_back(os.str());
    }
    return w;
}

namespace {

std::map<std::string, std::string> read_kv(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key or value");
        if (kv.count(key))
            throw std::runtime_error("config: duplicate key '" + key + "'");
        kv[key] = value;
    }
    return kv;
}

double to_double(const std::string& key, const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error("config: key '" + key + "' has non-numeric value '" + s + "'");
    }
    if (pos != s.size())
        throw std::runtime_error("config: key '" + key + "' has trailing junk in '" + s + "'");
    return v;
}

}  // namespace

ModelParams parse_params(std::istream& in) {
    auto kv = read_kv(in);
    auto take = [&](const char* key) -> std::optional<double> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        double v = to_double(key, it->second);
        kv.erase(it);
        return v;
    };

    ModelParams base;
    base.delta_c = take("delta_c").value_or(1.0);
    base.kappa = take("kappa").value_or(1.0);
    base.delta = take("delta").value_or(0.1);
    const auto g0_abs = take("g0");
    const auto g0_rel = take("g0_over_gc");
    const auto g1_abs = take("g1");
    const auto g1_rel = take("g1_over_g0");
    const auto omega_abs = take("omega");
    const auto omega_rel = take("omega_over_2wres");
    if (auto n = take("n_atoms")) {
        if (*n < 1.0 || *n != std::floor(*n))
            throw std::runtime_error("config: n_atoms must be a positive integer");
        base.n_atoms = int(*n);
    }
    if (!kv.empty())
        throw std::runtime_error("config: unknown key '" + kv.begin()->first + "'");

    if (g0_abs && g0_rel) throw std::runtime_error("config: both g0 and g0_over_gc given");
    if (g1_abs && g1_rel) throw std::runtime_error("config: both g1 and g1_over_g0 given");
    if (omega_abs && omega_rel)
        throw std::runtime_error("config: both omega and omega_over_2wres given");

    base.g0 = g0_abs.value_or(0.0);
    if (g0_rel) base.g0 = *g0_rel * critical_coupling(base);
    base.g1 = g1_abs.value_or(0.0);
    if (g1_rel) base.g1 = *g1_rel * base.g0;
    base.omega = omega_abs.value_or(0.0);
    if (omega_rel) base.omega = *omega_rel * 2.0 * resonance_frequency(base);

    return ModelParams::create(base.delta_c, base.kappa, base.delta, base.g0, base.g1,
                               base.omega, base.n_atoms);
}

ModelParams parse_params_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    return parse_params(in);
}

}  // namespace dicke::model
